"""Obfuscation bench: seeded, semantics-preserving variants of a program
for all eight attack classes, including encrypted packages whose loaders
decrypt at runtime with a local-file or loopback-served key.

The stream cipher is deliberately non-cryptographic (XOR against a
splitmix64 keystream): the bench models the attack's structure, not its
strength.  Loaders are emitted as plain top-level code whose 64-bit
arithmetic is inlined with 32-bit limbs so they run in the sandbox.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .source import Node, ScopedRenamer, SourceUnit, parse_text, to_source
from .source.jsast import FUNCTION_KINDS
from .util import SplitMix64, fold_key_to_seed

METHODS = ("IM", "DCI", "CFF", "NF", "SS", "SAE", "LKD", "CKD")


@dataclass
class ObfuscationRecipe:
    method: str
    seed: int
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"method": self.method, "seed": self.seed, "params": self.params}

    @staticmethod
    def from_dict(data: dict) -> "ObfuscationRecipe":
        return ObfuscationRecipe(data["method"], data["seed"], data.get("params", {}))


@dataclass
class ObfuscationResult:
    sources: list[SourceUnit]
    recipe: ObfuscationRecipe
    warnings: list[str] = field(default_factory=list)
    assets: dict[str, bytes] = field(default_factory=dict)       # relative path -> bytes
    endpoints: dict[str, bytes] = field(default_factory=dict)    # loopback path -> bytes


def obfuscate(sources: list[SourceUnit], recipe: ObfuscationRecipe) -> ObfuscationResult:
    """Apply one obfuscation method; unchanged input plus a warning when
    the method has no applicable sites."""
    method = recipe.method
    if method not in METHODS:
        raise ValueError(f"unknown obfuscation method {method!r}")
    if method == "LKD":
        key = _recipe_key(recipe)
        return make_lkd(sources, key, recipe.seed)
    if method == "CKD":
        key = _recipe_key(recipe)
        endpoint = recipe.params.get("endpoint_path", "/key")
        return make_ckd(sources, key, endpoint, recipe.seed)
    transform = {
        "IM": _apply_im,
        "DCI": _apply_dci,
        "CFF": _apply_cff,
        "NF": _apply_nf,
        "SS": _apply_ss,
        "SAE": _apply_sae,
    }[method]
    out_units: list[SourceUnit] = []
    warnings: list[str] = []
    changed_any = False
    rng = SplitMix64(recipe.seed)
    for unit in sources:
        tree = parse_text(unit.text, unit.path)
        changed = transform(tree, rng, recipe.params)
        changed_any = changed_any or changed
        out_units.append(SourceUnit(unit.path, to_source(tree)))
    if not changed_any:
        warnings.append(f"{method}: no applicable sites, program returned unchanged")
        out_units = list(sources)
    return ObfuscationResult(out_units, recipe, warnings)


def _recipe_key(recipe: ObfuscationRecipe) -> bytes:
    hexkey = recipe.params.get("key_hex")
    if hexkey:
        return bytes.fromhex(hexkey)
    key = SplitMix64(recipe.seed ^ 0xC0DE).keystream(32)
    recipe.params["key_hex"] = key.hex()
    return key


# -- IM: identifier modification ---------------------------------------------


def _apply_im(tree: Node, rng: SplitMix64, params: dict) -> bool:
    seen: set[str] = set()

    def hex_name(_n: int) -> str:
        while True:
            name = "_0x" + format(rng.next_u64() & 0xFFFFF, "05x")
            if name not in seen:
                seen.add(name)
                return name

    renamer = ScopedRenamer(name_fn=hex_name)
    renamer.run(tree)
    return True


# -- DCI: dead code injection -------------------------------------------------


def _junk_block(rng: SplitMix64, counter: int) -> list[Node]:
    # falsy-variable guard: the body (and its expressions) never evaluates
    name = f"_dci{counter}"
    bump = rng.next_below(50) + 3
    text = (
        f"var {name} = false;"
        f"if ({name}) {{ {name} = {name} + {bump};"
        f' console.log("unreachable", {name} * {bump}); }}'
    )
    return parse_text(text).children


def _junk_function(rng: SplitMix64, counter: int) -> list[Node]:
    # never called; carries an opaque x*x<0 predicate for static confusion
    name = f"_dciFn{counter}"
    a = rng.next_below(90) + 2
    b = rng.next_below(11) + 2
    text = (
        f"function {name}(x) {{"
        f" var acc = x * {a};"
        f" if (acc * acc < 0) {{ acc = acc - {b}; }}"
        f" return acc % {b}; }}"
    )
    return parse_text(text).children


def _statement_bodies(tree: Node) -> list[Node]:
    bodies = [tree]
    for node in tree.walk():
        if node.kind in FUNCTION_KINDS:
            bodies.append(node.children[1])
    return bodies


def _apply_dci(tree: Node, rng: SplitMix64, params: dict) -> bool:
    counter = 0
    for body in _statement_bodies(tree):
        insertions = max(1, len(body.children) // 4)
        for _ in range(insertions):
            pos = rng.next_below(len(body.children) + 1)
            junk = _junk_block(rng, counter)
            counter += 1
            body.children[pos:pos] = junk
    for _ in range(2 + rng.next_below(3)):
        pos = rng.next_below(len(tree.children) + 1)
        tree.children[pos:pos] = _junk_function(rng, counter)
        counter += 1
    return counter > 0


# -- CFF: control flow flattening ---------------------------------------------


def _apply_cff(tree: Node, rng: SplitMix64, params: dict) -> bool:
    changed = False
    counter = [0]
    for node in tree.walk():
        if node.kind in FUNCTION_KINDS:
            if _flatten_body(node.children[1], rng, counter):
                changed = True
    return changed


def _flatten_body(body: Node, rng: SplitMix64, counter: list[int]) -> bool:
    decls = [s for s in body.children if s.kind == "FuncDecl"]
    rest = [s for s in body.children if s.kind != "FuncDecl"]
    if len(rest) < 2:
        return False
    n = len(rest)
    states = list(range(n + 1))
    for i in range(n):  # seeded shuffle of the state numbering
        j = i + rng.next_below(n + 1 - i)
        states[i], states[j] = states[j], states[i]
    end_state = states[n]
    var = f"_cff{counter[0]}"
    counter[0] += 1

    cases = []
    for i, stmt in enumerate(rest):
        next_state = states[i + 1] if i + 1 < n else end_state
        case_stmts = [
            stmt,
            _assign_num(var, next_state),
            Node("Break", "", [], stmt.span),
        ]
        cases.append(Node("Case", "", [_num(states[i])] + case_stmts, stmt.span))
    # terminal state leaves through a bare return, so the loop guard can be
    # a constant and never shows up as a logged expression
    cases.append(Node("Case", "", [_num(end_state), Node("Return", "", [], body.span)], body.span))

    switch = Node("Switch", "", [Node("Ident", var, [], body.span)] + cases, body.span)
    guard = Node("Bool", "true", [], body.span)
    loop = Node("While", "", [guard, Node("Block", "", [switch], body.span)], body.span)
    init = parse_text(f"var {var} = {states[0]};").children[0]
    body.children = decls + [init, loop]
    return True


def _num(value: int) -> Node:
    return Node("Num", str(value), [], (0, 0))


def _assign_num(name: str, value: int) -> Node:
    assign = Node("Assign", "=", [Node("Ident", name, [], (0, 0)), _num(value)], (0, 0))
    return Node("ExprStmt", "", [assign], (0, 0))


# -- NF: nested functions -------------------------------------------------------


def _apply_nf(tree: Node, rng: SplitMix64, params: dict) -> bool:
    changed = False
    targets = [n for n in tree.walk() if n.kind in FUNCTION_KINDS]
    for fn in targets:
        depth = 1 + rng.next_below(2)
        for _ in range(depth):
            _wrap_body(fn)
        changed = True
    return changed


def _wrap_body(fn: Node) -> None:
    # (0, fn).call(this) indirection, the classic scope-confusion shape
    body = fn.children[1]
    inner = Node("FuncExpr", "", [Node("Params", "", [], body.span),
                                  Node("Block", "", list(body.children), body.span)], body.span)
    seq = Node("Seq", "", [Node("Num", "0", [], body.span), inner], body.span)
    call_member = Node("Member", "call", [seq], body.span)
    call = Node("Call", "", [call_member, Node("This", "", [], body.span)], body.span)
    ret = Node("Return", "", [call], body.span)
    fn.children[1] = Node("Block", "", [ret], body.span)


# -- SS: string splitting --------------------------------------------------------


def _split_string(value: str, rng: SplitMix64) -> list[str]:
    parts = []
    i = 0
    while i < len(value):
        step = 3 + rng.next_below(2)  # fragments of 3-4 chars
        parts.append(value[i : i + step])
        i += step
    return parts


def _apply_ss(tree: Node, rng: SplitMix64, params: dict) -> bool:
    min_len = int(params.get("min_len", 6))
    changed = False
    for node in tree.walk():
        for i, child in enumerate(node.children):
            if child.kind != "Str" or len(child.token) < min_len:
                continue
            parts = _split_string(child.token, rng)
            if len(parts) < 2:
                continue
            expr = Node("Str", parts[0], [], child.span)
            for part in parts[1:]:
                expr = Node("Binary", "+", [expr, Node("Str", part, [], child.span)], child.span)
            node.children[i] = expr
            changed = True
    return changed


# -- SAE: string array encoding ---------------------------------------------------


_SAE_SHIFT = 7


def _sae_encode(value: str) -> str:
    return "".join(chr(ord(c) + _SAE_SHIFT) for c in reversed(value))


def _apply_sae(tree: Node, rng: SplitMix64, params: dict) -> bool:
    min_len = int(params.get("min_len", 2))
    table: list[str] = []
    index: dict[str, int] = {}
    sites: list[tuple[Node, int, str]] = []
    for node in tree.walk():
        for i, child in enumerate(node.children):
            if child.kind != "Str" or len(child.token) < min_len:
                continue
            sites.append((node, i, child.token))
    if not sites:
        return False
    for _, _, value in sites:
        if value not in index:
            index[value] = len(table)
            table.append(value)
    for node, i, value in sites:
        span = node.children[i].span
        access = Node(
            "Index",
            "",
            [Node("Ident", "_saeP", [], span), _num(index[value])],
            span,
        )
        node.children[i] = access

    # table decoded once at load (inside an IIFE, off the program scope);
    # uses stay cheap index reads
    entries = ",".join(_js_quote(_sae_encode(v)) for v in table)
    prelude = parse_text(
        f"var _saeT = [{entries}];"
        "var _saeP = [];"
        "(function () {"
        " var _saeI = 0;"
        " while (_saeI < _saeT.length) {"
        "  var _saeE = _saeT[_saeI]; var _saeO = \"\"; var _saeJ = _saeE.length - 1;"
        "  while (_saeJ >= 0) { _saeO = _saeO + String.fromCharCode(_saeE.charCodeAt(_saeJ) - "
        f"{_SAE_SHIFT}); _saeJ = _saeJ - 1; }}"
        "  _saeP.push(_saeO); _saeI = _saeI + 1; } })();"
    ).children
    tree.children[0:0] = prelude
    return True


def _js_quote(value: str) -> str:
    out = ['"']
    for ch in value:
        if ch in ('"', "\\"):
            out.append("\\" + ch)
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20 or ord(ch) > 0x7E:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


# -- LKD / CKD: encrypted packages ---------------------------------------------


def encrypt_payload(payload: bytes, key: bytes) -> bytes:
    stream = SplitMix64(fold_key_to_seed(key)).keystream(len(payload))
    return bytes(a ^ b for a, b in zip(payload, stream))


def decrypt_payload(blob: bytes, key: bytes) -> bytes:
    return encrypt_payload(blob, key)  # XOR stream cipher is an involution


# Inline splitmix64 in 32-bit limbs: _h/_l hold the state, each advance
# yields output halves _zh/_zl and key bytes _kb[0..7] (little-endian).
_GAMMA_HI, _GAMMA_LO = SplitMix64.GAMMA >> 32, SplitMix64.GAMMA & 0xFFFFFFFF
_M1_HI, _M1_LO = SplitMix64.M1 >> 32, SplitMix64.M1 & 0xFFFFFFFF
_M2_HI, _M2_LO = SplitMix64.M2 >> 32, SplitMix64.M2 & 0xFFFFFFFF

_SPLITMIX_JS = f"""
var _c0 = _l + {_GAMMA_LO};
var _cy = _c0 >= 4294967296 ? 1 : 0;
_l = _c0 >>> 0;
_h = (_h + {_GAMMA_HI} + _cy) >>> 0;
var _zh = _h; var _zl = _l;
var _th = _zh >>> 30; var _tl = ((_zh << 2) | (_zl >>> 30)) >>> 0;
_zh = (_zh ^ _th) >>> 0; _zl = (_zl ^ _tl) >>> 0;
_mh = {_M1_HI}; _ml = {_M1_LO};
MUL64
_zh = _rh; _zl = _rl;
_th = _zh >>> 27; _tl = ((_zh << 5) | (_zl >>> 27)) >>> 0;
_zh = (_zh ^ _th) >>> 0; _zl = (_zl ^ _tl) >>> 0;
_mh = {_M2_HI}; _ml = {_M2_LO};
MUL64
_zh = _rh; _zl = _rl;
_th = _zh >>> 31; _tl = ((_zh << 1) | (_zl >>> 31)) >>> 0;
_zh = (_zh ^ _th) >>> 0; _zl = (_zl ^ _tl) >>> 0;
_kb[0] = _zl & 255; _kb[1] = (_zl >>> 8) & 255;
_kb[2] = (_zl >>> 16) & 255; _kb[3] = (_zl >>> 24) & 255;
_kb[4] = _zh & 255; _kb[5] = (_zh >>> 8) & 255;
_kb[6] = (_zh >>> 16) & 255; _kb[7] = (_zh >>> 24) & 255;
"""

_MUL64_JS = """
var _a0 = _zl & 65535; var _a1 = _zl >>> 16;
var _a2 = _zh & 65535; var _a3 = _zh >>> 16;
var _b0 = _ml & 65535; var _b1 = _ml >>> 16;
var _b2 = _mh & 65535; var _b3 = _mh >>> 16;
var _p0 = _a0 * _b0;
var _p1 = _a1 * _b0 + _a0 * _b1 + Math.floor(_p0 / 65536);
var _p2 = _a2 * _b0 + _a1 * _b1 + _a0 * _b2 + Math.floor(_p1 / 65536);
var _p3 = _a3 * _b0 + _a2 * _b1 + _a1 * _b2 + _a0 * _b3 + Math.floor(_p2 / 65536);
var _rl = ((_p0 & 65535) | ((_p1 & 65535) << 16)) >>> 0;
var _rh = ((_p2 & 65535) | ((_p3 & 65535) << 16)) >>> 0;
"""


def _loader_source(blob_hex: str, key_expr: str) -> str:
    mix = _SPLITMIX_JS.replace("MUL64", _MUL64_JS).strip()
    # first occurrences declare the shared temporaries
    mix = mix.replace("_mh =", "var _mh =", 1).replace("_ml =", "var _ml =", 1)
    return f"""
var _bx = "{blob_hex}";
var _kx = {key_expr};
var _s0 = 0; var _s1 = 0; var _s2 = 0; var _s3 = 0;
var _ki = 0;
while (_ki < 32) {{
  var _kc = _kx.charCodeAt(_ki);
  var _wi = Math.floor(_ki / 8);
  var _bi = _ki % 8;
  if (_bi < 4) {{
    var _lowadd = _kc * Math.pow(2, 8 * _bi);
    if (_wi === 0) {{ _s0 = (_s0 + _lowadd) % 4294967296; }}
    if (_wi === 1) {{ _s1 = (_s1 + _lowadd) % 4294967296; }}
    if (_wi === 2) {{ _s2 = (_s2 + _lowadd) % 4294967296; }}
    if (_wi === 3) {{ _s3 = (_s3 + _lowadd) % 4294967296; }}
  }}
  _ki = _ki + 1;
}}
var _hwords = [0, 0, 0, 0];
_ki = 0;
while (_ki < 32) {{
  var _kc2 = _kx.charCodeAt(_ki);
  var _wi2 = Math.floor(_ki / 8);
  var _bi2 = _ki % 8;
  if (_bi2 >= 4) {{
    _hwords[_wi2] = (_hwords[_wi2] + _kc2 * Math.pow(2, 8 * (_bi2 - 4))) % 4294967296;
  }}
  _ki = _ki + 1;
}}
var _l = (((_s0 ^ _s1) >>> 0) ^ ((_s2 ^ _s3) >>> 0)) >>> 0;
var _h = (((_hwords[0] ^ _hwords[1]) >>> 0) ^ ((_hwords[2] ^ _hwords[3]) >>> 0)) >>> 0;
var _n = _bx.length / 2;
var _out = [];
var _kb = [0, 0, 0, 0, 0, 0, 0, 0];
var _i = 0;
while (_i < _n) {{
  if (_i % 8 === 0) {{
{mix}
  }}
  var _hc1 = _bx.charCodeAt(_i * 2);
  var _hc2 = _bx.charCodeAt(_i * 2 + 1);
  var _d1 = _hc1 < 58 ? _hc1 - 48 : _hc1 - 87;
  var _d2 = _hc2 < 58 ? _hc2 - 48 : _hc2 - 87;
  var _byte = (_d1 * 16 + _d2) ^ _kb[_i % 8];
  _out.push(String.fromCharCode(_byte));
  _i = _i + 1;
}}
var _code = _out.join("");
eval(_code);
"""


def _bundle_payload(sources: list[SourceUnit]) -> bytes:
    payload = "\n".join(unit.text for unit in sources)
    raw = payload.encode("utf-8")
    if len(raw) != len(payload):
        raise ValueError("encrypted payloads must be ASCII source")
    return raw


def make_lkd(sources: list[SourceUnit], key: bytes, seed: int) -> ObfuscationResult:
    """Encrypted package whose loader reads the key from a local asset."""
    if len(key) != 32:
        raise ValueError("key must be exactly 32 bytes")
    payload = _bundle_payload(sources)
    blob = encrypt_payload(payload, key)
    loader = _loader_source(blob.hex(), 'readAsset("key.bin")')
    recipe = ObfuscationRecipe("LKD", seed, {"key_hex": key.hex(), "key_asset": "key.bin"})
    return ObfuscationResult(
        [SourceUnit("loader.js", loader)],
        recipe,
        assets={"key.bin": key},
    )


def make_ckd(
    sources: list[SourceUnit], key: bytes, endpoint_path: str, seed: int
) -> ObfuscationResult:
    """Encrypted package whose loader fetches the key from the registered
    loopback endpoint."""
    if len(key) != 32:
        raise ValueError("key must be exactly 32 bytes")
    if not endpoint_path.startswith("/"):
        endpoint_path = "/" + endpoint_path
    payload = _bundle_payload(sources)
    blob = encrypt_payload(payload, key)
    loader = _loader_source(blob.hex(), f'fetchText("{endpoint_path}")')
    recipe = ObfuscationRecipe(
        "CKD", seed, {"key_hex": key.hex(), "endpoint_path": endpoint_path}
    )
    return ObfuscationResult(
        [SourceUnit("loader.js", loader)],
        recipe,
        endpoints={endpoint_path: key},
    )


# -- bench layout ---------------------------------------------------------------


def write_variant(result: ObfuscationResult, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for unit in result.sources:
        target = out_dir / unit.path
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(unit.text, encoding="utf-8")
    for rel, data in result.assets.items():
        target = out_dir / "assets" / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(data)
    if result.endpoints:
        (out_dir / "endpoints.json").write_text(
            json.dumps({path: body.hex() for path, body in sorted(result.endpoints.items())},
                       indent=2, sort_keys=True),
            encoding="utf-8",
        )
    (out_dir / "recipe.json").write_text(
        json.dumps(result.recipe.to_dict(), indent=2, sort_keys=True), encoding="utf-8"
    )
    if result.warnings:
        (out_dir / "warnings.txt").write_text("\n".join(result.warnings) + "\n", encoding="utf-8")


def generate_bench(fixtures_dir: Path, out_dir: Path, seed: int = 7, methods=METHODS) -> list[Path]:
    """bench/<fixture>/<method>/ variants for every fixture file."""
    written: list[Path] = []
    fixtures = sorted(p for p in fixtures_dir.glob("*.js"))
    for fixture in fixtures:
        unit = SourceUnit("main.js", fixture.read_text(encoding="utf-8"))
        original_dir = out_dir / fixture.stem / "original"
        original_dir.mkdir(parents=True, exist_ok=True)
        (original_dir / "main.js").write_text(unit.text, encoding="utf-8")
        for method in methods:
            params = {}
            if method == "CKD":
                params["endpoint_path"] = f"/key/{fixture.stem}"
            recipe = ObfuscationRecipe(method, seed, params)
            result = obfuscate([unit], recipe)
            variant_dir = out_dir / fixture.stem / method
            write_variant(result, variant_dir)
            written.append(variant_dir)
    return written
