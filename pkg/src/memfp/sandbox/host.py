"""Virtual host: console, seeded RNG, virtual clock and timers, asset and
loopback-key channels, and the mock key server the bench registers."""

from __future__ import annotations

import heapq
import http.server
import math
import threading
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..errors import SandboxDenied
from ..util import SplitMix64
from .interp import Interpreter, JSThrow, to_number, to_string
from .values import UNDEFINED, JSArray, JSFunction, JSObject, canonicalize_value


@dataclass
class SandboxManifest:
    """Declares what the sandboxed program may touch."""

    asset_root: Optional[Path] = None
    endpoints: dict[str, bytes] = field(default_factory=dict)
    loopback_port: Optional[int] = None  # live HTTP mode for integration tests


class MockKeyServer:
    """Single-threaded loopback responder: GET registered path -> raw bytes,
    anything else -> 404.  Usable in-process (registry) or over real HTTP."""

    def __init__(self):
        self.registry: dict[str, bytes] = {}
        self._httpd: Optional[http.server.HTTPServer] = None
        self._thread: Optional[threading.Thread] = None

    def register(self, path: str, body: bytes) -> None:
        if not path.startswith("/"):
            path = "/" + path
        self.registry[path] = body

    @property
    def port(self) -> Optional[int]:
        return self._httpd.server_address[1] if self._httpd else None

    def start(self) -> int:
        registry = self.registry

        class Handler(http.server.BaseHTTPRequestHandler):
            def do_GET(self):  # noqa: N802 - http.server API
                body = registry.get(self.path)
                if body is None:
                    self.send_response(404)
                    self.end_headers()
                    return
                self.send_response(200)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, *args):  # silence
                pass

        self._httpd = http.server.HTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self._httpd.server_address[1]

    def stop(self) -> None:
        if self._httpd is not None:
            self._httpd.shutdown()
            self._httpd.server_close()
            self._httpd = None


class HostState:
    """Mutable per-execution host state behind the shims."""

    def __init__(self, rng_seed: int, manifest: SandboxManifest):
        self.rng = SplitMix64(rng_seed)
        self.manifest = manifest
        self.clock_ms = 0.0
        self.timer_seq = 0
        self.timers: list[tuple[float, int, JSFunction, Optional[float]]] = []
        self.cancelled: set[int] = set()
        self.tick_handlers: list[JSFunction] = []
        self.tap_handlers: list[JSFunction] = []
        self.console: list[str] = []
        self.committed = None
        self.denials: list[str] = []
        self.captured_names: set[str] = set()

    def schedule(self, fn: JSFunction, delay_ms: float, interval: Optional[float]) -> int:
        self.timer_seq += 1
        heapq.heappush(self.timers, (self.clock_ms + max(0.0, delay_ms), self.timer_seq, fn, interval))
        return self.timer_seq

    def due_timers(self) -> list[tuple[float, int, JSFunction, Optional[float]]]:
        out = []
        while self.timers and self.timers[0][0] <= self.clock_ms:
            entry = heapq.heappop(self.timers)
            if entry[1] not in self.cancelled:
                out.append(entry)
        return out


def _display(value) -> str:
    if isinstance(value, (JSObject, JSArray)) and not isinstance(value, JSFunction):
        return canonicalize_value(value)[0]
    return to_string(value)


def _native(name, fn) -> JSFunction:
    return JSFunction(name=name, native=fn)


def _deny(interp: Interpreter, state: HostState, message: str):
    state.denials.append(message)
    err = JSObject(class_name="Error")
    err.props["name"] = "SandboxDenied"
    err.props["message"] = message
    raise JSThrow(err)


def install_globals(interp: Interpreter, state: HostState, log_invariant) -> None:
    """Populate the global environment with the virtual host surface."""
    g = interp.global_env.vars

    g["undefined"] = UNDEFINED
    g["NaN"] = math.nan
    g["Infinity"] = math.inf
    g["globalThis"] = interp.global_this

    console = JSObject()
    console.props["log"] = _native(
        "log", lambda i, t, a: state.console.append(" ".join(_display(x) for x in a)) or UNDEFINED
    )
    g["console"] = console

    mathobj = JSObject()
    mathobj.props.update(
        {
            "PI": math.pi,
            "E": math.e,
            "floor": _native("floor", lambda i, t, a: float(math.floor(to_number(a[0])))),
            "ceil": _native("ceil", lambda i, t, a: float(math.ceil(to_number(a[0])))),
            "round": _native("round", lambda i, t, a: float(math.floor(to_number(a[0]) + 0.5))),
            "abs": _native("abs", lambda i, t, a: abs(to_number(a[0]))),
            "sqrt": _native("sqrt", lambda i, t, a: math.sqrt(to_number(a[0])) if to_number(a[0]) >= 0 else math.nan),
            "pow": _native("pow", lambda i, t, a: _safe_pow(to_number(a[0]), to_number(a[1]))),
            "min": _native("min", lambda i, t, a: min((to_number(x) for x in a), default=math.inf)),
            "max": _native("max", lambda i, t, a: max((to_number(x) for x in a), default=-math.inf)),
            "sin": _native("sin", lambda i, t, a: math.sin(to_number(a[0]))),
            "cos": _native("cos", lambda i, t, a: math.cos(to_number(a[0]))),
            "atan2": _native("atan2", lambda i, t, a: math.atan2(to_number(a[0]), to_number(a[1]))),
            "random": _native("random", lambda i, t, a: state.rng.next_float()),
        }
    )
    g["Math"] = mathobj

    date = JSObject()
    date.props["now"] = _native("now", lambda i, t, a: state.clock_ms)
    g["Date"] = date

    g["parseInt"] = _native("parseInt", lambda i, t, a: _parse_int(a))
    g["parseFloat"] = _native("parseFloat", lambda i, t, a: _parse_float(a))
    g["isNaN"] = _native("isNaN", lambda i, t, a: math.isnan(to_number(a[0] if a else UNDEFINED)))
    g["isFinite"] = _native("isFinite", lambda i, t, a: math.isfinite(to_number(a[0] if a else UNDEFINED)))

    string_fn = _native("String", lambda i, t, a: to_string(a[0]) if a else "")
    string_fn.props["fromCharCode"] = _native(
        "fromCharCode", lambda i, t, a: "".join(chr(int(to_number(x)) & 0xFFFF) for x in a)
    )
    g["String"] = string_fn
    g["Number"] = _native("Number", lambda i, t, a: to_number(a[0]) if a else 0.0)
    g["Boolean"] = _native("Boolean", lambda i, t, a: bool(a and _truthy_arg(a[0])))

    object_fn = _native("Object", lambda i, t, a: a[0] if a and isinstance(a[0], JSObject) else JSObject())
    object_fn.props["keys"] = _native("keys", lambda i, t, a: _object_keys(a))
    g["Object"] = object_fn

    array_fn = _native("Array", lambda i, t, a: _make_array(a))
    array_fn.props["isArray"] = _native("isArray", lambda i, t, a: isinstance(a[0], JSArray) if a else False)
    g["Array"] = array_fn

    def _error_ctor(i, t, a):
        err = JSObject(class_name="Error")
        err.props["name"] = "Error"
        err.props["message"] = to_string(a[0]) if a else ""
        return err

    g["Error"] = _native("Error", _error_ctor)
    g["TypeError"] = _native("TypeError", _error_ctor)

    g["registerTick"] = _native(
        "registerTick", lambda i, t, a: state.tick_handlers.append(a[0]) or UNDEFINED
    )
    g["registerTap"] = _native(
        "registerTap", lambda i, t, a: state.tap_handlers.append(a[0]) or UNDEFINED
    )

    def _commit(i, t, a):
        state.committed = a[0] if a else None
        return UNDEFINED

    g["commitState"] = _native("commitState", _commit)

    g["setTimeout"] = _native(
        "setTimeout", lambda i, t, a: float(state.schedule(a[0], to_number(a[1]) if len(a) > 1 else 0.0, None))
    )
    g["setInterval"] = _native(
        "setInterval",
        lambda i, t, a: float(state.schedule(a[0], to_number(a[1]) if len(a) > 1 else 0.0,
                                             max(1.0, to_number(a[1]) if len(a) > 1 else 0.0))),
    )
    g["clearTimeout"] = _native(
        "clearTimeout", lambda i, t, a: state.cancelled.add(int(to_number(a[0]))) or UNDEFINED
    )
    g["clearInterval"] = g["clearTimeout"]

    def _read_asset(i, t, a):
        rel = to_string(a[0]) if a else ""
        root = state.manifest.asset_root
        if root is None:
            _deny(i, state, f"file_read denied: no asset root configured ({rel})")
        target = (root / rel).resolve()
        if root.resolve() not in target.parents and target != root.resolve():
            _deny(i, state, f"file_read denied outside asset root: {rel}")
        if not target.is_file():
            i.throw_error("Error", f"asset not found: {rel}")
        return target.read_bytes().decode("latin-1")

    g["readAsset"] = _native("readAsset", _read_asset)

    def _fetch_text(i, t, a):
        path = to_string(a[0]) if a else ""
        if not path.startswith("/"):
            _deny(i, state, f"net_fetch denied non-loopback origin: {path}")
        if state.manifest.loopback_port is not None:
            url = f"http://127.0.0.1:{state.manifest.loopback_port}{path}"
            try:
                with urllib.request.urlopen(url, timeout=5) as resp:
                    return resp.read().decode("latin-1")
            except urllib.error.HTTPError as exc:
                i.throw_error("Error", f"{exc.code} for {path}")
            except OSError:
                _deny(i, state, f"net_fetch denied: loopback server unreachable ({path})")
        if not state.manifest.endpoints:
            _deny(i, state, f"net_fetch denied: no endpoint registered ({path})")
        body = state.manifest.endpoints.get(path)
        if body is None:
            i.throw_error("Error", f"404 for {path}")
        return body.decode("latin-1")

    g["fetchText"] = _native("fetchText", _fetch_text)

    json_obj = JSObject()
    json_obj.props["stringify"] = _native("stringify", lambda i, t, a: _json_stringify(a[0]) if a else UNDEFINED)
    g["JSON"] = json_obj

    g["__log_invariant__"] = _native("__log_invariant__", log_invariant)

    def _indirect_eval(i, t, a):
        if not a or not isinstance(a[0], str):
            return a[0] if a else UNDEFINED
        code = a[0]
        i.eval_texts.append(code)
        if i.eval_hook is None:
            i.throw_error("Error", "eval is not enabled in this sandbox")
        return i.run_eval(i.eval_hook(code), i.global_env, i.global_this)

    g["eval"] = _native("eval", _indirect_eval)


def _safe_pow(base: float, exp: float) -> float:
    try:
        result = base ** exp
        if isinstance(result, complex):
            return math.nan
        return float(result)
    except (OverflowError, ValueError, ZeroDivisionError):
        if base == 0 and exp < 0:
            return math.inf
        return math.nan


def _truthy_arg(v) -> bool:
    from .interp import truthy

    return truthy(v)


def _parse_int(args) -> float:
    if not args:
        return math.nan
    text = to_string(args[0]).strip()
    radix = int(to_number(args[1])) if len(args) > 1 and args[1] is not UNDEFINED else 10
    sign = 1
    if text[:1] in "+-":
        sign = -1 if text[0] == "-" else 1
        text = text[1:]
    if radix == 16 and text[:2].lower() == "0x":
        text = text[2:]
    elif radix == 10 and text[:2].lower() == "0x":
        radix = 16
        text = text[2:]
    digits = "0123456789abcdefghijklmnopqrstuvwxyz"[:radix]
    out = 0
    seen = False
    for ch in text.lower():
        pos = digits.find(ch)
        if pos < 0:
            break
        out = out * radix + pos
        seen = True
    return float(sign * out) if seen else math.nan


def _parse_float(args) -> float:
    if not args:
        return math.nan
    text = to_string(args[0]).strip()
    best = math.nan
    for end in range(len(text), 0, -1):
        try:
            best = float(text[:end])
            break
        except ValueError:
            continue
    return best


def _object_keys(args) -> JSArray:
    if not args or not isinstance(args[0], JSObject):
        return JSArray([])
    obj = args[0]
    if isinstance(obj, JSArray):
        return JSArray([str(i) for i in range(len(obj.elements))] + list(obj.props))
    return JSArray(list(obj.props))


def _make_array(args) -> JSArray:
    if len(args) == 1 and isinstance(args[0], (int, float)) and not isinstance(args[0], bool):
        return JSArray([UNDEFINED] * int(args[0]))
    return JSArray(list(args))


def _json_stringify(value) -> str:
    if isinstance(value, JSArray):
        return "[" + ",".join(_json_stringify(e) for e in value.elements) + "]"
    if isinstance(value, JSFunction):
        return "null"
    if isinstance(value, JSObject):
        parts = [f'"{k}":{_json_stringify(v)}' for k, v in value.props.items()
                 if not isinstance(v, JSFunction)]
        return "{" + ",".join(parts) + "}"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        from .values import canon_num

        return canon_num(float(value)) if math.isfinite(value) else "null"
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'
    return "null"
