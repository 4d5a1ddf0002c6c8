"""Tree normalization, deterministic location identifiers, serialization.

Normalization erases the features identifier-renaming obfuscation can
touch: declared identifiers become positional placeholders ``v1, v2, …``
(document order, one counter per compilation unit, so no placeholder ever
shadows another), number literals are canonicalized, single-statement
bodies are wrapped in blocks, and statically dead code (constant ``if``
conditions, statements after unconditional control flow) is removed.
Free identifiers (host globals) keep their names so host-API semantics
survive.  Original names ride along as node metadata for hot-object
naming and recovery accounting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from ..errors import JsSyntaxError
from ..util import fnv1a64_str, hex16
from .jsast import FUNCTION_KINDS, Node, is_literal
from .parser import parse_text


@dataclass
class SourceUnit:
    """One on-disk source file."""

    path: str
    text: str

    @property
    def byte_len(self) -> int:
        return len(self.text.encode("utf-8"))


_SCOPE_KINDS = FUNCTION_KINDS | {"Program"}


class _Scope:
    __slots__ = ("parent", "bindings")

    def __init__(self, parent: Optional["_Scope"]):
        self.parent = parent
        self.bindings: dict[str, str] = {}

    def resolve(self, name: str) -> Optional[str]:
        scope: Optional[_Scope] = self
        while scope is not None:
            if name in scope.bindings:
                return scope.bindings[name]
            scope = scope.parent
        return None


class ScopedRenamer:
    """Renames declared identifiers in document order; free (host) names
    are left alone.  The default name factory produces the normalization
    placeholders ``v1, v2, …``; obfuscation transforms inject their own."""

    def __init__(self, name_fn=None):
        self.counter = 0
        self.name_fn = name_fn or (lambda n: f"v{n}")
        self.free_names: set[str] = set()

    def _fresh(self) -> str:
        self.counter += 1
        return self.name_fn(self.counter)

    def run(self, program: Node) -> set[str]:
        self._scope_body(program, _Scope(None))
        return self.free_names

    # Declarations hoist to function scope: collect before renaming uses.
    def _collect(self, node: Node, names: list[str]) -> None:
        if node.kind == "VarDecl":
            for decl in node.children:
                names.append(decl.children[0].token)
        elif node.kind == "FuncDecl":
            names.append(node.token)
            return  # do not descend into nested scopes
        elif node.kind in FUNCTION_KINDS:
            return
        for child in node.children:
            self._collect(child, names)

    def _scope_body(self, scope_node: Node, scope: _Scope) -> None:
        names: list[str] = []
        body: list[Node]
        if scope_node.kind == "Program":
            body = scope_node.children
        else:
            for p in scope_node.children[0].children:
                names.append(p.token)
            body = [scope_node.children[1]]
        for stmt in body:
            self._collect(stmt, names)
        for name in names:
            if name not in scope.bindings:
                scope.bindings[name] = self._fresh()
        if scope_node.kind != "Program":
            for p in scope_node.children[0].children:
                p.meta["orig"] = p.token
                p.token = scope.bindings[p.token]
        for stmt in body:
            self._rename(stmt, scope)

    def _rename(self, node: Node, scope: _Scope) -> None:
        kind = node.kind
        if kind == "Ident":
            new = scope.resolve(node.token)
            if new is None:
                self.free_names.add(node.token)
            else:
                node.meta["orig"] = node.token
                node.token = new
            return
        if kind == "FuncDecl":
            node.meta["orig_name"] = node.token
            bound = scope.resolve(node.token)
            if bound is not None:
                node.token = bound
            self._scope_body(node, _Scope(scope))
            return
        if kind == "FuncExpr":
            inner = _Scope(scope)
            if node.token:
                node.meta.setdefault("orig_name", node.token)
                inner.bindings[node.token] = self._fresh()
                node.token = inner.bindings[node.meta["orig_name"]]
            self._scope_body(node, inner)
            return
        if kind == "Catch":
            inner = _Scope(scope)
            param = node.children[0]
            inner.bindings[param.token] = self._fresh()
            param.meta["orig"] = param.token
            node.meta["orig_name"] = param.token
            param.token = inner.bindings[node.meta["orig_name"]]
            node.token = param.token
            self._rename(node.children[1], inner)
            return
        # Member property names and object keys are not lexical identifiers.
        for child in node.children:
            self._rename(child, scope)


_TERMINAL_KINDS = frozenset({"Return", "Throw", "Break", "Continue"})


def _literal_truth(node: Node) -> Optional[bool]:
    if node.kind == "Bool":
        return node.token == "true"
    if node.kind == "Null":
        return False
    if node.kind == "Num":
        try:
            return float(canon_number(node.token)) != 0.0
        except ValueError:
            return None
    if node.kind == "Str":
        return node.token != ""
    return None


def _strip_dead(node: Node) -> Node:
    """Constant-condition branch elimination and post-terminal pruning."""
    node.children = [_strip_dead(c) for c in node.children]
    if node.kind == "If":
        truth = _literal_truth(node.children[0])
        if truth is True:
            return node.children[1]
        if truth is False:
            if len(node.children) == 3:
                return node.children[2]
            return Node("Empty", "", [], node.span)
    if node.kind in ("Program", "Block"):
        node.children = _prune_statements(node.children)
    elif node.kind in ("Case", "Default"):
        offset = 1 if node.kind == "Case" else 0
        node.children = node.children[:offset] + _prune_statements(node.children[offset:])
    return node


def _prune_statements(stmts: list[Node]) -> list[Node]:
    out: list[Node] = []
    terminated = False
    for stmt in stmts:
        if stmt.kind == "Empty":
            continue
        if not terminated:
            out.append(stmt)
            if stmt.kind in _TERMINAL_KINDS:
                terminated = True
        elif stmt.kind == "FuncDecl":
            out.append(stmt)  # still hoisted and callable
        elif stmt.kind == "VarDecl":
            for decl in stmt.children:
                decl.children = decl.children[:1]  # keep hoisted name, drop init
            out.append(stmt)
    return out


_BODY_SLOTS = {
    "If": (1, 2), "While": (1,), "DoWhile": (0,), "For": (3,), "ForIn": (2,),
}


def _wrap_bodies(node: Node) -> None:
    slots = _BODY_SLOTS.get(node.kind, ())
    for i in slots:
        if i < len(node.children) and node.children[i].kind != "Block":
            child = node.children[i]
            node.children[i] = Node("Block", "", [child], child.span)
    for child in node.children:
        _wrap_bodies(child)


def canon_number(token: str) -> str:
    """Canonical text for a numeric literal: shortest round-trip form."""
    if token.startswith(("0x", "0X")):
        value = float(int(token, 16))
    else:
        value = float(token)
    if value.is_integer() and abs(value) < 2**53:
        return str(int(value))
    return repr(value)


def _canon_literals(node: Node) -> None:
    for n in node.walk():
        if n.kind == "Num":
            n.token = canon_number(n.token)
        elif n.kind == "Prop" and n.token and n.token[0].isdigit():
            try:
                n.token = canon_number(n.token)
            except ValueError:
                pass


class NormalizedTree:
    """Normalized syntax tree with deterministic per-node location ids."""

    def __init__(self, root: Node, path: str):
        self.root = root
        self.path = path
        self.free_names: set[str] = set()
        self._parents: dict[int, tuple[Optional[Node], int]] = {}
        self._loc_ids: dict[int, str] = {}
        self._by_loc: dict[str, Node] = {}
        self._index()

    def _index(self) -> None:
        self._parents.clear()
        self._loc_ids.clear()
        self._by_loc.clear()
        sigs: dict[int, str] = {}

        def subtree_sig(node: Node) -> str:
            key = id(node)
            cached = sigs.get(key)
            if cached is None:
                parts = [node.kind + "\x1f" + node.token]
                parts.extend(subtree_sig(c) for c in node.children)
                cached = "\x1e".join(parts)
                sigs[key] = cached
            return cached

        for node, parent, idx in self.root.walk_with_parents():
            self._parents[id(node)] = (parent, idx)

        for node in self.root.walk():
            path_parts: list[str] = []
            cur = node
            while True:
                parent, idx = self._parents[id(cur)]
                if parent is None:
                    break
                path_parts.append(f"{parent.kind}:{idx}")
                cur = parent
            digest = fnv1a64_str(subtree_sig(node) + "||" + "/".join(path_parts))
            loc = hex16(digest)
            self._loc_ids[id(node)] = loc
            if node.kind in ("Binary", "Logical", "Call", "New", "Assign", "Declarator"):
                prior = self._by_loc.get(loc)
                if prior is None:
                    self._by_loc[loc] = node

    def location_id(self, node: Node) -> str:
        """16-hex id; stable under reparsing and consistent renaming."""
        loc = self._loc_ids.get(id(node))
        if loc is None:
            raise JsSyntaxError("node does not belong to this tree", self.path)
        return loc

    def node_at(self, loc: str) -> Optional[Node]:
        return self._by_loc.get(loc)

    def parent_of(self, node: Node) -> Optional[Node]:
        entry = self._parents.get(id(node))
        return entry[0] if entry else None

    def origin_span(self, node: Node) -> tuple[str, int, int]:
        return (self.path, node.span[0], node.span[1])

    def enclosing_scope(self, node: Node) -> Node:
        """Nearest enclosing function node, or the program root."""
        cur: Optional[Node] = self.parent_of(node)
        while cur is not None:
            if cur.kind in _SCOPE_KINDS:
                return cur
            cur = self.parent_of(cur)
        return self.root

    def walk(self) -> Iterator[Node]:
        return self.root.walk()


def normalize_parsed(root: Node, path: str) -> NormalizedTree:
    root = _strip_dead(root)
    if root.kind != "Program":
        root = Node("Program", "", [root], root.span)
    _wrap_bodies(root)
    _canon_literals(root)
    renamer = ScopedRenamer()
    free = renamer.run(root)
    tree = NormalizedTree(root, path)
    tree.free_names = free
    return tree


def parse(unit: SourceUnit) -> NormalizedTree:
    """Parse and normalize one source unit.

    Raises JsSyntaxError for unparseable text and UnsupportedConstruct for
    syntax outside the supported subset.
    """
    root = parse_text(unit.text, unit.path)
    return normalize_parsed(root, unit.path)
