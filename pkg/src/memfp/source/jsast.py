"""Syntax tree node model.

A single generic node type keeps hashing, serialization, preorder walks,
instrumentation, and interpretation uniform.  Child layout is positional,
fixed per kind:

    Program     [stmt...]
    VarDecl     [Declarator...]
    Declarator  [Ident] | [Ident, init]
    FuncDecl    [Params, Block]            token = declared name
    FuncExpr    [Params, Block]            token = optional name or ""
    Params      [Ident...]
    Block       [stmt...]
    ExprStmt    [expr]
    If          [test, cons] | [test, cons, alt]
    While       [test, body]
    DoWhile     [body, test]
    For         [init, test, update, body]  (missing parts are Empty)
    ForIn       [target, obj, body]         target is VarDecl or Ident/Member/Index
    Return      [] | [expr]
    Break / Continue / Empty  []
    Switch      [disc, Case|Default...]
    Case        [test, stmt...]
    Default     [stmt...]
    Throw       [expr]
    Try         [Block, Catch?, Finally?]
    Catch       [Ident, Block]
    Finally     [Block]

    Num/Str/Bool/Null/Ident/This   []       token = literal text / name
    Array       [expr...]
    Object      [Prop...]
    Prop        [value]                      token = key
    Binary      [left, right]                token = operator
    Logical     [left, right]                token = "&&" | "||"
    Unary       [operand]                    token = operator
    Update      [operand]                    token = "++_pre" etc.
    Assign      [target, value]              token = operator
    Cond        [test, cons, alt]
    Call        [callee, arg...]
    New         [callee, arg...]
    Member      [obj]                        token = property name
    Index       [obj, key]
    Seq         [expr...]
"""

from __future__ import annotations

from typing import Iterator, Optional

STATEMENT_KINDS = frozenset(
    {
        "Program", "VarDecl", "FuncDecl", "Block", "ExprStmt", "If", "While",
        "DoWhile", "For", "ForIn", "Return", "Break", "Continue", "Empty",
        "Switch", "Throw", "Try",
    }
)

FUNCTION_KINDS = frozenset({"FuncDecl", "FuncExpr"})

ARITH_COMPARE_OPS = frozenset(
    {
        "+", "-", "*", "/", "%",
        "<", "<=", ">", ">=", "==", "!=", "===", "!==",
        "&", "|", "^", "<<", ">>", ">>>", "instanceof", "in",
    }
)


class Node:
    """One syntax node: a kind tag, a token payload, and ordered children."""

    __slots__ = ("kind", "token", "children", "span", "meta")

    def __init__(
        self,
        kind: str,
        token: str = "",
        children: Optional[list["Node"]] = None,
        span: tuple[int, int] = (0, 0),
    ):
        self.kind = kind
        self.token = token
        self.children: list[Node] = children if children is not None else []
        self.span = span
        self.meta: dict = {}

    def __repr__(self) -> str:  # pragma: no cover - debug aid
        t = f" {self.token!r}" if self.token else ""
        return f"<{self.kind}{t} n={len(self.children)}>"

    def clone(self) -> "Node":
        """Deep copy; meta is shallow-copied per node."""
        n = Node(self.kind, self.token, [c.clone() for c in self.children], self.span)
        n.meta = dict(self.meta)
        return n

    def walk(self) -> Iterator["Node"]:
        """Preorder traversal including self."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def walk_with_parents(self) -> Iterator[tuple["Node", Optional["Node"], int]]:
        """Preorder (node, parent, child_index) triples."""
        stack: list[tuple[Node, Optional[Node], int]] = [(self, None, 0)]
        while stack:
            node, parent, idx = stack.pop()
            yield node, parent, idx
            for i in reversed(range(len(node.children))):
                stack.append((node.children[i], node, i))


def is_literal(node: Node) -> bool:
    return node.kind in ("Num", "Str", "Bool", "Null")


def ident(name: str, span: tuple[int, int] = (0, 0)) -> Node:
    return Node("Ident", name, [], span)
