"""Enumeration of invariant-generating candidate expressions.

Three syntactic classes are candidates: binary arithmetic/comparison
expressions, call expressions whose callee resolves to a user-defined
function, and assignment right-hand sides.  Constant right-hand sides
(bare literals) and function-expression right-hand sides carry no runtime
variation and are skipped; so are calls into host-native APIs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .jsast import Node, is_literal
from .normalize import NormalizedTree

_PLACEHOLDER_RE = re.compile(r"^v\d+$")


@dataclass(frozen=True)
class CandidateExpression:
    node: Node
    kind: str  # BinaryExpression | CallReturn | AssignmentRHS
    location: str

    def __repr__(self) -> str:  # pragma: no cover - debug aid
        return f"<{self.kind} @{self.location}>"


def _leftmost_base(node: Node) -> Node:
    cur = node
    while cur.kind in ("Member", "Index", "Call", "New"):
        cur = cur.children[0]
    return cur


def is_user_defined_callee(callee: Node) -> bool:
    base = _leftmost_base(callee)
    if base.kind == "Ident":
        return "orig" in base.meta or bool(_PLACEHOLDER_RE.match(base.token))
    return base.kind in ("FuncExpr", "This")


def _rhs_slot(node: Node) -> Node | None:
    """The probed right-hand side of an Assign or initialized Declarator."""
    if node.kind == "Assign":
        return node.children[1]
    if node.kind == "Declarator" and len(node.children) == 2:
        return node.children[1]
    return None


def classify(node: Node) -> str | None:
    if node.kind == "Binary":
        return "BinaryExpression"
    if node.kind in ("Call", "New") and is_user_defined_callee(node.children[0]):
        return "CallReturn"
    rhs = _rhs_slot(node)
    if rhs is not None and not is_literal(rhs) and rhs.kind != "FuncExpr":
        return "AssignmentRHS"
    return None


def enumerate_candidates(tree: NormalizedTree) -> list[CandidateExpression]:
    """All candidates in source order, deduplicated by location id."""
    out: list[CandidateExpression] = []
    seen: set[str] = set()
    for node in tree.walk():
        kind = classify(node)
        if kind is None:
            continue
        loc = tree.location_id(node)
        if loc in seen:
            continue
        seen.add(loc)
        out.append(CandidateExpression(node, kind, loc))
    return out
