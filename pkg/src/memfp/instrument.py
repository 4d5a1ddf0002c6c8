"""Probe injection: wrap candidate expressions with the invariant logger
and place hot-object probes at seeded before/after positions.

An expression probe rewrites ``a + b`` into
``__log_invariant__('<l>', a + b)`` so the expression is evaluated exactly
once and its value flows through unchanged.  A ``before`` object probe
cannot see the not-yet-computed value, so it logs a canonical snapshot of
the hot object itself via a comma expression:
``(__log_invariant__('<l>', obj), obj.tick())``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import RewriteConflict, UnsupportedConstruct
from .source import CandidateExpression, Node, NormalizedTree, SourceUnit, to_source
from .util import SplitMix64

LOGGER_NAME = "__log_invariant__"

KIND_SNAPSHOT = "HotSnapshot"
KIND_SITE_VALUE = "HotSiteValue"


@dataclass(frozen=True)
class ProbeEntry:
    l: str
    file: str
    start: int
    end: int
    kind: str

    def to_dict(self) -> dict:
        return {"l": self.l, "file": self.file, "start": self.start, "end": self.end, "kind": self.kind}


@dataclass
class ObjectProbe:
    hot_name: str        # placeholder name of the hot object in its tree
    scope_loc: str       # location id of the hot object's scope node
    position: str        # "before" | "after"


@dataclass
class ProbePlan:
    expression_probes: list[CandidateExpression]
    object_probes: list[ObjectProbe]
    seed: int

    def probe_locations(self) -> set[str]:
        return {c.location for c in self.expression_probes}


@dataclass
class InstrumentedProgram:
    sources: list[SourceUnit]
    trees: list[Node]
    probe_map: dict[str, ProbeEntry]
    plan: Optional[ProbePlan] = None


def reject_reserved(tree: NormalizedTree) -> None:
    for node in tree.walk():
        if node.kind == "Ident" and (node.token == LOGGER_NAME or node.meta.get("orig") == LOGGER_NAME):
            raise UnsupportedConstruct(
                f"input already uses reserved identifier {LOGGER_NAME}", tree.path
            )


def draw_positions(count: int, seed: int) -> list[str]:
    rng = SplitMix64(seed)
    return ["before" if rng.next_u64() & 1 else "after" for _ in range(count)]


def build_probe_plan(
    candidates: list[CandidateExpression],
    hot: Iterable,
    seed: int,
) -> ProbePlan:
    """Round-0 plan: expression probes restricted to hot-object scopes,
    object probes at seeded random before/after positions."""
    hot_sorted = sorted(hot, key=lambda o: (o.scope_loc, o.name))
    member_locs: set[str] = set()
    for o in hot_sorted:
        member_locs |= o.member_locations
    expr_probes = [c for c in candidates if c.location in member_locs]
    seen: set[str] = set()
    for c in expr_probes:
        if c.location in seen:
            raise RewriteConflict(f"duplicate probe location {c.location}")
        seen.add(c.location)
    positions = draw_positions(len(hot_sorted), seed)
    object_probes = [
        ObjectProbe(o.norm_name, o.scope_loc, pos)
        for o, pos in zip(hot_sorted, positions)
    ]
    return ProbePlan(expr_probes, object_probes, seed)


class _Rewriter:
    """Applies one tree's probes onto a clone of that tree."""

    def __init__(self, tree: NormalizedTree):
        self.tree = tree
        self.clone_of: dict[int, Node] = {}
        self.root = self._clone(tree.root)
        self.parent: dict[int, tuple[Node, int]] = {}
        self._reindex()
        self.wrapped: set[int] = set()
        self.entries: list[ProbeEntry] = []

    def _clone(self, node: Node) -> Node:
        copy = Node(node.kind, node.token, [self._clone(c) for c in node.children], node.span)
        copy.meta = dict(node.meta)
        self.clone_of[id(node)] = copy
        return copy

    def _reindex(self) -> None:
        self.parent.clear()
        for node, parent, idx in self.root.walk_with_parents():
            if parent is not None:
                self.parent[id(node)] = (parent, idx)

    def _logger_call(self, loc: str, value: Node) -> Node:
        return Node("Call", "", [Node("Ident", LOGGER_NAME, [], value.span),
                                 Node("Str", loc, [], value.span), value], value.span)

    def _replace(self, old: Node, new: Node) -> None:
        parent, idx = self.parent[id(old)]
        parent.children[idx] = new
        self.parent[id(new)] = (parent, idx)
        # children of `new` that are pre-existing nodes keep their entries;
        # re-point the wrapped node at its new parent
        for i, child in enumerate(new.children):
            self.parent[id(child)] = (new, i)

    def _record(self, loc: str, src_node: Node, kind: str) -> None:
        path, start, end = self.tree.origin_span(src_node)
        self.entries.append(ProbeEntry(loc, path, start, end, kind))

    def apply_expression_probe(self, cand: CandidateExpression) -> None:
        target_src = cand.node
        cloned = self.clone_of[id(target_src)]
        if cand.kind == "AssignmentRHS":
            rhs_slot = 1
            if id(cloned) in self.wrapped:
                raise RewriteConflict(f"probe already applied at {cand.location}")
            self.wrapped.add(id(cloned))
            rhs = cloned.children[rhs_slot]
            call = self._logger_call(cand.location, rhs)
            cloned.children[rhs_slot] = call
            self.parent[id(call)] = (cloned, rhs_slot)
            self.parent[id(rhs)] = (call, 2)
        else:
            if id(cloned) in self.wrapped:
                raise RewriteConflict(f"probe already applied at {cand.location}")
            self.wrapped.add(id(cloned))
            call = self._logger_call(cand.location, cloned)
            self._replace(cloned, call)
        self._record(cand.location, target_src, cand.kind)

    # -- object probes ---------------------------------------------------

    def _is_write_context(self, node: Node) -> bool:
        entry = self.parent.get(id(node))
        if entry is None:
            return False
        parent, idx = entry
        if parent.kind == "Assign" and idx == 0:
            return True
        if parent.kind == "Update":
            return True
        if parent.kind == "Unary" and parent.token == "delete":
            return True
        if parent.kind == "ForIn" and idx == 0:
            return True
        return False

    def object_sites(self, hot_name: str) -> list[tuple[Node, Node]]:
        """(site, reference) pairs for invocation/member-access sites of the
        hot object, in source order over the rewritten tree."""
        sites: list[tuple[Node, Node]] = []
        for node in self.root.walk():
            if node.kind != "Ident" or node.token != hot_name or node.meta.get("decl"):
                continue
            entry = self.parent.get(id(node))
            if entry is None:
                continue
            parent, idx = entry
            if parent.kind in ("Call", "New") and idx == 0:
                sites.append((parent, node))
            elif parent.kind in ("Member", "Index") and idx == 0:
                gentry = self.parent.get(id(parent))
                gparent = gentry[0] if gentry else None
                if gparent is not None and gparent.kind in ("Call", "New") and gentry[1] == 0:
                    sites.append((gparent, node))
                elif not self._is_write_context(parent):
                    sites.append((parent, node))
        return sites

    def apply_object_probe(self, probe: ObjectProbe, loc_for: dict[int, str]) -> None:
        for site, ref in self.object_sites(probe.hot_name):
            if probe.position == "after":
                if id(site) in self.wrapped:
                    continue  # already logged by an expression probe
                loc = loc_for[id(site)]
                self.wrapped.add(id(site))
                call = self._logger_call(loc, site)
                self._replace(site, call)
                self._record_clone(loc, site, KIND_SITE_VALUE)
            else:
                loc = loc_for[id(ref)]
                if id(ref) in self.wrapped:
                    continue
                self.wrapped.add(id(ref))
                snapshot = Node("Ident", probe.hot_name, [], ref.span)
                seq = Node("Seq", "", [self._logger_call(loc, snapshot), site], site.span)
                self._replace(site, seq)
                self._record_clone(loc, ref, KIND_SNAPSHOT)

    def _record_clone(self, loc: str, clone_node: Node, kind: str) -> None:
        self.entries.append(ProbeEntry(loc, self.tree.path, clone_node.span[0], clone_node.span[1], kind))


def _clone_location_ids(tree: NormalizedTree, rewriter: _Rewriter) -> dict[int, str]:
    """Location ids keyed by the clone's node identity (pre-rewrite shape)."""
    out: dict[int, str] = {}
    for src in tree.walk():
        clone = rewriter.clone_of.get(id(src))
        if clone is not None:
            out[id(clone)] = tree.location_id(src)
    return out


def rewrite_expressions(
    tree: NormalizedTree,
    probes: list[CandidateExpression],
    object_probes: Optional[list[ObjectProbe]] = None,
) -> InstrumentedProgram:
    """Instrument one tree; returns rewritten source plus probe map."""
    reject_reserved(tree)
    rewriter = _Rewriter(tree)
    loc_for = _clone_location_ids(tree, rewriter)
    for cand in sorted(probes, key=lambda c: c.node.span):
        rewriter.apply_expression_probe(cand)
    for oprobe in object_probes or []:
        rewriter.apply_object_probe(oprobe, loc_for)
    probe_map: dict[str, ProbeEntry] = {}
    for entry in rewriter.entries:
        if entry.l in probe_map and probe_map[entry.l] != entry:
            raise RewriteConflict(f"probe map collision at {entry.l}")
        probe_map[entry.l] = entry
    text = to_source(rewriter.root)
    unit = SourceUnit(tree.path, text)
    return InstrumentedProgram([unit], [rewriter.root], probe_map)


def instrument_object(program: InstrumentedProgram, tree: NormalizedTree, probe: ObjectProbe) -> InstrumentedProgram:
    """Add one object probe to an already-instrumented single-tree program."""
    plan_probes = list(program.plan.expression_probes) if program.plan else []
    existing = [p for p in (program.plan.object_probes if program.plan else [])]
    return instrument_program(tree, ProbePlan(plan_probes, existing + [probe], program.plan.seed if program.plan else 0))


def instrument_program(tree: NormalizedTree, plan: ProbePlan) -> InstrumentedProgram:
    program = rewrite_expressions(tree, plan.expression_probes, plan.object_probes)
    program.plan = plan
    return program
