"""Memory Dependency Graph construction and serialization.

Vertices are unique instrumented locations with value-distribution
features; edges come in four classes: Intra (def-use within a hot
object's scope), Inter (calls and shared globals between hot objects),
Temporal (close execution proximity within a round), and Coverage
(hierarchical expansion relationships across rounds).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .invariants import InvariantSet
from .slicer import ExpansionEvent, HotObject, SliceResult
from .source import CandidateExpression, Node, NormalizedTree
from .util import canonical_json

SCHEMA = "mdg@1"

TEMPORAL_WINDOW = 3
TOP_VALUES = 32

EDGE_INTRA = "Intra"
EDGE_INTER = "Inter"
EDGE_TEMPORAL = "Temporal"
EDGE_COVERAGE = "Coverage"


@dataclass(frozen=True)
class VertexFeatures:
    expr_kind: str
    count: int
    numeric: Optional[tuple[float, float, int]]  # (mean, population variance, n)
    top_values: tuple[tuple[str, int], ...]
    hot_member: bool
    hot_importance: float
    coverage_round: int
    first_round: int
    first_t: int

    @property
    def order_key(self) -> tuple[int, int]:
        return (self.first_round, self.first_t)


@dataclass(frozen=True)
class MdgEdge:
    src: str
    dst: str
    etype: str
    weight: float


class MemoryDependencyGraph:
    def __init__(self, vertices: dict[str, VertexFeatures], edges: list[MdgEdge], meta: dict):
        self.vertices = dict(sorted(vertices.items()))
        self.edges = sorted(edges, key=lambda e: (e.etype, e.src, e.dst))
        self.meta = meta

    def __len__(self) -> int:
        return len(self.vertices)

    def neighbors(self, vid: str, etype: str) -> set[str]:
        out: set[str] = set()
        for edge in self.edges:
            if edge.etype != etype:
                continue
            if edge.src == vid:
                out.add(edge.dst)
            elif edge.dst == vid:
                out.add(edge.src)
        return out

    def degree(self, vid: str, etype: str) -> int:
        return len(self.neighbors(vid, etype))

    def hot_groups(self) -> list[dict]:
        return self.meta.get("hot_objects", [])

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        vertices = {}
        for loc, f in self.vertices.items():
            vertices[loc] = {
                "expr_kind": f.expr_kind,
                "count": f.count,
                "numeric": None if f.numeric is None else {
                    "mean": f.numeric[0], "variance": f.numeric[1], "count": f.numeric[2]
                },
                "top_values": [[v, c] for v, c in f.top_values],
                "hot_member": f.hot_member,
                "hot_importance": f.hot_importance,
                "coverage_round": f.coverage_round,
                "first_round": f.first_round,
                "first_t": f.first_t,
            }
        return {
            "schema": SCHEMA,
            "meta": self.meta,
            "vertices": vertices,
            "edges": [
                {"src": e.src, "dst": e.dst, "etype": e.etype, "weight": e.weight}
                for e in self.edges
            ],
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    @staticmethod
    def from_dict(data: dict) -> "MemoryDependencyGraph":
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unsupported MDG schema: {data.get('schema')!r}")
        vertices = {}
        for loc, v in data["vertices"].items():
            numeric = v.get("numeric")
            vertices[loc] = VertexFeatures(
                expr_kind=v["expr_kind"],
                count=v["count"],
                numeric=None if numeric is None else (numeric["mean"], numeric["variance"], numeric["count"]),
                top_values=tuple((tv[0], tv[1]) for tv in v["top_values"]),
                hot_member=v["hot_member"],
                hot_importance=v["hot_importance"],
                coverage_round=v["coverage_round"],
                first_round=v["first_round"],
                first_t=v["first_t"],
            )
        edges = [MdgEdge(e["src"], e["dst"], e["etype"], e["weight"]) for e in data["edges"]]
        return MemoryDependencyGraph(vertices, edges, data.get("meta", {}))

    @staticmethod
    def from_json(text: str) -> "MemoryDependencyGraph":
        return MemoryDependencyGraph.from_dict(json.loads(text))


# -- vertex construction ----------------------------------------------------


def build_vertices(
    inv: InvariantSet,
    hot: Iterable[HotObject],
    probe_kinds: Optional[dict[str, str]] = None,
) -> dict[str, VertexFeatures]:
    """One vertex per distinct location, with aggregated value statistics."""
    grouped: dict[str, list] = {}
    for inst in inv:
        grouped.setdefault(inst.l, []).append(inst)

    hot_list = list(hot)
    vertices: dict[str, VertexFeatures] = {}
    for loc, instances in grouped.items():
        counts: dict[str, int] = {}
        numerics: list[float] = []
        for inst in instances:
            counts[inst.v] = counts.get(inst.v, 0) + 1
            if inst.tau == "Number":
                try:
                    num = float(inst.v)
                except ValueError:
                    num = math.nan
                if math.isfinite(num):
                    numerics.append(num)
        top = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:TOP_VALUES]
        numeric = None
        if numerics:
            mean = sum(numerics) / len(numerics)
            variance = sum((x - mean) ** 2 for x in numerics) / len(numerics)
            numeric = (mean, variance, len(numerics))
        importance = 1.0
        member = False
        for o in hot_list:
            if loc in o.member_locations:
                member = True
                importance = max(importance, o.importance)
        first = min(instances, key=lambda i: (i.round, i.t))
        vertices[loc] = VertexFeatures(
            expr_kind=(probe_kinds or {}).get(loc, "Unknown"),
            count=len(instances),
            numeric=numeric,
            top_values=tuple(top),
            hot_member=member,
            hot_importance=importance if member else 1.0,
            coverage_round=min(i.round for i in instances),
            first_round=first.round,
            first_t=first.t,
        )
    return vertices


# -- edge construction -------------------------------------------------------


def _reads_in(node: Node) -> list[str]:
    """Identifier reads in an expression subtree."""
    return [n.token for n in node.walk() if n.kind == "Ident" and not n.meta.get("decl")]


def _def_target(node: Node) -> Optional[str]:
    if node.kind == "Assign" and node.children[0].kind == "Ident":
        return node.children[0].token
    if node.kind == "Declarator":
        return node.children[0].token
    return None


def build_intra_edges(
    tree: NormalizedTree,
    candidates: list[CandidateExpression],
    vertices: dict[str, VertexFeatures],
    hot: Iterable[HotObject],
) -> list[MdgEdge]:
    """Def-use edges inside each hot object's scope: a probed read connects
    to its nearest probed lexical reaching definition (last-writer-wins in
    source order, per scope, no aliasing)."""
    edges: list[MdgEdge] = []
    cands_by_node = {id(c.node): c for c in candidates}
    for o in hot:
        last_def: dict[str, str] = {}
        # a definition takes effect only after its own RHS candidates have
        # been processed (the RHS evaluates before the write), so pending
        # defs are registered once the walk leaves their subtree
        pending: list[tuple[frozenset[int], str, str]] = []
        scope_nodes = [n for n in o.scope_node.walk() if id(n) in cands_by_node]
        for node in scope_nodes:  # walk() is source (pre)order
            while pending and id(node) not in pending[-1][0]:
                _, name, loc = pending.pop()
                last_def[name] = loc
            cand = cands_by_node[id(node)]
            if cand.location not in vertices:
                continue
            target_name = _def_target(node)
            if node.kind in ("Assign", "Declarator"):
                read_root = node.children[1]
            else:
                read_root = node
            for name in _reads_in(read_root):
                src = last_def.get(name)
                if src is not None and src != cand.location:
                    edges.append(MdgEdge(src, cand.location, EDGE_INTRA, 1.0))
            if target_name is not None:
                subtree = frozenset(id(n) for n in node.walk())
                pending.append((subtree, target_name, cand.location))
        while pending:
            _, name, loc = pending.pop()
            last_def[name] = loc
    return _dedupe(edges)


def _entry_vertex(locations: Iterable[str], vertices: dict[str, VertexFeatures]) -> Optional[str]:
    best = None
    best_key = None
    for loc in locations:
        f = vertices.get(loc)
        if f is None:
            continue
        if best_key is None or f.order_key < best_key or (f.order_key == best_key and loc < best):
            best = loc
            best_key = f.order_key
    return best


def build_inter_edges(
    trees: dict[str, NormalizedTree],
    candidates: dict[str, list[CandidateExpression]],
    vertices: dict[str, VertexFeatures],
    hot: Iterable[HotObject],
) -> list[MdgEdge]:
    """Cross-hot-object edges: probed calls from inside one hot object to a
    member of another (weight 1.0, into the target's entry vertex), and
    shared-global touch pairs (weight 0.5)."""
    hot_list = list(hot)
    edges: list[MdgEdge] = []
    by_source: dict[str, list[HotObject]] = {}
    for o in hot_list:
        by_source.setdefault(o.source_key, []).append(o)

    for source_key, group in sorted(by_source.items()):
        if len(group) < 2:
            continue
        tree = trees.get(source_key)
        cands = candidates.get(source_key, [])
        if tree is None:
            continue
        scope_sets = {o.key: {id(n) for n in o.scope_node.walk()} for o in group}
        entry = {o.key: _entry_vertex(o.member_locations, vertices) for o in group}

        # calling relationships
        for cand in cands:
            if cand.kind != "CallReturn" or cand.location not in vertices:
                continue
            callee = cand.node.children[0]
            base = callee
            while base.kind in ("Member", "Index", "Call", "New"):
                base = base.children[0]
            if base.kind != "Ident":
                continue
            for caller in group:
                if id(cand.node) not in scope_sets[caller.key]:
                    continue
                for target in group:
                    if target.key == caller.key or target.norm_name != base.token:
                        continue
                    tval = entry[target.key]
                    if tval is not None and tval != cand.location:
                        edges.append(MdgEdge(cand.location, tval, EDGE_INTER, 1.0))

        # shared global access
        global_names = _global_names(tree)
        touches: dict[str, dict[str, str]] = {}  # hot key -> name -> earliest loc
        for o in group:
            touch: dict[str, str] = {}
            for cand in cands:
                if cand.location not in vertices or id(cand.node) not in scope_sets[o.key]:
                    continue
                names = set(_reads_in(cand.node))
                target = _def_target(cand.node)
                if target:
                    names.add(target)
                for name in names & global_names:
                    prev = touch.get(name)
                    if prev is None or _order(vertices, cand.location) < _order(vertices, prev):
                        touch[name] = cand.location
            touches[o.key] = touch
        keys = sorted(touches)
        for i, a in enumerate(keys):
            for b in keys[i + 1 :]:
                shared = sorted(set(touches[a]) & set(touches[b]))
                for name in shared:
                    va, vb = touches[a][name], touches[b][name]
                    if va == vb:
                        continue
                    src, dst = (va, vb) if _order(vertices, va) <= _order(vertices, vb) else (vb, va)
                    edges.append(MdgEdge(src, dst, EDGE_INTER, 0.5))
    return _dedupe(edges)


def _order(vertices: dict[str, VertexFeatures], loc: str) -> tuple[int, int]:
    return vertices[loc].order_key


def _global_names(tree: NormalizedTree) -> set[str]:
    names = set(tree.free_names)
    for stmt in tree.root.children:
        if stmt.kind == "VarDecl":
            for decl in stmt.children:
                names.add(decl.children[0].token)
        elif stmt.kind == "FuncDecl":
            names.add(stmt.token)
    return names


def build_temporal_edges(inv: InvariantSet) -> list[MdgEdge]:
    """Edges between distinct locations logged within the temporal window
    in the same round; weight 1/(1+dt), max kept per ordered pair."""
    best: dict[tuple[str, str], float] = {}
    instances = inv.instances
    for i, a in enumerate(instances):
        j = i + 1
        while j < len(instances):
            b = instances[j]
            if b.round != a.round:
                break
            dt = b.t - a.t
            if dt > TEMPORAL_WINDOW:
                break
            if dt > 0 and a.l != b.l:
                pair = (a.l, b.l)
                weight = 1.0 / (1.0 + dt)
                if weight > best.get(pair, 0.0):
                    best[pair] = weight
            j += 1
    return [MdgEdge(src, dst, EDGE_TEMPORAL, w) for (src, dst), w in sorted(best.items())]


def build_coverage_edges(
    inv: InvariantSet,
    vertices: dict[str, VertexFeatures],
    trace: list[ExpansionEvent],
) -> list[MdgEdge]:
    """One incoming edge per vertex first logged in an expansion round,
    from the entry vertex of the scope whose expansion introduced it."""
    edges: list[MdgEdge] = []
    for loc, f in vertices.items():
        if f.coverage_round < 1:
            continue
        for event in trace:
            if event.round != f.coverage_round or loc not in event.added_locations:
                continue
            entry = _entry_vertex(
                (l for l in event.scope_locations if l != loc), vertices
            )
            if entry is not None:
                edges.append(MdgEdge(entry, loc, EDGE_COVERAGE, 1.0))
            break
    return _dedupe(edges)


def _dedupe(edges: list[MdgEdge]) -> list[MdgEdge]:
    best: dict[tuple[str, str, str], float] = {}
    for e in edges:
        if e.src == e.dst:
            continue
        key = (e.etype, e.src, e.dst)
        if e.weight > best.get(key, 0.0):
            best[key] = e.weight
    return [MdgEdge(src, dst, etype, w) for (etype, src, dst), w in sorted(best.items())]


# -- top-level composition ---------------------------------------------------


def build_mdg(
    result: SliceResult,
    program_id: str,
    config_hash: str = "",
) -> MemoryDependencyGraph:
    """Compose the four edge builders over one program's slicing result."""
    probe_kinds = {loc: entry.kind for loc, entry in result.probe_map.items()}
    vertices = build_vertices(result.invariants, result.hot_objects, probe_kinds)

    edges: list[MdgEdge] = []
    for source_key in sorted(result.trees):
        tree = result.trees[source_key]
        cands = result.candidates[source_key]
        group = [o for o in result.hot_objects if o.source_key == source_key]
        edges.extend(build_intra_edges(tree, cands, vertices, group))
    edges.extend(
        build_inter_edges(result.trees, result.candidates, vertices, result.hot_objects)
    )
    edges.extend(build_temporal_edges(result.invariants))
    edges.extend(build_coverage_edges(result.invariants, vertices, result.expansion_trace))

    hot_meta = [
        {
            "name": o.name,
            "category": o.category,
            "importance": o.importance,
            "members": sorted(o.member_locations & vertices.keys()),
        }
        for o in sorted(result.hot_objects, key=lambda o: (o.scope_loc, o.name))
    ]
    hot_meta = [h for h in hot_meta if h["members"]]
    meta = {
        "program_id": program_id,
        "config_hash": config_hash,
        "hot_objects": hot_meta,
        "rounds": result.rounds_executed,
    }
    return MemoryDependencyGraph(vertices, _dedupe(edges), meta)
