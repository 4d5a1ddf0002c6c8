"""Three-stage MDG comparison.

Stage 1 matches vertices by feature similarity (hot-object-weighted,
exact maximum-weight bipartite matching up to a size cutoff), stage 2
checks multi-level structural consistency of the matched neighborhoods,
and stage 3 validates hot-object interaction patterns.  The final score
blends stages 1 and 2; stage 3 is reported alongside the verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .mdg import (
    EDGE_COVERAGE,
    EDGE_INTER,
    EDGE_INTRA,
    EDGE_TEMPORAL,
    MemoryDependencyGraph,
    VertexFeatures,
)
from .util import fnv1a64_str, hex16

DEFAULT_ALPHA = 0.5
DEFAULT_ZETA = 0.6

SPARSIFY_THRESHOLD = 0.2
EXACT_MATCH_CUTOFF = 256

EDGE_WEIGHTS = {
    EDGE_INTRA: 0.4,
    EDGE_INTER: 0.25,
    EDGE_TEMPORAL: 0.2,
    EDGE_COVERAGE: 0.15,
}

VERDICT_PLAGIARISM = "Plagiarism"
VERDICT_CLEAN = "Clean"


@dataclass
class Matching:
    pairs: list[tuple[str, str]]
    score_matrix_digest: str = ""

    def as_dict(self) -> dict[str, str]:
        return dict(self.pairs)


@dataclass
class SimilarityReport:
    sim_node: float
    sim_struct: float
    hot_consistency: float
    final: float
    alpha: float
    zeta: float
    verdict: str
    matching: Matching
    per_edge_weights: dict[str, float] = field(default_factory=lambda: dict(EDGE_WEIGHTS))
    tier: str = "dynamic"
    static_score: float = 0.0
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema": "report@1",
            "sim_node": self.sim_node,
            "sim_struct": self.sim_struct,
            "hot_consistency": self.hot_consistency,
            "final": self.final,
            "alpha": self.alpha,
            "zeta": self.zeta,
            "verdict": self.verdict,
            "tier": self.tier,
            "static_score": self.static_score,
            "per_edge_weights": self.per_edge_weights,
            "matching": [[s, o] for s, o in sorted(self.matching.pairs)],
            "score_matrix_digest": self.matching.score_matrix_digest,
            "meta": self.meta,
        }


# -- stage 1: vertices ---------------------------------------------------


def _value_jaccard(a: VertexFeatures, b: VertexFeatures) -> float:
    sa = {v for v, _ in a.top_values}
    sb = {v for v, _ in b.top_values}
    if not sa and not sb:
        return 1.0
    union = sa | sb
    if not union:
        return 1.0
    return len(sa & sb) / len(union)


def vertex_similarity(f_s: VertexFeatures, f_o: VertexFeatures) -> float:
    """Weighted feature agreement in [0, 1]."""
    jac = _value_jaccard(f_s, f_o)
    if f_s.numeric is not None and f_o.numeric is not None:
        mu_s, mu_o = f_s.numeric[0], f_o.numeric[0]
        closeness = math.exp(-abs(mu_s - mu_o) / (1.0 + max(abs(mu_s), abs(mu_o))))
        value_sim = 0.5 * jac + 0.5 * closeness
    else:
        value_sim = jac
    round_sim = 1.0 / (1.0 + abs(f_s.coverage_round - f_o.coverage_round))
    return (
        0.3 * (1.0 if f_s.expr_kind == f_o.expr_kind else 0.0)
        + 0.4 * value_sim
        + 0.15 * (1.0 if f_s.hot_member == f_o.hot_member else 0.0)
        + 0.15 * round_sim
    )


def _score_matrix(G_S: MemoryDependencyGraph, G_O: MemoryDependencyGraph):
    left = list(G_S.vertices)
    right = list(G_O.vertices)
    matrix = np.zeros((len(left), len(right)))
    for i, ls in enumerate(left):
        fs = G_S.vertices[ls]
        for j, lo in enumerate(right):
            matrix[i, j] = vertex_similarity(fs, G_O.vertices[lo])
    return left, right, matrix


def _digest(matrix: np.ndarray) -> str:
    return hex16(fnv1a64_str(",".join(format(x, ".12g") for x in matrix.ravel())))


def match_vertices(G_S: MemoryDependencyGraph, G_O: MemoryDependencyGraph) -> Matching:
    """Maximum-weight matching over the vertex similarity matrix.

    Exact assignment (Hungarian via scipy) up to the size cutoff, greedy
    within expr_kind buckets beyond; pairs below the sparsify threshold
    never match.  Identical graphs short-circuit to the identity matching
    (it attains the global upper bound, one best pair per vertex).  Among
    equally-optimal assignments (interchangeable twin vertices), exact-tie
    swaps are refined toward structural agreement, which leaves the total
    weight bit-identical.
    """
    if not G_S.vertices or not G_O.vertices:
        return Matching([], "")
    if list(G_S.vertices) == list(G_O.vertices) and G_S.to_json() == G_O.to_json():
        return Matching([(loc, loc) for loc in G_S.vertices], "identity")

    left, right, matrix = _score_matrix(G_S, G_O)
    digest = _digest(matrix)
    if min(len(left), len(right)) <= EXACT_MATCH_CUTOFF:
        effective = np.where(matrix >= SPARSIFY_THRESHOLD, matrix, 0.0)
        rows, cols = linear_sum_assignment(effective, maximize=True)
        pairs = [
            (left[i], right[j])
            for i, j in zip(rows, cols)
            if matrix[i, j] >= SPARSIFY_THRESHOLD
        ]
        pairs = _refine_ties(G_S, G_O, sorted(pairs), left, right, matrix)
        return Matching(sorted(pairs), digest)

    # greedy fallback for very large graphs
    by_kind_s: dict[str, list[int]] = {}
    by_kind_o: dict[str, list[int]] = {}
    for i, loc in enumerate(left):
        by_kind_s.setdefault(G_S.vertices[loc].expr_kind, []).append(i)
    for j, loc in enumerate(right):
        by_kind_o.setdefault(G_O.vertices[loc].expr_kind, []).append(j)
    used_s: set[int] = set()
    used_o: set[int] = set()
    pairs = []
    for kind in sorted(set(by_kind_s) & set(by_kind_o)):
        options = [
            (-matrix[i, j], left[i], right[j], i, j)
            for i in by_kind_s[kind]
            for j in by_kind_o[kind]
            if matrix[i, j] >= SPARSIFY_THRESHOLD
        ]
        options.sort()
        for _, _, _, i, j in options:
            if i in used_s or j in used_o:
                continue
            used_s.add(i)
            used_o.add(j)
            pairs.append((left[i], right[j]))
    return Matching(sorted(pairs), digest)


def _refine_ties(
    G_S: MemoryDependencyGraph,
    G_O: MemoryDependencyGraph,
    pairs: list[tuple[str, str]],
    left: list[str],
    right: list[str],
    matrix: np.ndarray,
) -> list[tuple[str, str]]:
    """Swap matched pairs whose crossed similarities tie *exactly* when the
    swap improves neighborhood agreement.  Ties arise from interchangeable
    twin vertices (identical feature vectors); any such swap preserves the
    matching's total weight bit-for-bit."""
    li = {loc: i for i, loc in enumerate(left)}
    ri = {loc: j for j, loc in enumerate(right)}
    neigh_s = {e: _neighbor_index(G_S, e) for e in EDGE_WEIGHTS}
    neigh_o = {e: _neighbor_index(G_O, e) for e in EDGE_WEIGHTS}
    mapping = dict(pairs)

    def agreement(s: str, o: str) -> float:
        total = 0.0
        for etype, w in EDGE_WEIGHTS.items():
            ns = neigh_s[etype].get(s, frozenset())
            no = neigh_o[etype].get(o, frozenset())
            if not ns and not no:
                total += w
            elif ns and no:
                matched = sum(1 for n in ns if mapping.get(n) in no)
                total += w * matched / max(len(ns), len(no))
        return total

    for _ in range(4):
        improved = False
        for a in range(len(pairs)):
            s1, o1 = pairs[a]
            for b in range(a + 1, len(pairs)):
                s2, o2 = pairs[b]
                w11 = matrix[li[s1], ri[o1]]
                w22 = matrix[li[s2], ri[o2]]
                w12 = matrix[li[s1], ri[o2]]
                w21 = matrix[li[s2], ri[o1]]
                if w12 < SPARSIFY_THRESHOLD or w21 < SPARSIFY_THRESHOLD:
                    continue
                if w11 + w22 != w12 + w21:  # exact ties only
                    continue
                before = agreement(s1, o1) + agreement(s2, o2)
                mapping[s1], mapping[s2] = o2, o1
                after = agreement(s1, o2) + agreement(s2, o1)
                if after > before + 1e-12:
                    pairs[a] = (s1, o2)
                    pairs[b] = (s2, o1)
                    improved = True
                else:
                    mapping[s1], mapping[s2] = o1, o2
        if not improved:
            break
    return pairs


def matching_weight(G_S: MemoryDependencyGraph, G_O: MemoryDependencyGraph, m: Matching) -> float:
    return sum(
        vertex_similarity(G_S.vertices[s], G_O.vertices[o]) for s, o in m.pairs
    )


def _w_hot(f: VertexFeatures) -> float:
    return f.hot_importance if f.hot_member else 1.0


def sim_node(G_S: MemoryDependencyGraph, G_O: MemoryDependencyGraph, m: Matching) -> float:
    """Hot-weighted matched similarity over the total vertex weight of both
    graphs; 1.0 when both graphs are empty, 0.0 when exactly one is."""
    if not G_S.vertices and not G_O.vertices:
        return 1.0
    if not G_S.vertices or not G_O.vertices:
        return 0.0
    denom = sum(_w_hot(f) for f in G_S.vertices.values()) + sum(
        _w_hot(f) for f in G_O.vertices.values()
    )
    num = 0.0
    for s, o in m.pairs:
        fs, fo = G_S.vertices[s], G_O.vertices[o]
        num += (_w_hot(fs) + _w_hot(fo)) * vertex_similarity(fs, fo)
    return num / denom


# -- stage 2: structure ----------------------------------------------------


def neighborhood_similarity(
    v_s: str,
    v_o: str,
    m: Matching,
    etype: str,
    G_S: MemoryDependencyGraph,
    G_O: MemoryDependencyGraph,
) -> float:
    """Matched-neighbor agreement along one edge type; 1.0 when both
    vertices have no such neighbors."""
    ns = G_S.neighbors(v_s, etype)
    no = G_O.neighbors(v_o, etype)
    if not ns and not no:
        return 1.0
    if not ns or not no:
        return 0.0
    mapping = m.as_dict()
    matched = sum(1 for n in ns if mapping.get(n) in no)
    return matched / max(len(ns), len(no))


def sim_struct(G_S: MemoryDependencyGraph, G_O: MemoryDependencyGraph, m: Matching) -> float:
    if not m.pairs:
        return 0.0
    total_w = sum(EDGE_WEIGHTS.values())
    mapping = m.as_dict()
    neigh_s = {e: _neighbor_index(G_S, e) for e in EDGE_WEIGHTS}
    neigh_o = {e: _neighbor_index(G_O, e) for e in EDGE_WEIGHTS}
    total = 0.0
    for s, o in m.pairs:
        for etype, w in EDGE_WEIGHTS.items():
            ns = neigh_s[etype].get(s, frozenset())
            no = neigh_o[etype].get(o, frozenset())
            if not ns and not no:
                score = 1.0
            elif not ns or not no:
                score = 0.0
            else:
                matched = sum(1 for n in ns if mapping.get(n) in no)
                score = matched / max(len(ns), len(no))
            total += w * score
    return total / (len(m.pairs) * total_w)


def _neighbor_index(g: MemoryDependencyGraph, etype: str) -> dict[str, frozenset[str]]:
    out: dict[str, set[str]] = {}
    for edge in g.edges:
        if edge.etype != etype:
            continue
        out.setdefault(edge.src, set()).add(edge.dst)
        out.setdefault(edge.dst, set()).add(edge.src)
    return {k: frozenset(v) for k, v in out.items()}


# -- stage 3: hot pattern consistency ---------------------------------------


def _hot_signatures(g: MemoryDependencyGraph) -> list[dict]:
    sigs = []
    inter_weights: dict[str, list[float]] = {}
    for edge in g.edges:
        if edge.etype == EDGE_INTER:
            inter_weights.setdefault(edge.src, []).append(edge.weight)
            inter_weights.setdefault(edge.dst, []).append(edge.weight)
    for group in g.hot_groups():
        members = [loc for loc in group.get("members", []) if loc in g.vertices]
        if not members:
            continue
        kinds: dict[str, int] = {}
        weights: list[float] = []
        for loc in members:
            kind = g.vertices[loc].expr_kind
            kinds[kind] = kinds.get(kind, 0) + 1
            weights.extend(inter_weights.get(loc, []))
        sigs.append(
            {
                "name": group.get("name", ""),
                "kinds": kinds,
                "count": len(members),
                "inter_weights": sorted(weights),
            }
        )
    return sigs


def _multiset_jaccard(a: dict[str, int], b: dict[str, int]) -> float:
    keys = set(a) | set(b)
    if not keys:
        return 1.0
    inter = sum(min(a.get(k, 0), b.get(k, 0)) for k in keys)
    union = sum(max(a.get(k, 0), b.get(k, 0)) for k in keys)
    return inter / union if union else 1.0


def hot_pattern_consistency(G_S: MemoryDependencyGraph, G_O: MemoryDependencyGraph) -> float:
    """Signature-level agreement of hot-object behavior; 1.0 when neither
    graph has hot objects, 0.0 when exactly one does."""
    sigs_s = _hot_signatures(G_S)
    sigs_o = _hot_signatures(G_O)
    if not sigs_s and not sigs_o:
        return 1.0
    if not sigs_s or not sigs_o:
        return 0.0
    matrix = np.zeros((len(sigs_s), len(sigs_o)))
    for i, a in enumerate(sigs_s):
        for j, b in enumerate(sigs_o):
            kind_sim = _multiset_jaccard(a["kinds"], b["kinds"])
            ratio = min(a["count"], b["count"]) / max(a["count"], b["count"])
            matrix[i, j] = 0.7 * kind_sim + 0.3 * ratio
    rows, cols = linear_sum_assignment(matrix, maximize=True)
    total = matrix[rows, cols].sum()
    return float(total / max(len(sigs_s), len(sigs_o)))


# -- final score -------------------------------------------------------------


def _graph_key(g: MemoryDependencyGraph) -> str:
    return hex16(fnv1a64_str(g.to_json()))


def plagiarism_score(
    G_S: MemoryDependencyGraph,
    G_O: MemoryDependencyGraph,
    alpha: float = DEFAULT_ALPHA,
    zeta: float = DEFAULT_ZETA,
) -> SimilarityReport:
    """Full three-stage comparison with a strict-exceed verdict.

    Internally computed in a canonical orientation (graphs ordered by
    content key) so scores and the matched pair set are exactly symmetric.
    """
    if not 0 <= alpha <= 1 or not 0 <= zeta <= 1:
        raise ValueError("alpha and zeta must lie in [0, 1]")
    flip = _graph_key(G_O) < _graph_key(G_S)
    A, B = (G_O, G_S) if flip else (G_S, G_O)
    m = match_vertices(A, B)
    node = sim_node(A, B, m)
    struct = sim_struct(A, B, m)
    hot = hot_pattern_consistency(A, B)
    final = alpha * node + (1 - alpha) * struct
    verdict = VERDICT_PLAGIARISM if final > zeta else VERDICT_CLEAN
    pairs = [(o, s) for s, o in m.pairs] if flip else list(m.pairs)
    return SimilarityReport(
        sim_node=node,
        sim_struct=struct,
        hot_consistency=hot,
        final=final,
        alpha=alpha,
        zeta=zeta,
        verdict=verdict,
        matching=Matching(sorted(pairs), m.score_matrix_digest),
        meta={
            "suspect": G_S.meta.get("program_id", ""),
            "original": G_O.meta.get("program_id", ""),
        },
    )
