"""Adaptive hot object slicing.

Identifies the program entities that carry core logic (frequently
executed functions plus domain-lexicon identifiers), instruments their
scopes first, measures coverage after each execution, and expands
instrumentation one ancestor scope per round for objects below the
coverage threshold, bounded by a maximum round count.

Runtime-loaded code participates fully: the executor's eval hook routes
decrypted payloads through the same identify/plan/instrument policy, so
an encrypted program converges on the same probed surface as its
plaintext original.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import AtRoot, ExecutionFailure
from .instrument import (
    InstrumentedProgram,
    ObjectProbe,
    ProbeEntry,
    ProbePlan,
    build_probe_plan,
    instrument_program,
    reject_reserved,
)
from .invariants import InvariantInstance, InvariantSet
from .sandbox import EXIT_RUNTIME_ERROR, InvariantLog, SandboxManifest, Stimulus, execute
from .source import (
    CandidateExpression,
    Node,
    NormalizedTree,
    SourceUnit,
    enumerate_candidates,
    parse,
)
from .util import fnv1a64_str, hex16

DEFAULT_THETA = 0.6
DEFAULT_R_MAX = 5
DEFAULT_K_TOP = 10
IMPORTANCE_FREQUENCY = 2.0
IMPORTANCE_LEXICON = 1.5

DEFAULT_LEXICON = ["score", "enemy", "bullet", "gun", "level", "player", "coin", "physics"]


@dataclass
class HotObject:
    name: str                 # original identifier
    norm_name: str            # placeholder name in its normalized tree
    scope_loc: str            # location id of the scope node
    scope_node: Node
    category: str             # Frequency | Lexicon
    importance: float
    member_locations: frozenset[str]
    source_key: str = "main"

    @property
    def key(self) -> str:
        return f"{self.source_key}:{self.norm_name}@{self.scope_loc}"


@dataclass
class CoverageReport:
    per_object: dict[str, float]
    round: int


@dataclass
class ExpansionEvent:
    round: int
    hot_key: str
    source_key: str
    scope_loc: str
    added_locations: tuple[str, ...]
    scope_locations: tuple[str, ...]  # all candidate locations of that scope


@dataclass
class SliceResult:
    invariants: InvariantSet
    hot_objects: list[HotObject]
    coverage_history: list[CoverageReport]
    expansion_trace: list[ExpansionEvent]
    probe_map: dict[str, ProbeEntry]
    trees: dict[str, NormalizedTree]
    candidates: dict[str, list[CandidateExpression]]
    trace_lines: list[str]
    logs: list[InvariantLog]
    rounds_executed: int

    def probe_kind(self, loc: str) -> str:
        entry = self.probe_map.get(loc)
        return entry.kind if entry else "Unknown"


def _annotate_profile_keys(tree: NormalizedTree) -> None:
    for node in tree.walk():
        if node.kind in ("FuncDecl", "FuncExpr"):
            node.meta["profile_key"] = tree.location_id(node)


def _declaration_entries(tree: NormalizedTree):
    """(orig_name, norm_name, scope_node) per declaration that can anchor a
    hot object: function declarations and initialized var declarators."""
    for node in tree.walk():
        if node.kind == "FuncDecl":
            yield node.meta.get("orig_name", node.token), node.token, node
        elif node.kind == "Declarator" and len(node.children) == 2:
            name_node = node.children[0]
            orig = name_node.meta.get("orig", name_node.token)
            init = node.children[1]
            scope = init if init.kind == "FuncExpr" else node
            yield orig, name_node.token, scope


def _profile_count(tree: NormalizedTree, scope_node: Node, profile: dict[str, int]) -> int:
    total = 0
    for node in scope_node.walk():
        if node.kind in ("FuncDecl", "FuncExpr"):
            total += profile.get(tree.location_id(node), 0)
    return total


def scope_member_locations(
    tree: NormalizedTree, scope_node: Node, candidates: list[CandidateExpression]
) -> frozenset[str]:
    inside = {id(n) for n in scope_node.walk()}
    return frozenset(c.location for c in candidates if id(c.node) in inside)


def identify_hot_objects(
    tree: NormalizedTree,
    lexicon: list[str],
    profile: Optional[dict[str, int]] = None,
    candidates: Optional[list[CandidateExpression]] = None,
    k_top: int = DEFAULT_K_TOP,
    source_key: str = "main",
) -> list[HotObject]:
    """Frequency (top-K by profiled call count) plus lexicon matches.

    Frequency wins on overlap.  Output is deterministically ordered by
    (scope location, name).
    """
    if candidates is None:
        candidates = enumerate_candidates(tree)
    entries = list(_declaration_entries(tree))
    terms = [t.lower() for t in lexicon]

    by_key: dict[tuple[str, str], HotObject] = {}

    if profile:
        counted = []
        for orig, norm, scope in entries:
            count = _profile_count(tree, scope, profile)
            if count >= 1:
                counted.append((count, tree.location_id(scope), orig, norm, scope))
        counted.sort(key=lambda item: (-item[0], item[1]))
        for count, scope_loc, orig, norm, scope in counted[:k_top]:
            members = scope_member_locations(tree, scope, candidates)
            by_key[(norm, scope_loc)] = HotObject(
                orig, norm, scope_loc, scope, "Frequency", IMPORTANCE_FREQUENCY, members, source_key
            )

    for orig, norm, scope in entries:
        low = orig.lower()
        if not any(term in low for term in terms):
            continue
        scope_loc = tree.location_id(scope)
        if (norm, scope_loc) in by_key:
            continue  # Frequency wins on overlap
        members = scope_member_locations(tree, scope, candidates)
        by_key[(norm, scope_loc)] = HotObject(
            orig, norm, scope_loc, scope, "Lexicon", IMPORTANCE_LEXICON, members, source_key
        )

    return sorted(by_key.values(), key=lambda o: (o.scope_loc, o.name))


def calculate_coverage(
    inv: InvariantSet,
    hot: list[HotObject],
    surfaces: Optional[dict[str, frozenset[str]]] = None,
    round_no: int = 0,
) -> CoverageReport:
    """Fraction of each object's probed surface that produced instances.

    The surface defaults to the object's member locations; the slicing
    loop passes expansion-grown surfaces.  Empty surface counts as fully
    covered."""
    logged = inv.locations()
    per_object: dict[str, float] = {}
    for o in hot:
        surface = surfaces.get(o.key, o.member_locations) if surfaces else o.member_locations
        if not surface:
            per_object[o.key] = 1.0
        else:
            per_object[o.key] = len(surface & logged) / len(surface)
    return CoverageReport(per_object, round_no)


def expand_parent_scope(
    tree: NormalizedTree,
    frontier: Node,
    candidates: list[CandidateExpression],
    already_probed: set[str],
) -> tuple[Node, list[CandidateExpression]]:
    """Climb one ancestor scope; return (new frontier, its unprobed
    candidates).  Raises AtRoot when the frontier is already the program."""
    if frontier is tree.root:
        raise AtRoot("already at program scope")
    parent_scope = tree.enclosing_scope(frontier)
    direct = [
        c for c in candidates
        if tree.enclosing_scope(c.node) is parent_scope and c.location not in already_probed
    ]
    return parent_scope, direct


@dataclass
class _SourceState:
    key: str
    tree: NormalizedTree
    candidates: list[CandidateExpression]
    plan: ProbePlan
    hot: list[HotObject]
    is_payload: bool = False
    plan_version: int = 0
    cached_version: int = -1
    cached_program: Optional[InstrumentedProgram] = None

    def instrumented(self) -> InstrumentedProgram:
        if self.cached_version != self.plan_version:
            self.cached_program = instrument_program(self.tree, self.plan)
            self.cached_version = self.plan_version
        return self.cached_program


class AdaptiveSlicer:
    """Runs the bounded instrument/execute/measure/expand loop."""

    def __init__(
        self,
        units: list[SourceUnit],
        lexicon: Optional[list[str]] = None,
        theta: float = DEFAULT_THETA,
        r_max: int = DEFAULT_R_MAX,
        k_top: int = DEFAULT_K_TOP,
        seed: int = 1,
        stim: Stimulus = Stimulus(),
        manifest: Optional[SandboxManifest] = None,
    ):
        if not 0 < theta <= 1:
            raise ValueError("theta must be in (0, 1]")
        if r_max < 1:
            raise ValueError("r_max must be >= 1")
        self.lexicon = lexicon if lexicon is not None else list(DEFAULT_LEXICON)
        self.theta = theta
        self.r_max = r_max
        self.k_top = k_top
        self.seed = seed
        self.stim = stim
        self.manifest = manifest or SandboxManifest()

        self.main_trees: list[NormalizedTree] = []
        for unit in units:
            tree = parse(unit)
            reject_reserved(tree)
            _annotate_profile_keys(tree)
            self.main_trees.append(tree)

        self.sources: dict[str, _SourceState] = {}
        self.payload_by_text: dict[str, str] = {}  # code hash -> source key
        self.profile: dict[str, int] = {}
        self.fn_names: dict[str, str] = {}
        self.frontiers: dict[str, Node] = {}
        self.surfaces: dict[str, frozenset[str]] = {}
        self.best_coverage: dict[str, float] = {}
        self.expansion_trace: list[ExpansionEvent] = []
        self.coverage_history: list[CoverageReport] = []
        self.trace_lines: list[str] = []
        self.logs: list[InvariantLog] = []
        self.eval_sources: dict[str, str] = {}

    # -- profile phase ---------------------------------------------------

    def _profile_eval_hook(self, code: str, round_no: int):
        key = self._payload_key(code)
        state = self.sources.get(key)
        if state is None:
            state = self._register_payload(key, code)
        return state.tree.root, {}

    def _payload_key(self, code: str) -> str:
        return "eval:" + hex16(fnv1a64_str(code))

    def _register_payload(self, key: str, code: str) -> _SourceState:
        tree = parse(SourceUnit(key, code))
        reject_reserved(tree)
        _annotate_profile_keys(tree)
        cands = enumerate_candidates(tree)
        state = _SourceState(key, tree, cands, ProbePlan([], [], self.seed), [], is_payload=True)
        self.sources[key] = state
        self.eval_sources[key] = code
        return state

    def run_profile(self) -> None:
        program = InstrumentedProgram(
            [SourceUnit(t.path, "") for t in self.main_trees],
            [t.root for t in self.main_trees],
            {},
        )
        log = execute(
            program,
            self.stim,
            round_no=0,
            manifest=self.manifest,
            eval_hook=self._profile_eval_hook,
            logging_enabled=False,
        )
        if log.exit == EXIT_RUNTIME_ERROR:
            raise ExecutionFailure(f"profile run failed: {log.error_message}")
        self.profile = log.call_counts
        self.fn_names = log.fn_names
        self.logs.append(log)

    # -- planning ----------------------------------------------------------

    def plan_round_zero(self) -> None:
        for i, tree in enumerate(self.main_trees):
            key = f"main:{tree.path}"
            cands = enumerate_candidates(tree)
            hot = identify_hot_objects(
                tree, self.lexicon, self.profile, cands, self.k_top, source_key=key
            )
            plan = build_probe_plan(cands, hot, self.seed)
            self.sources[key] = _SourceState(key, tree, cands, plan, hot)
        for key, state in list(self.sources.items()):
            if state.is_payload:
                self._plan_payload(state)
        for state in self.sources.values():
            for o in state.hot:
                self.frontiers[o.key] = o.scope_node
                self.surfaces[o.key] = o.member_locations
                self.best_coverage[o.key] = 0.0

    def _plan_payload(self, state: _SourceState) -> None:
        state.hot = identify_hot_objects(
            state.tree, self.lexicon, self.profile, state.candidates, self.k_top,
            source_key=state.key,
        )
        state.plan = build_probe_plan(state.candidates, state.hot, self.seed)
        state.plan_version += 1
        for o in state.hot:
            self.frontiers.setdefault(o.key, o.scope_node)
            self.surfaces.setdefault(o.key, o.member_locations)
            self.best_coverage.setdefault(o.key, 0.0)

    # -- measurement -------------------------------------------------------

    def _measure_eval_hook(self, code: str, round_no: int):
        key = self._payload_key(code)
        state = self.sources.get(key)
        if state is None:
            # payload unseen during profiling: plan it now (lexicon-only hot)
            state = self._register_payload(key, code)
            self._plan_payload(state)
        program = state.instrumented()
        return program.trees[0], dict(program.probe_map)

    def execute_round(self, round_no: int) -> InvariantLog:
        mains = [s for s in self.sources.values() if not s.is_payload]
        trees = []
        units = []
        probe_map: dict[str, ProbeEntry] = {}
        for state in mains:
            prog = state.instrumented()
            trees.extend(prog.trees)
            units.extend(prog.sources)
            probe_map.update(prog.probe_map)
        program = InstrumentedProgram(units, trees, probe_map)
        log = execute(
            program,
            self.stim,
            round_no=round_no,
            manifest=self.manifest,
            eval_hook=self._measure_eval_hook,
            logging_enabled=True,
        )
        self.logs.append(log)
        return log

    # -- the loop ---------------------------------------------------------

    def run(self) -> SliceResult:
        self.run_profile()
        self.plan_round_zero()

        all_hot: list[HotObject] = []
        for state in sorted(self.sources.values(), key=lambda s: s.key):
            all_hot.extend(state.hot)

        instances: list[InvariantInstance] = []
        log0 = self.execute_round(0)
        instances.extend(log0.records)
        comprehensive = InvariantSet(instances)

        report = self._coverage(comprehensive, all_hot, 0)
        uncovered = self._uncovered(all_hot, report)
        self._trace(0, uncovered, report)

        round_no = 0
        while uncovered and round_no < self.r_max:
            round_no += 1
            for o in sorted(uncovered, key=lambda o: o.key):
                self._expand_object(o, round_no)
            # refresh hot list in case new payloads appeared mid-run
            log = self.execute_round(round_no)
            instances.extend(log.records)
            comprehensive = InvariantSet(instances)
            all_hot = []
            for state in sorted(self.sources.values(), key=lambda s: s.key):
                all_hot.extend(state.hot)
            report = self._coverage(comprehensive, all_hot, round_no)
            uncovered = self._uncovered(all_hot, report)
            self._trace(round_no, uncovered, report)

        probe_map: dict[str, ProbeEntry] = {}
        trees: dict[str, NormalizedTree] = {}
        candidates: dict[str, list[CandidateExpression]] = {}
        for state in sorted(self.sources.values(), key=lambda s: s.key):
            probe_map.update(state.instrumented().probe_map)
            trees[state.key] = state.tree
            candidates[state.key] = state.candidates

        assert round_no <= self.r_max, "expansion exceeded the round limit"
        return SliceResult(
            invariants=comprehensive,
            hot_objects=all_hot,
            coverage_history=self.coverage_history,
            expansion_trace=self.expansion_trace,
            probe_map=probe_map,
            trees=trees,
            candidates=candidates,
            trace_lines=self.trace_lines,
            logs=self.logs,
            rounds_executed=round_no,
        )

    def _coverage(self, inv: InvariantSet, hot: list[HotObject], round_no: int) -> CoverageReport:
        raw = calculate_coverage(inv, hot, self.surfaces, round_no)
        for key, value in raw.per_object.items():
            best = self.best_coverage.get(key, 0.0)
            if value < best:
                raw.per_object[key] = best  # reported coverage is monotone
            else:
                self.best_coverage[key] = value
        self.coverage_history.append(raw)
        return raw

    def _uncovered(self, hot: list[HotObject], report: CoverageReport) -> list[HotObject]:
        return [o for o in hot if report.per_object.get(o.key, 1.0) < self.theta]

    def _expand_object(self, o: HotObject, round_no: int) -> None:
        state = self.sources[o.source_key]
        frontier = self.frontiers[o.key]
        probed = state.plan.probe_locations()
        try:
            new_frontier, added = expand_parent_scope(state.tree, frontier, state.candidates, probed)
        except AtRoot:
            self.expansion_trace.append(
                ExpansionEvent(round_no, o.key, o.source_key, state.tree.location_id(state.tree.root), (), ())
            )
            return
        self.frontiers[o.key] = new_frontier
        scope_locs = tuple(
            c.location for c in state.candidates
            if state.tree.enclosing_scope(c.node) is new_frontier
        )
        added_locs = tuple(c.location for c in added)
        if added:
            state.plan = ProbePlan(
                state.plan.expression_probes + added, state.plan.object_probes, state.plan.seed
            )
            state.plan_version += 1
        # the object's measured surface grows by the whole scope, including
        # locations other objects already probed
        self.surfaces[o.key] = self.surfaces[o.key] | frozenset(scope_locs)
        self.expansion_trace.append(
            ExpansionEvent(
                round_no, o.key, o.source_key,
                state.tree.location_id(new_frontier), added_locs, scope_locs,
            )
        )

    def _trace(self, round_no: int, uncovered: list[HotObject], report: CoverageReport) -> None:
        parts = " ".join(
            f"{key}={report.per_object[key]:.3f}" for key in sorted(report.per_object)
        )
        self.trace_lines.append(f"round={round_no} uncovered={len(uncovered)} {parts}")


def adaptive_slice(
    units: list[SourceUnit],
    lexicon: Optional[list[str]] = None,
    theta: float = DEFAULT_THETA,
    r_max: int = DEFAULT_R_MAX,
    seed: int = 1,
    k_top: int = DEFAULT_K_TOP,
    stim: Stimulus = Stimulus(),
    manifest: Optional[SandboxManifest] = None,
) -> SliceResult:
    """Full Algorithm-style slicing run over a program's source units."""
    slicer = AdaptiveSlicer(units, lexicon, theta, r_max, k_top, seed, stim, manifest)
    return slicer.run()
