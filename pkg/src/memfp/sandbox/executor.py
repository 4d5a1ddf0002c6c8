"""Deterministic sandboxed execution of instrumented programs.

Two runs with equal (program, stimulus) produce byte-identical invariant
logs: the clock, RNG, timers, and network/file channels are fully
virtualized, and the execution budget is metered in interpreter steps
rather than wall time so even timeouts cut at the same point every run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from ..errors import ExecutionFailure
from ..instrument import InstrumentedProgram, ProbeEntry
from ..invariants import InvariantInstance, InvariantSet
from ..source import SourceUnit, parse_text
from ..source.jsast import Node
from .host import HostState, SandboxManifest, install_globals
from .interp import Interpreter, JSThrow, OutOfFuel, to_string
from .values import UNDEFINED, JSObject, canonicalize_value

EXIT_COMPLETED = "Completed"
EXIT_TIMEOUT = "Timeout"
EXIT_RUNTIME_ERROR = "RuntimeError"

DEFAULT_TICK_MS = 16.0
DEFAULT_STEPS_PER_MS = 500


@dataclass(frozen=True)
class Stimulus:
    """Deterministic workload: virtual frames plus synthetic events."""

    ticks: int = 300
    events: tuple = ((30, ("tap", 40, 60)), (60, ("tap", 120, 40)), (90, ("tap", 80, 100)))
    rng_seed: int = 1
    timeout_ms: int = 10_000
    steps_per_ms: int = DEFAULT_STEPS_PER_MS


@dataclass
class InvariantLog:
    records: list[InvariantInstance]
    exit: str
    error_message: str = ""
    console: list[str] = field(default_factory=list)
    committed_state: str = "null"
    eval_texts: list[str] = field(default_factory=list)
    captured_names: set[str] = field(default_factory=set)
    denials: list[str] = field(default_factory=list)
    call_counts: dict[str, int] = field(default_factory=dict)
    fn_names: dict[str, str] = field(default_factory=dict)
    dynamic_probes: dict[str, ProbeEntry] = field(default_factory=dict)

    def to_jsonl(self) -> str:
        return "".join(rec.to_jsonl() + "\n" for rec in self.records)

    def output_hash(self) -> str:
        from ..util import fnv1a64_str, hex16

        text = "\n".join(self.console) + "\x00" + self.committed_state + "\x00" + self.exit
        return hex16(fnv1a64_str(text))


EvalHook = Callable[[str, int], tuple[Node, dict[str, ProbeEntry]]]
"""Maps decrypted/eval'd source text to an executable (possibly
instrumented) program node plus any probe entries it introduces."""


def default_eval_hook(code: str, round_no: int) -> tuple[Node, dict[str, ProbeEntry]]:
    """Plain parse: runtime-loaded code executes without extra probes."""
    return parse_text(code, "<eval>"), {}


def execute(
    program: InstrumentedProgram,
    stim: Stimulus = Stimulus(),
    round_no: int = 0,
    manifest: Optional[SandboxManifest] = None,
    eval_hook: Optional[EvalHook] = None,
    logging_enabled: bool = True,
) -> InvariantLog:
    """Run one instrumented program under the virtual host."""
    manifest = manifest or SandboxManifest()
    interp = Interpreter(fuel=max(1, stim.timeout_ms) * stim.steps_per_ms)
    state = HostState(stim.rng_seed, manifest)
    records: list[InvariantInstance] = []
    dynamic_probes: dict[str, ProbeEntry] = {}
    counter = {"t": 0}

    def log_invariant(i, this, args):
        value = args[1] if len(args) > 1 else UNDEFINED
        if logging_enabled:
            loc = to_string(args[0]) if args else ""
            canonical, tau = canonicalize_value(value, state.captured_names)
            records.append(InvariantInstance(loc, canonical, tau, counter["t"], round_no))
            counter["t"] += 1
        return value

    install_globals(interp, state, log_invariant)

    hook = eval_hook or default_eval_hook

    def interp_eval_hook(code: str) -> Node:
        node, probes = hook(code, round_no)
        dynamic_probes.update(probes)
        return node

    interp.eval_hook = interp_eval_hook

    trees = program.trees
    if not trees:
        trees = [parse_text(unit.text, unit.path) for unit in program.sources]

    exit_status = EXIT_COMPLETED
    error_message = ""
    events_by_tick: dict[int, list[tuple]] = {}
    for tick, descriptor in stim.events:
        events_by_tick.setdefault(int(tick), []).append(descriptor)

    try:
        for tree in trees:
            interp.run_program(tree)
        for tick in range(stim.ticks):
            state.clock_ms += DEFAULT_TICK_MS
            for _, _, fn, interval in state.due_timers():
                interp.call_function(fn, UNDEFINED, [])
                if interval is not None:
                    state.schedule(fn, interval, interval)
            for handler in list(state.tick_handlers):
                interp.call_function(handler, UNDEFINED, [float(tick)])
            for descriptor in events_by_tick.get(tick, ()):
                if descriptor[0] == "tap":
                    for handler in list(state.tap_handlers):
                        interp.call_function(
                            handler, UNDEFINED, [float(descriptor[1]), float(descriptor[2])]
                        )
    except OutOfFuel:
        exit_status = EXIT_TIMEOUT
        error_message = f"fuel exhausted after {stim.timeout_ms} virtual ms"
    except JSThrow as exc:
        exit_status = EXIT_RUNTIME_ERROR
        error_message = _describe_thrown(exc.value)
    except RecursionError:
        exit_status = EXIT_RUNTIME_ERROR
        error_message = "host recursion limit reached"

    committed, _ = canonicalize_value(state.committed, state.captured_names)
    return InvariantLog(
        records=records,
        exit=exit_status,
        error_message=error_message,
        console=state.console,
        committed_state=committed,
        eval_texts=list(interp.eval_texts),
        captured_names=set(state.captured_names),
        denials=list(state.denials),
        call_counts=dict(interp.call_counts),
        fn_names=dict(interp.fn_names),
        dynamic_probes=dynamic_probes,
    )


def _describe_thrown(value) -> str:
    if isinstance(value, JSObject) and value.class_name == "Error":
        name = value.props.get("name", "Error")
        message = value.props.get("message", "")
        return f"{to_string(name)}: {to_string(message)}"
    canonical, _ = canonicalize_value(value)
    return f"uncaught: {canonical}"


def run_source(
    text: str,
    stim: Stimulus = Stimulus(),
    manifest: Optional[SandboxManifest] = None,
    eval_hook: Optional[EvalHook] = None,
) -> InvariantLog:
    """Convenience: execute plain (un-instrumented) source text."""
    program = InstrumentedProgram([SourceUnit("<main>", text)], [], {})
    return execute(program, stim, 0, manifest, eval_hook)
