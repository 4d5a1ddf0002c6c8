"""Sandboxed deterministic execution with a virtualized host."""

from .executor import (
    EXIT_COMPLETED,
    EXIT_RUNTIME_ERROR,
    EXIT_TIMEOUT,
    EvalHook,
    InvariantLog,
    Stimulus,
    execute,
    run_source,
)
from .host import HostState, MockKeyServer, SandboxManifest, install_globals
from .interp import Interpreter, JSThrow, OutOfFuel
from .values import UNDEFINED, JSArray, JSFunction, JSObject, canonicalize_value

__all__ = [
    "EXIT_COMPLETED",
    "EXIT_RUNTIME_ERROR",
    "EXIT_TIMEOUT",
    "EvalHook",
    "HostState",
    "Interpreter",
    "InvariantLog",
    "JSArray",
    "JSFunction",
    "JSObject",
    "JSThrow",
    "MockKeyServer",
    "OutOfFuel",
    "SandboxManifest",
    "Stimulus",
    "UNDEFINED",
    "canonicalize_value",
    "execute",
    "install_globals",
    "run_source",
]
