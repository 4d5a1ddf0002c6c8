"""Exception types shared across the pipeline."""

from __future__ import annotations


class MemfpError(Exception):
    """Base class for all tool errors."""


class JsSyntaxError(MemfpError):
    """Unparseable source; carries file/line/column."""

    def __init__(self, message: str, path: str = "<source>", line: int = 0, column: int = 0):
        self.path = path
        self.line = line
        self.column = column
        super().__init__(f"{path}:{line}:{column}: {message}")


class UnsupportedConstruct(MemfpError):
    """Syntactically valid input using a construct outside the supported subset."""

    def __init__(self, message: str, path: str = "<source>", line: int = 0, column: int = 0):
        self.path = path
        self.line = line
        self.column = column
        super().__init__(f"{path}:{line}:{column}: {message}")


class MismatchedK(MemfpError):
    """Fingerprint sets built with different gram lengths."""


class RewriteConflict(MemfpError):
    """Two probes target the same syntax node."""


class ScopeNotFound(MemfpError):
    """A hot object's declaration site cannot be located in the sources."""


class AtRoot(MemfpError):
    """Scope expansion requested for an object already at program scope."""


class SandboxDenied(MemfpError):
    """Host access outside the sandbox manifest."""


class ExecutionFailure(MemfpError):
    """Sandboxed execution could not produce a usable invariant set."""


class StaleIndex(MemfpError):
    """Corpus index entry built under a different configuration."""


class MissingGroundTruth(MemfpError):
    """Bench evaluation requested without ground-truth labels."""
