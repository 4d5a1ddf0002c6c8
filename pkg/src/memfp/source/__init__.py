"""Source model: parsing, normalization, locations, candidate enumeration."""

from .candidates import CandidateExpression, classify, enumerate_candidates, is_user_defined_callee
from .jsast import Node, ident, is_literal
from .normalize import (
    NormalizedTree,
    ScopedRenamer,
    SourceUnit,
    canon_number,
    normalize_parsed,
    parse,
)
from .parser import parse_text
from .serialize import emit_tokens, join_tokens, to_source

__all__ = [
    "CandidateExpression",
    "Node",
    "NormalizedTree",
    "ScopedRenamer",
    "SourceUnit",
    "canon_number",
    "classify",
    "emit_tokens",
    "enumerate_candidates",
    "ident",
    "is_literal",
    "is_user_defined_callee",
    "join_tokens",
    "normalize_parsed",
    "parse",
    "parse_text",
    "to_source",
]
