"""Tier-1 static screen: token k-gram fingerprints and triage.

Cheap set-Jaccard over normalized token grams short-circuits obvious
clones before any sandboxed execution is attempted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import MismatchedK
from .source import NormalizedTree, emit_tokens
from .util import gram_hashes

DEFAULT_K = 5
DEFAULT_STATIC_HIGH = 0.95

STATIC_PLAGIARISM = "StaticPlagiarism"
PROCEED_DYNAMIC = "ProceedDynamic"


@dataclass(frozen=True)
class FingerprintSet:
    hashes: frozenset[int]
    token_count: int
    k: int


@dataclass(frozen=True)
class TriageDecision:
    outcome: str
    static_score: float


def token_fingerprint(tree: NormalizedTree, k: int = DEFAULT_K) -> FingerprintSet:
    """k-gram hash set over the normalized token stream."""
    if k < 1:
        raise ValueError("gram length must be >= 1")
    tokens = emit_tokens(tree.root)
    return FingerprintSet(frozenset(gram_hashes(tokens, k)), len(tokens), k)


def static_similarity(a: FingerprintSet, b: FingerprintSet) -> float:
    """Jaccard similarity; 1.0 when both sets are empty."""
    if a.k != b.k:
        raise MismatchedK(f"gram lengths differ: {a.k} vs {b.k}")
    if not a.hashes and not b.hashes:
        return 1.0
    union = len(a.hashes | b.hashes)
    if union == 0:
        return 1.0
    return len(a.hashes & b.hashes) / union


def triage(score: float, static_high_threshold: float = DEFAULT_STATIC_HIGH) -> TriageDecision:
    if score >= static_high_threshold:
        return TriageDecision(STATIC_PLAGIARISM, score)
    return TriageDecision(PROCEED_DYNAMIC, score)


def fingerprint_to_dict(fp: FingerprintSet) -> dict:
    return {
        "schema": "fingerprint@1",
        "k": fp.k,
        "token_count": fp.token_count,
        "hashes": sorted(format(h, "016x") for h in fp.hashes),
    }


def fingerprint_from_dict(data: dict) -> FingerprintSet:
    return FingerprintSet(
        frozenset(int(h, 16) for h in data["hashes"]),
        int(data["token_count"]),
        int(data["k"]),
    )
