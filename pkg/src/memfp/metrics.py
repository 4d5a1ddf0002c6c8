"""Bench evaluation: pairwise similarity matrix, identifier recovery, and
detection precision/recall/F1 against bench ground truth."""

from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .config import Config
from .errors import MissingGroundTruth
from .pipeline import ProgramArtifacts, fingerprint_program, load_program
from .screen import STATIC_PLAGIARISM, static_similarity, triage
from .similarity import plagiarism_score
from .source import SourceUnit, parse

RECOVERY_METHODS = ("SS", "SAE", "LKD", "CKD")

_WORD_RE = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*")


@dataclass
class EvalMetrics:
    precision: float
    recall: float
    f1: float
    pairwise_table: dict[str, float]
    recovery_table: dict[str, float]
    timing_s_per_pair: float
    positives: int
    negatives: int
    true_positives: int
    false_positives: int
    false_negatives: int

    def to_dict(self) -> dict:
        return {
            "schema": "metrics@1",
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "pairwise": dict(sorted(self.pairwise_table.items())),
            "recovery": dict(sorted(self.recovery_table.items())),
            "timing_s_per_pair": self.timing_s_per_pair,
            "counts": {
                "positives": self.positives,
                "negatives": self.negatives,
                "tp": self.true_positives,
                "fp": self.false_positives,
                "fn": self.false_negatives,
            },
        }


def program_names(units: list[SourceUnit]) -> set[str]:
    """Identifiers and property names a program declares or addresses,
    under their original (pre-normalization) spellings."""
    names: set[str] = set()
    for unit in units:
        try:
            tree = parse(unit)
        except Exception:
            continue
        for node in tree.walk():
            if node.kind == "Ident":
                orig = node.meta.get("orig")
                if orig:
                    names.add(orig)
            elif node.kind in ("FuncDecl", "FuncExpr", "Catch"):
                orig = node.meta.get("orig_name")
                if orig:
                    names.add(orig)
            elif node.kind in ("Prop", "Member") and node.token:
                names.add(node.token)
    return names


def captured_names(variant_units: list[SourceUnit], capture: dict) -> set[str]:
    """Every name observable from the variant: its parseable sources, the
    eval-intercepted texts, snapshot property names, and identifier-shaped
    words inside logged string values."""
    names = program_names(variant_units)
    for text in capture.get("eval_texts", []):
        names |= program_names([SourceUnit("<eval>", text)])
        names |= set(_WORD_RE.findall(text))
    names |= set(capture.get("snapshot_names", []))
    for value in capture.get("string_values", []):
        names |= set(_WORD_RE.findall(value))
    return names


def recovery_rate(original_units: list[SourceUnit], variant_units: list[SourceUnit], capture: dict) -> float:
    eligible = program_names(original_units)
    if not eligible:
        return 1.0
    recovered = eligible & captured_names(variant_units, capture)
    return len(recovered) / len(eligible)


def _pair_score(
    art_a: ProgramArtifacts,
    art_b: ProgramArtifacts,
    config: Config,
) -> tuple[float, bool, float]:
    """(final score, flagged, dynamic seconds); static tier short-circuits."""
    score = static_similarity(art_a.fingerprint, art_b.fingerprint)
    if triage(score, config.static_high_threshold).outcome == STATIC_PLAGIARISM:
        return score, True, 0.0
    start = time.perf_counter()
    report = plagiarism_score(art_a.mdg, art_b.mdg, config.alpha, config.zeta)
    elapsed = time.perf_counter() - start
    return report.final, report.verdict == "Plagiarism", elapsed


def discover_bench(bench_dir: Path) -> dict[str, list[str]]:
    """fixture -> methods; requires recipes as ground-truth provenance."""
    bench_dir = Path(bench_dir)
    layout: dict[str, list[str]] = {}
    for fixture_dir in sorted(p for p in bench_dir.iterdir() if p.is_dir()):
        if fixture_dir.name.startswith("_"):
            continue
        if not (fixture_dir / "original").is_dir():
            continue
        methods = []
        for variant in sorted(p for p in fixture_dir.iterdir() if p.is_dir()):
            if variant.name == "original":
                continue
            if not (variant / "recipe.json").is_file():
                raise MissingGroundTruth(f"missing recipe.json under {variant}")
            methods.append(variant.name)
        if methods:
            layout[fixture_dir.name] = methods
    if not layout:
        raise MissingGroundTruth(f"no bench fixtures with original/ found under {bench_dir}")
    return layout


def evaluate(bench_dir: str | Path, config: Config = Config(), cache: bool = True) -> EvalMetrics:
    """Full bench evaluation.  All scores are deterministic; only the
    timing column varies run to run."""
    bench_dir = Path(bench_dir)
    layout = discover_bench(bench_dir)
    artifact_dir = bench_dir / "_artifacts" if cache else None

    originals: dict[str, ProgramArtifacts] = {}
    original_units: dict[str, list[SourceUnit]] = {}
    for fixture in layout:
        path = bench_dir / fixture / "original"
        originals[fixture] = fingerprint_program(path, config, artifact_dir and artifact_dir / fixture)
        _, units, _ = load_program(path)
        original_units[fixture] = units

    pairwise: dict[str, float] = {}
    recovery_acc: dict[str, list[float]] = {}
    dynamic_times: list[float] = []
    tp = fp = fn = 0
    positives = 0

    for fixture, methods in layout.items():
        for method in methods:
            variant_path = bench_dir / fixture / method
            variant_art = fingerprint_program(
                variant_path, config, artifact_dir and artifact_dir / fixture
            )
            final, flagged, elapsed = _pair_score(variant_art, originals[fixture], config)
            pairwise[f"{fixture}/{method}"] = final
            if elapsed > 0:
                dynamic_times.append(elapsed)
            positives += 1
            if flagged:
                tp += 1
            else:
                fn += 1
            if method in RECOVERY_METHODS:
                _, variant_units, _ = load_program(variant_path)
                rate = recovery_rate(original_units[fixture], variant_units, variant_art.capture)
                recovery_acc.setdefault(method, []).append(rate)

    fixtures = sorted(layout)
    negatives = 0
    for i, fa in enumerate(fixtures):
        for fb in fixtures[i + 1 :]:
            final, flagged, elapsed = _pair_score(originals[fa], originals[fb], config)
            pairwise[f"{fa}/vs/{fb}"] = final
            if elapsed > 0:
                dynamic_times.append(elapsed)
            negatives += 1
            if flagged:
                fp += 1

    precision = tp / (tp + fp) if (tp + fp) else 0.0
    recall = tp / (tp + fn) if (tp + fn) else 0.0
    f1 = 2 * precision * recall / (precision + recall) if (precision + recall) else 0.0
    recovery = {m: sum(v) / len(v) for m, v in sorted(recovery_acc.items())}
    timing = sum(dynamic_times) / len(dynamic_times) if dynamic_times else 0.0

    return EvalMetrics(
        precision=precision,
        recall=recall,
        f1=f1,
        pairwise_table=pairwise,
        recovery_table=recovery,
        timing_s_per_pair=timing,
        positives=positives,
        negatives=negatives,
        true_positives=tp,
        false_positives=fp,
        false_negatives=fn,
    )
