"""End-to-end composition: load a program, run the tiered comparison, and
persist fingerprint artifacts.

Tier 1 is the static token screen; only pairs it cannot resolve pay for
the dynamic pipeline (slice, execute, MDG, three-stage scoring).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .config import Config
from .errors import ExecutionFailure, MemfpError
from .instrument import ProbeEntry
from .mdg import MemoryDependencyGraph, build_mdg
from .sandbox import SandboxManifest
from .screen import (
    PROCEED_DYNAMIC,
    STATIC_PLAGIARISM,
    FingerprintSet,
    fingerprint_from_dict,
    fingerprint_to_dict,
    static_similarity,
    triage,
)
from .similarity import (
    VERDICT_CLEAN,
    VERDICT_PLAGIARISM,
    Matching,
    SimilarityReport,
    plagiarism_score,
)
from .slicer import AdaptiveSlicer, SliceResult
from .source import SourceUnit, emit_tokens, parse
from .util import canonical_json, gram_hashes

EXIT_CLEAN = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2
EXIT_PLAGIARISM = 3


@dataclass
class ProgramArtifacts:
    program_id: str
    fingerprint: FingerprintSet
    mdg: Optional[MemoryDependencyGraph] = None
    capture: dict = field(default_factory=dict)
    sandbox_runs: int = 0
    config_hash: str = ""


def load_program(path: str | Path) -> tuple[str, list[SourceUnit], SandboxManifest]:
    """A program is a single .js file or a directory of .js files with an
    optional assets/ subtree and endpoints.json registration sidecar."""
    p = Path(path)
    manifest = SandboxManifest()
    if p.is_file():
        units = [SourceUnit(p.name, p.read_text(encoding="utf-8"))]
        if (p.parent / "assets").is_dir():
            manifest.asset_root = p.parent / "assets"
        return p.stem, units, manifest
    if not p.is_dir():
        raise FileNotFoundError(f"program path not found: {path}")
    files = sorted(f for f in p.glob("*.js"))
    if not files:
        raise FileNotFoundError(f"no .js sources under {path}")
    units = [SourceUnit(f.name, f.read_text(encoding="utf-8")) for f in files]
    if (p / "assets").is_dir():
        manifest.asset_root = p / "assets"
    endpoints_file = p / "endpoints.json"
    if endpoints_file.is_file():
        data = json.loads(endpoints_file.read_text(encoding="utf-8"))
        manifest.endpoints = {k: bytes.fromhex(v) for k, v in data.items()}
    return p.name, units, manifest


def static_fingerprint(units: list[SourceUnit], k: int) -> FingerprintSet:
    """Program-level fingerprint: k-gram hashes over the concatenated
    normalized token streams of all source files."""
    tokens: list[str] = []
    for unit in units:
        tree = parse(unit)
        tokens.extend(emit_tokens(tree.root))
    return FingerprintSet(frozenset(gram_hashes(tokens, k)), len(tokens), k)


def _capture_from_slice(result: SliceResult) -> dict:
    string_values = sorted(
        {inst.v for inst in result.invariants if inst.tau == "String"}
    )
    captured_names: set[str] = set()
    eval_texts: list[str] = []
    for log in result.logs:
        captured_names |= log.captured_names
        for text in log.eval_texts:
            if text not in eval_texts:
                eval_texts.append(text)
    return {
        "eval_texts": eval_texts,
        "snapshot_names": sorted(captured_names),
        "string_values": string_values,
        "trace": result.trace_lines,
    }


def fingerprint_program(
    path: str | Path,
    config: Config = Config(),
    out_dir: Optional[Path] = None,
    use_cache: bool = True,
) -> ProgramArtifacts:
    """Full pipeline for one program; optionally persists artifacts.

    Cached artifacts are reused only when their config hash matches.
    """
    program_id, units, manifest = load_program(path)
    cfg_hash = config.config_hash()

    if out_dir is not None and use_cache:
        cached = _load_cached(out_dir, program_id, cfg_hash)
        if cached is not None:
            return cached

    fingerprint = static_fingerprint(units, config.gram_k)
    slicer = AdaptiveSlicer(
        units,
        lexicon=config.lexicon(),
        theta=config.theta,
        r_max=config.r_max,
        k_top=config.k_top,
        seed=config.seed,
        stim=config.stimulus(),
        manifest=manifest,
    )
    result = slicer.run()
    mdg = build_mdg(result, program_id, cfg_hash)
    artifacts = ProgramArtifacts(
        program_id=program_id,
        fingerprint=fingerprint,
        mdg=mdg,
        capture=_capture_from_slice(result),
        sandbox_runs=len(result.logs),
        config_hash=cfg_hash,
    )
    if out_dir is not None:
        _write_artifacts(artifacts, result, out_dir)
    return artifacts


def _artifact_paths(out_dir: Path, program_id: str) -> dict[str, Path]:
    base = out_dir / program_id
    return {
        "mdg": base.with_suffix(".mdg.json"),
        "fingerprint": base.with_suffix(".fingerprint.json"),
        "probes": base.with_suffix(".probes.json"),
        "invariants": base.with_suffix(".invariants.jsonl"),
        "capture": base.with_suffix(".capture.json"),
        "trace": base.with_suffix(".trace.log"),
    }


def _write_artifacts(artifacts: ProgramArtifacts, result: SliceResult, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = _artifact_paths(out_dir, artifacts.program_id)
    tmp: dict[Path, str] = {
        paths["mdg"]: artifacts.mdg.to_json(),
        paths["fingerprint"]: canonical_json(
            dict(fingerprint_to_dict(artifacts.fingerprint), config_hash=artifacts.config_hash)
        ),
        paths["probes"]: canonical_json(
            [entry.to_dict() for entry in sorted(result.probe_map.values(), key=lambda e: e.l)]
        ),
        paths["invariants"]: result.invariants.to_jsonl(),
        paths["capture"]: canonical_json(artifacts.capture),
        paths["trace"]: "\n".join(result.trace_lines) + "\n",
    }
    # all-or-nothing: stage to temp names, then rename
    staged = []
    try:
        for target, text in tmp.items():
            stage = target.with_name(target.name + ".tmp")
            stage.write_text(text, encoding="utf-8")
            staged.append((stage, target))
        for stage, target in staged:
            stage.replace(target)
    except Exception:
        for stage, _ in staged:
            stage.unlink(missing_ok=True)
        raise


def _load_cached(out_dir: Path, program_id: str, cfg_hash: str) -> Optional[ProgramArtifacts]:
    paths = _artifact_paths(out_dir, program_id)
    if not all(paths[k].is_file() for k in ("mdg", "fingerprint", "capture")):
        return None
    fp_data = json.loads(paths["fingerprint"].read_text(encoding="utf-8"))
    if fp_data.get("config_hash") != cfg_hash:
        return None
    mdg = MemoryDependencyGraph.from_json(paths["mdg"].read_text(encoding="utf-8"))
    if mdg.meta.get("config_hash") != cfg_hash:
        return None
    return ProgramArtifacts(
        program_id=program_id,
        fingerprint=fingerprint_from_dict(fp_data),
        mdg=mdg,
        capture=json.loads(paths["capture"].read_text(encoding="utf-8")),
        sandbox_runs=0,
        config_hash=cfg_hash,
    )


@dataclass
class CompareOutcome:
    report: SimilarityReport
    exit_code: int
    elapsed_s: float
    sandbox_runs: int


def _static_report(score: float, tier: str, alpha: float, zeta: float, meta: dict) -> SimilarityReport:
    verdict = VERDICT_PLAGIARISM if score > zeta else VERDICT_CLEAN
    return SimilarityReport(
        sim_node=score,
        sim_struct=score,
        hot_consistency=0.0,
        final=alpha * score + (1 - alpha) * score,
        alpha=alpha,
        zeta=zeta,
        verdict=verdict,
        matching=Matching([], ""),
        tier=tier,
        static_score=score,
        meta=meta,
    )


def compare(
    path_a: str | Path,
    path_b: str | Path,
    config: Config = Config(),
    force_dynamic: bool = False,
    cache_dir: Optional[Path] = None,
) -> CompareOutcome:
    """Tiered comparison: static screen first, dynamic pipeline only when
    the screen cannot already call the pair plagiarized."""
    start = time.perf_counter()
    id_a, units_a, _ = load_program(path_a)
    id_b, units_b, _ = load_program(path_b)
    meta = {"suspect": id_a, "original": id_b, "config_hash": config.config_hash()}

    fp_a = static_fingerprint(units_a, config.gram_k)
    fp_b = static_fingerprint(units_b, config.gram_k)
    score = static_similarity(fp_a, fp_b)
    decision = triage(score, config.static_high_threshold)
    if decision.outcome == STATIC_PLAGIARISM and not force_dynamic:
        report = _static_report(score, "static", config.alpha, config.zeta, meta)
        return CompareOutcome(report, EXIT_PLAGIARISM, time.perf_counter() - start, 0)

    try:
        art_a = fingerprint_program(path_a, config, cache_dir)
        art_b = fingerprint_program(path_b, config, cache_dir)
    except ExecutionFailure:
        report = _static_report(score, "static-fallback", config.alpha, config.zeta, meta)
        return CompareOutcome(report, EXIT_INCONCLUSIVE, time.perf_counter() - start, 0)

    report = plagiarism_score(art_a.mdg, art_b.mdg, config.alpha, config.zeta)
    report.tier = "dynamic"
    report.static_score = score
    report.meta.update(meta)
    code = EXIT_PLAGIARISM if report.verdict == VERDICT_PLAGIARISM else EXIT_CLEAN
    runs = art_a.sandbox_runs + art_b.sandbox_runs
    return CompareOutcome(report, code, time.perf_counter() - start, runs)
