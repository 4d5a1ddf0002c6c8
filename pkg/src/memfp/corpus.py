"""Corpus index and suspect-against-corpus scanning."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .config import Config
from .mdg import MemoryDependencyGraph
from .pipeline import ProgramArtifacts, fingerprint_program
from .screen import fingerprint_from_dict, static_similarity, triage, STATIC_PLAGIARISM
from .similarity import SimilarityReport, plagiarism_score
from .util import canonical_json


@dataclass
class IndexEntry:
    program_id: str
    mdg_path: str
    fingerprint_path: str
    config_hash: str
    timestamp: str

    def to_dict(self) -> dict:
        return {
            "mdg_path": self.mdg_path,
            "fingerprint_path": self.fingerprint_path,
            "config_hash": self.config_hash,
            "timestamp": self.timestamp,
        }


class CorpusIndex:
    def __init__(self, entries: Optional[dict[str, IndexEntry]] = None):
        self.entries: dict[str, IndexEntry] = entries or {}

    def add(self, entry: IndexEntry) -> None:
        self.entries[entry.program_id] = entry

    def to_json(self) -> str:
        return canonical_json(
            {"schema": "corpus-index@1",
             "entries": {pid: e.to_dict() for pid, e in sorted(self.entries.items())}}
        )

    def save(self, path: Path) -> None:
        path.write_text(self.to_json(), encoding="utf-8")

    @staticmethod
    def load(path: Path) -> "CorpusIndex":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if data.get("schema") != "corpus-index@1":
            raise ValueError("unsupported corpus index schema")
        entries = {
            pid: IndexEntry(pid, e["mdg_path"], e["fingerprint_path"], e["config_hash"], e["timestamp"])
            for pid, e in data["entries"].items()
        }
        return CorpusIndex(entries)


def index_program(
    path: str | Path,
    index: CorpusIndex,
    store_dir: Path,
    config: Config = Config(),
    timestamp: str = "",
) -> ProgramArtifacts:
    """Fingerprint a program into the store and register it."""
    artifacts = fingerprint_program(path, config, store_dir)
    index.add(
        IndexEntry(
            program_id=artifacts.program_id,
            mdg_path=str(store_dir / f"{artifacts.program_id}.mdg.json"),
            fingerprint_path=str(store_dir / f"{artifacts.program_id}.fingerprint.json"),
            config_hash=artifacts.config_hash,
            timestamp=timestamp,
        )
    )
    return artifacts


@dataclass
class ScanHit:
    program_id: str
    report: SimilarityReport
    stale: bool = False


def corpus_scan(
    suspect_path: str | Path,
    index: CorpusIndex,
    top_n: int = 10,
    config: Config = Config(),
    cache_dir: Optional[Path] = None,
) -> tuple[list[ScanHit], list[str]]:
    """Screen the suspect against every index entry, run the dynamic
    comparison where warranted, and return hits ranked by final score."""
    warnings: list[str] = []
    if not index.entries:
        return [], warnings
    suspect = fingerprint_program(suspect_path, config, cache_dir)
    cfg_hash = config.config_hash()

    hits: list[ScanHit] = []
    for pid in sorted(index.entries):
        entry = index.entries[pid]
        stale = entry.config_hash != cfg_hash
        if stale:
            warnings.append(f"stale index entry (config hash mismatch): {pid}")
        fp = fingerprint_from_dict(
            json.loads(Path(entry.fingerprint_path).read_text(encoding="utf-8"))
        )
        score = static_similarity(suspect.fingerprint, fp)
        mdg = MemoryDependencyGraph.from_json(Path(entry.mdg_path).read_text(encoding="utf-8"))
        if triage(score, config.static_high_threshold).outcome == STATIC_PLAGIARISM:
            report = plagiarism_score(suspect.mdg, mdg, config.alpha, config.zeta)
            report.tier = "static"
            report.static_score = score
        else:
            size_class_match = _size_class_match(suspect.mdg, mdg)
            if score < config.static_floor and not size_class_match:
                continue
            report = plagiarism_score(suspect.mdg, mdg, config.alpha, config.zeta)
            report.static_score = score
        report.meta.update({"suspect": suspect.program_id, "original": pid})
        hits.append(ScanHit(pid, report, stale))
    hits.sort(key=lambda h: (-h.report.final, h.program_id))
    return hits[:top_n], warnings


def _size_class_match(a: MemoryDependencyGraph, b: MemoryDependencyGraph) -> bool:
    na, nb = len(a), len(b)
    if na == 0 or nb == 0:
        return na == nb
    ratio = na / nb if na > nb else nb / na
    return ratio <= 2.0
