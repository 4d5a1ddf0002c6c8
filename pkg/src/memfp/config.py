"""Tool configuration: one auditable place for every tunable constant.

Plain INI (``key = value`` sections); every artifact is stamped with the
config hash so stale corpus entries are detectable.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path
from typing import Optional

from .sandbox import Stimulus
from .util import content_hash


@dataclass(frozen=True)
class Config:
    # similarity
    alpha: float = 0.5
    zeta: float = 0.6
    # slicing
    theta: float = 0.6
    r_max: int = 5
    k_top: int = 10
    seed: int = 1
    # static screen
    gram_k: int = 5
    static_high_threshold: float = 0.95
    static_floor: float = 0.05
    # executor
    ticks: int = 300
    rng_seed: int = 1
    timeout_ms: int = 10_000
    steps_per_ms: int = 500
    # paths
    lexicon_path: Optional[str] = None

    def stimulus(self) -> Stimulus:
        return Stimulus(
            ticks=self.ticks,
            rng_seed=self.rng_seed,
            timeout_ms=self.timeout_ms,
            steps_per_ms=self.steps_per_ms,
        )

    def lexicon(self) -> list[str]:
        if self.lexicon_path:
            text = Path(self.lexicon_path).read_text(encoding="utf-8")
        else:
            text = resources.files("memfp.data").joinpath("lexicon.txt").read_text("utf-8")
        return [line.strip().lower() for line in text.splitlines() if line.strip()]

    def config_hash(self) -> str:
        payload = {f.name: getattr(self, f.name) for f in fields(self)}
        payload["lexicon"] = self.lexicon()
        return content_hash(payload)


_SECTIONS = {
    "similarity": ["alpha", "zeta"],
    "slicing": ["theta", "r_max", "k_top", "seed"],
    "screen": ["gram_k", "static_high_threshold", "static_floor"],
    "executor": ["ticks", "rng_seed", "timeout_ms", "steps_per_ms"],
    "paths": ["lexicon_path"],
}

_FLOATS = {"alpha", "zeta", "theta", "static_high_threshold", "static_floor"}
_INTS = {"r_max", "k_top", "seed", "gram_k", "ticks", "rng_seed", "timeout_ms", "steps_per_ms"}


def load_config(path: Optional[str | Path] = None) -> Config:
    """Defaults, optionally overridden by an INI file."""
    cfg = Config()
    if path is None:
        return cfg
    parser = configparser.ConfigParser()
    read = parser.read(str(path))
    if not read:
        raise FileNotFoundError(f"config file not found: {path}")
    overrides = {}
    for section, keys in _SECTIONS.items():
        if not parser.has_section(section):
            continue
        for key in keys:
            if not parser.has_option(section, key):
                continue
            raw = parser.get(section, key)
            if key in _FLOATS:
                overrides[key] = float(raw)
            elif key in _INTS:
                overrides[key] = int(raw)
            else:
                overrides[key] = raw
    return replace(cfg, **overrides)


def dump_config(cfg: Config) -> str:
    lines = []
    for section, keys in _SECTIONS.items():
        lines.append(f"[{section}]")
        for key in keys:
            value = getattr(cfg, key)
            if value is not None:
                lines.append(f"{key} = {value}")
        lines.append("")
    return "\n".join(lines)
