"""Command-line interface.

Exit codes for ``compare``: 0 clean, 1 error, 2 dynamic stage failed
(static-only result, inconclusive), 3 plagiarism.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .bench import METHODS, ObfuscationRecipe, generate_bench, obfuscate, write_variant
from .config import Config, load_config
from .corpus import CorpusIndex, corpus_scan, index_program
from .errors import MemfpError
from .metrics import evaluate
from .pipeline import EXIT_ERROR, compare, load_program
from .util import canonical_json


def _config_from(args) -> Config:
    path = getattr(args, "config", None) or os.environ.get("MDG_CONFIG")
    cfg = load_config(path)
    if getattr(args, "alpha", None) is not None:
        cfg = replace(cfg, alpha=args.alpha)
    if getattr(args, "zeta", None) is not None:
        cfg = replace(cfg, zeta=args.zeta)
    return cfg


def cmd_fingerprint(args) -> int:
    cfg = _config_from(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    index_path = out_dir / "index.json"
    index = CorpusIndex.load(index_path) if index_path.is_file() else CorpusIndex()
    artifacts = index_program(args.path, index, out_dir, cfg, timestamp=args.timestamp)
    index.save(index_path)
    print(f"fingerprinted {artifacts.program_id}: "
          f"{len(artifacts.mdg)} vertices, {len(artifacts.mdg.edges)} edges")
    return 0


def cmd_compare(args) -> int:
    cfg = _config_from(args)
    cache = Path(args.cache) if args.cache else None
    outcome = compare(args.a, args.b, cfg, force_dynamic=args.force_dynamic, cache_dir=cache)
    payload = outcome.report.to_dict()
    payload["meta"]["tool_version"] = __version__
    payload["meta"]["elapsed_s"] = round(outcome.elapsed_s, 6)
    payload["meta"]["sandbox_runs"] = outcome.sandbox_runs
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.report:
        Path(args.report).write_text(text + "\n", encoding="utf-8")
    print(text)
    return outcome.exit_code


def cmd_scan(args) -> int:
    cfg = _config_from(args)
    index = CorpusIndex.load(Path(args.index))
    hits, warnings = corpus_scan(args.suspect, index, args.top, cfg)
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)
    out = [
        {
            "rank": i + 1,
            "program_id": h.program_id,
            "final": h.report.final,
            "verdict": h.report.verdict,
            "tier": h.report.tier,
            "stale": h.stale,
        }
        for i, h in enumerate(hits)
    ]
    print(json.dumps(out, indent=2))
    return 0


def cmd_obfuscate(args) -> int:
    method = args.method.upper()
    if method == "ALL":
        written = generate_bench(Path(args.path), Path(args.out), seed=args.seed)
        print(f"generated {len(written)} variants under {args.out}")
        return 0
    if method not in METHODS:
        print(f"unknown method {args.method}; choose from {', '.join(METHODS)} or ALL", file=sys.stderr)
        return EXIT_ERROR
    _, units, _ = load_program(args.path)
    params = {}
    if method == "CKD":
        params["endpoint_path"] = f"/key/{Path(args.path).stem}"
    result = obfuscate(units, ObfuscationRecipe(method, args.seed, params))
    write_variant(result, Path(args.out))
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(f"wrote {method} variant to {args.out}")
    return 0


def cmd_eval(args) -> int:
    cfg = _config_from(args)
    metrics = evaluate(args.bench, cfg)
    text = canonical_json(metrics.to_dict())
    Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(f"precision={metrics.precision:.4f} recall={metrics.recall:.4f} "
          f"f1={metrics.f1:.4f} timing={metrics.timing_s_per_pair:.3f}s/pair")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="memfp",
        description="Behavioral plagiarism detection for ECMAScript mini-programs",
    )
    parser.add_argument("--version", action="version", version=f"memfp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fingerprint", help="fingerprint a program into a corpus store")
    p.add_argument("path")
    p.add_argument("--out", default="corpus", help="artifact/store directory")
    p.add_argument("--config")
    p.add_argument("--timestamp", default="", help="recorded in the index entry")
    p.set_defaults(func=cmd_fingerprint)

    p = sub.add_parser("compare", help="tiered pairwise comparison")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--alpha", type=float)
    p.add_argument("--zeta", type=float)
    p.add_argument("--report", help="write report JSON here")
    p.add_argument("--config")
    p.add_argument("--cache", help="artifact cache directory")
    p.add_argument("--force-dynamic", action="store_true",
                   help="skip the static short-circuit")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("scan", help="rank corpus entries against a suspect")
    p.add_argument("--suspect", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--config")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("obfuscate", help="generate an obfuscated variant (or ALL into a bench)")
    p.add_argument("path")
    p.add_argument("--method", required=True, help="|".join(METHODS) + "|ALL")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_obfuscate)

    p = sub.add_parser("eval", help="run the bench evaluation")
    p.add_argument("--bench", required=True)
    p.add_argument("--out", default="metrics.json")
    p.add_argument("--config")
    p.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MemfpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
