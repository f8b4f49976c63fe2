"""Command-line entry point: one subcommand per pipeline stage.

Exit codes: 0 success, 1 stage failure (the failing stage is named and
its partial outputs quarantined), 2 invalid configuration or usage.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import load_config
from .errors import ConfigError
from .pipeline import STAGE_ORDER, StageError, run_all, run_stage

_HELP = {
    "ingest": "clean and tokenize the news corpus",
    "train": "train skip-gram embeddings on the tokenized corpus",
    "expand": "expand the lexicon's negative side for each configured n",
    "score": "score titles and build monthly sentiment indices",
    "prep": "HP-filter, normalize and smooth the monthly series",
    "ols": "fit the lagged-sentiment OLS grid",
    "var": "fit the VAR: lag selection, impulse responses, Granger tests",
    "report": "render figures from the run's artifacts",
    "all": "run every stage in order",
}


def _add_global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # On subparsers the default is SUPPRESS so a flag given before the
    # subcommand is not clobbered by the subparser's default.
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", default=default, metavar="FILE",
                        help="pipeline config JSON (required)")
    parser.add_argument("--seed", type=int, default=default,
                        help="override the config's random seed")
    parser.add_argument("--workers", type=int, default=default,
                        help="override the config's worker count")
    parser.add_argument("--out", default=default, metavar="DIR",
                        help="override the config's output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sentindex",
        description="News-sentiment index pipeline: corpus to embeddings to "
                    "lexicon expansion to monthly indices to VAR analysis.",
    )
    _add_global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _add_global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", metavar="subcommand")
    for name in (*STAGE_ORDER, "all"):
        sub.add_parser(name, parents=[common], help=_HELP[name],
                       description=_HELP[name])
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.command is None:
        parser.print_help(sys.stderr)
        return 2
    if ns.config is None:
        print("error: --config is required", file=sys.stderr)
        return 2
    try:
        cfg = load_config(ns.config, overrides={
            "seed": ns.seed, "workers": ns.workers, "out": ns.out,
        })
    except ConfigError as exc:
        print("configuration error:", file=sys.stderr)
        for message in exc.messages:
            print(f"  - {message}", file=sys.stderr)
        return 2
    try:
        if ns.command == "all":
            run_dir, artifacts = run_all(cfg)
        else:
            run_dir, artifacts = run_stage(ns.command, cfg)
    except StageError as exc:
        print(f"stage {exc.stage!r} failed: {exc}", file=sys.stderr)
        print(f"partial outputs (if any): {cfg.run_dir() / 'quarantine' / exc.stage}",
              file=sys.stderr)
        return 1
    print(f"run directory: {run_dir}")
    for rel in artifacts:
        print(f"  {rel}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
