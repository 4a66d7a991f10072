"""Command-line entry point: run/validate campaigns, list bundled recipes.

Exit codes: 0 success, 2 config error, 3 capacity error.
"""
from __future__ import annotations

import argparse
import sys

from .lattice import CapacityError
from .runner import (ConfigError, list_recipes, parse_config, recipe_path,
                     run, validate)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAPACITY = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="codelearn",
        description="Measured-surface-code simulation campaigns")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a campaign config")
    p_run.add_argument("--config", required=True,
                       help="INI config file or bundled recipe name")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override the master seed")
    p_run.add_argument("--threads", type=int, default=1)
    p_run.add_argument("--out", default=None, help="override the output directory")

    p_val = sub.add_parser("validate", help="dry-run resource check")
    p_val.add_argument("--config", required=True)

    sub.add_parser("list-recipes", help="print bundled recipe names")
    return parser


def _load(args) -> "ExperimentConfig":
    path = args.config
    if not str(path).endswith(".ini"):
        path = recipe_path(str(path) + ".ini")
    elif not __import__("pathlib").Path(path).exists():
        path = recipe_path(str(path))
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["master_seed"] = args.seed
    if getattr(args, "out", None):
        overrides["out"] = args.out
    return parse_config(path, overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list-recipes":
            for name in list_recipes():
                print(name)
            return EXIT_OK
        if args.command == "validate":
            config = _load(args)
            report = validate(config)
            print(report)
            return EXIT_OK if report.ok else EXIT_CAPACITY
        if args.command == "run":
            config = _load(args)
            manifest = run(config, threads=args.threads)
            print(f"wrote {sum(manifest.files.values())} rows in "
                  f"{len(manifest.files)} files to {config.out} "
                  f"({manifest.wall_clock_s}s, hash {manifest.manifest_hash})")
            return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
