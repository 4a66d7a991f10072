"""plotkit <kind> --in FILE [--in2 FILE] --out IMAGE

Renders one figure per invocation from campaign CSV files.  Exits nonzero
on schema mismatch or empty input, without writing an output file.
"""
from __future__ import annotations

import argparse
import sys

from .figures import KINDS, RENDERERS
from .io import EmptyInputError, SchemaError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plotkit",
                                     description="Campaign figure renderer")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="in_path", required=True,
                        help="primary input CSV")
    parser.add_argument("--in2", dest="in2_path", default=None,
                        help="secondary input CSV (arcs fit table / "
                             "floquet summary)")
    parser.add_argument("--out", required=True, help="output image path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    renderer = RENDERERS[args.kind]
    try:
        if args.kind in ("arcs", "spectrum"):
            h = renderer(args.in_path, args.out, args.in2_path)
        else:
            h = renderer(args.in_path, args.out)
    except (SchemaError, EmptyInputError) as exc:
        print(f"plotkit: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out} (manifest {h})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
