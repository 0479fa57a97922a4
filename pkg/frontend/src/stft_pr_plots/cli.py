"""`render --csv <path> --kind <kind> --out <path.png>`"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import RENDERERS, FigureJob, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render",
        description="Render a recovery-harness CSV table to a figure image.",
    )
    parser.add_argument("--csv", required=True, help="input CSV path")
    parser.add_argument(
        "--kind", required=True, choices=sorted(RENDERERS), help="which schema/figure to draw"
    )
    parser.add_argument("--out", required=True, help="output image path (.png)")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    job = FigureJob(csv_path=Path(args.csv), figure_kind=args.kind, out_path=Path(args.out))
    try:
        out = render(job)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
