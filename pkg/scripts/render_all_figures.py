#!/usr/bin/env python3
"""Render figures for every CSV produced by run_all_experiments.py.

Requires the companion stft-pr-plots package (see frontend/).
"""

import argparse
import sys
from pathlib import Path

try:
    from stft_pr_plots import FigureJob, render
except ImportError:
    print("stft-pr-plots is not installed; run `pip install -e frontend/`", file=sys.stderr)
    sys.exit(1)

KIND_BY_NAME = {
    "init_error_sweep.csv": "init_error_sweep",
    "basin.csv": "basin_of_attraction",
    "snr_sweep.csv": "snr_sweep",
    "loss_surface.csv": "loss_surface",
    "window_spectrum.csv": "window_spectrum",
    "certificates.csv": "theory_certificates",
}


def kind_for(path: Path):
    if path.name in KIND_BY_NAME:
        return KIND_BY_NAME[path.name]
    if path.name.endswith("_trace.csv") or path.name == "trace.csv":
        return "trace"
    if path.name.endswith("_overlay.csv"):
        return "overlay"
    return None


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--runs", default="runs", help="directory tree holding the CSVs")
    parser.add_argument("--out", default="figures", help="output directory for images")
    args = parser.parse_args()

    count = 0
    for csv_path in sorted(Path(args.runs).rglob("*.csv")):
        kind = kind_for(csv_path)
        if kind is None:
            continue
        out = Path(args.out) / csv_path.relative_to(args.runs).with_suffix(".png")
        render(FigureJob(csv_path=csv_path, figure_kind=kind, out_path=out))
        print(f"{csv_path} -> {out}")
        count += 1
    print(f"rendered {count} figures under {args.out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
