#!/usr/bin/env python3
"""Run every reference experiment with its default settings.

Writes CSV tables plus manifests under runs/ (one directory per experiment).
Pass --quick to divide trial counts by 10.
"""

import argparse
import sys
import time

import stft_pr.experiments as ex


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="runs")
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()

    jobs = args.jobs
    runners = [
        ("window", ex.window_spectrum_spec(), ex.run_window_spectrum, {}),
        ("surface", ex.surface_spec(), ex.sample_loss_surface, {}),
        ("init-error", ex.init_error_spec(quick=args.quick, seed=args.seed),
         ex.run_init_error_sweep, {"jobs": jobs}),
        ("example", ex.example_spec(seed=args.seed), ex.run_single_example, {}),
        ("snr", ex.snr_spec(quick=args.quick, seed=args.seed), ex.run_snr_sweep, {"jobs": jobs}),
        ("basin", ex.basin_spec(quick=args.quick, seed=args.seed),
         ex.run_basin_experiment, {"jobs": jobs}),
        ("certify", ex.certificates_spec(quick=args.quick, seed=args.seed),
         ex.run_theory_certificates, {}),
    ]
    for name, spec, runner, kwargs in runners:
        t0 = time.time()
        out_dir = f"{args.out}/{name}"
        result = runner(spec, out_dir=out_dir, **kwargs)
        print(f"{name}: done in {time.time() - t0:.1f}s -> {out_dir}")
        if name == "certify":
            bad = [r.name for r in result if not r.passed]
            if bad:
                print(f"certificate failures: {bad}", file=sys.stderr)
                return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
