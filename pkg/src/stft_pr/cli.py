"""Command-line front end.

Subcommands: simulate, recover, exp-init-error, exp-basin, exp-snr,
exp-example, exp-surface, exp-window, exp-certify.  Exit codes: 0 success,
1 flag/validation error, 2 runtime error (divergence, inadmissible window,
failed certificate).  The environment variable STFT_PR_SEED overrides the
default seed.  All outputs land under --out.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import experiments
from .forward import measure
from .initialization import (
    make_filter,
    recursive_recovery,
    spectral_init,
    unit_modulus_init,
)
from .model import (
    ProblemConfig,
    RecoveryError,
    TrialRecord,
    gaussian_window,
    measurements_to_json,
    random_signal,
    rectangular_window,
    relative_error,
    save_json,
    signal_to_json,
)
from .solver import GdOptions, gd_recover, gla_recover, write_trace


def _default_seed() -> int:
    env = os.environ.get("STFT_PR_SEED")
    return int(env) if env else 0


def _wide(prog):
    return argparse.HelpFormatter(prog, width=100)


def _add_problem_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, required=True, help="signal length N")
    p.add_argument("--window", choices=("rect", "gauss"), default="rect", help="window kind")
    p.add_argument("--w", type=int, default=None, help="window length W (rect)")
    p.add_argument("--sigma", type=float, default=None, help="window std dev (gauss)")
    p.add_argument("--l", type=int, default=1, help="hop between frames")
    p.add_argument("--snr-db", type=float, default=None, help="additive noise level in dB")
    p.add_argument(
        "--signal",
        choices=("real", "complex", "unit-modulus", "nonvanishing"),
        default="real",
        help="ground-truth signal model",
    )


def _add_common_flags(p: argparse.ArgumentParser, default_out: str) -> None:
    p.add_argument("--seed", type=int, default=None, help="RNG seed (env STFT_PR_SEED overrides the default 0)")
    p.add_argument("--out", type=str, default=default_out, help="output directory")
    p.add_argument("--quick", action="store_true", help="divide trial counts by 10")
    p.add_argument("--jobs", type=int, default=1, help="worker threads for experiment trials")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stft-pr",
        description="Phase retrieval from phaseless short-time Fourier transform measurements.",
        formatter_class=_wide,
    )
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("simulate", help="simulate measurements and write them as JSON", formatter_class=_wide)
    _add_problem_flags(p)
    _add_common_flags(p, "runs/simulate")

    p = sub.add_parser("recover", help="simulate measurements and run one recovery method", formatter_class=_wide)
    _add_problem_flags(p)
    p.add_argument(
        "--method",
        choices=("gd", "gla", "ls", "recursive", "unit-modulus"),
        default="gd",
        help="recovery method",
    )
    p.add_argument("--mu", type=float, default=5e-3, help="gradient step size (per-frame normalized)")
    p.add_argument("--iters", type=int, default=100_000, help="iteration budget")
    p.add_argument("--threshold-b", type=float, default=None, help="per-entry amplitude bound B")
    p.add_argument("--interp", choices=("linear", "cubic"), default="cubic", help="upsampling filter for L > 1")
    p.add_argument("--m-offset", type=int, default=1, help="diagonal offset M for unit-modulus recovery")
    _add_common_flags(p, "runs/recover")

    for name, help_text in (
        ("exp-init-error", "initialization error sweep over (W, L, interpolation)"),
        ("exp-basin", "basin-of-attraction study (perturbed starts)"),
        ("exp-snr", "recovery error vs SNR, gradient descent vs Griffin-Lim"),
        ("exp-example", "single noisy recovery with overlays and traces"),
        ("exp-surface", "loss surface over the first two coordinates"),
        ("exp-window", "window DFT magnitude tables"),
        ("exp-certify", "numerical certificates for the theoretical guarantees"),
    ):
        p = sub.add_parser(name, help=help_text, formatter_class=_wide)
        _add_common_flags(p, f"runs/{name.replace('exp-', '')}")

    return parser


def _make_config(args) -> ProblemConfig:
    if args.n < 2:
        raise ValueError("--n must be at least 2")
    if args.window == "rect":
        W = args.w if args.w is not None else max(2, (args.n + 1) // 2)
        window = rectangular_window(args.n, W)
    else:
        if args.sigma is None:
            raise ValueError("--sigma is required for --window gauss")
        window = gaussian_window(args.n, args.sigma)
    return ProblemConfig(N=args.n, window=window, L=args.l, snr_db=args.snr_db, seed=args.seed)


def _cmd_simulate(args) -> int:
    cfg = _make_config(args)
    x = random_signal(args.n, args.signal, args.seed)
    meas = measure(x, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_json(signal_to_json(x), out / "signal.json")
    save_json(measurements_to_json(meas), out / "measurements.json")
    print(f"wrote {out / 'signal.json'} and {out / 'measurements.json'}")
    return 0


def _cmd_recover(args) -> int:
    if args.n % args.l != 0:
        raise ValueError(f"hop {args.l} must divide N={args.n} for recovery")
    cfg = _make_config(args)
    x = random_signal(args.n, args.signal, args.seed)
    meas = measure(x, cfg)
    filt = make_filter(args.interp, args.l) if args.l > 1 else None
    record = None
    if args.method == "ls":
        estimate = spectral_init(meas, cfg, filt=filt)
        record = TrialRecord(
            config=cfg, method="ls_init", error=relative_error(estimate, x), iterations=0
        )
    elif args.method == "recursive":
        estimate = recursive_recovery(meas, cfg)
        record = TrialRecord(
            config=cfg, method="recursive", error=relative_error(estimate, x), iterations=0
        )
    elif args.method == "unit-modulus":
        estimate, eigenvalue = unit_modulus_init(meas, cfg, M=args.m_offset)
        record = TrialRecord(
            config=cfg,
            method="unit_modulus",
            error=relative_error(estimate, x),
            iterations=0,
            extra={"eigenvalue": eigenvalue},
        )
    else:
        x0 = spectral_init(meas, cfg, filt=filt)
        opts = GdOptions(
            mu=args.mu / cfg.n_frames, max_iter=args.iters, B=args.threshold_b
        )
        if args.method == "gd":
            start = np.real(x0) if args.signal == "real" else x0
            estimate, record = gd_recover(meas, cfg, start, opts, truth=x)
        else:
            estimate, record = gla_recover(meas, cfg, x0, opts, truth=x)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_json(signal_to_json(estimate), out / "estimate.json")
    save_json(signal_to_json(x), out / "truth.json")
    if record.loss_trace:
        write_trace(record, out / "trace.csv")
    print(f"method={args.method} relative_error={record.error:.6e} iterations={record.iterations}")
    return 0


def _cmd_experiment(args) -> int:
    name = args.command
    if name == "exp-init-error":
        spec = experiments.init_error_spec(quick=args.quick, seed=args.seed)
        experiments.run_init_error_sweep(spec, out_dir=args.out, jobs=args.jobs)
    elif name == "exp-basin":
        spec = experiments.basin_spec(quick=args.quick, seed=args.seed)
        experiments.run_basin_experiment(spec, out_dir=args.out, jobs=args.jobs)
    elif name == "exp-snr":
        spec = experiments.snr_spec(quick=args.quick, seed=args.seed)
        experiments.run_snr_sweep(spec, out_dir=args.out, jobs=args.jobs)
    elif name == "exp-example":
        spec = experiments.example_spec(seed=args.seed)
        experiments.run_single_example(spec, out_dir=args.out)
    elif name == "exp-surface":
        spec = experiments.surface_spec()
        experiments.sample_loss_surface(spec, out_dir=args.out)
    elif name == "exp-window":
        spec = experiments.window_spectrum_spec()
        experiments.run_window_spectrum(spec, out_dir=args.out)
    elif name == "exp-certify":
        spec = experiments.certificates_spec(quick=args.quick, seed=args.seed)
        results = experiments.run_theory_certificates(spec, out_dir=args.out)
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            print(f"{status} {r.name} (samples={r.samples}, worst_margin={r.worst_margin:.3e})")
            if r.detail:
                print(f"     {r.detail}")
        if not all(r.passed for r in results):
            raise RecoveryError("one or more certificates failed")
    else:
        raise ValueError(f"unknown command {name!r}")
    print(f"outputs written under {args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit code 2 for usage errors; remap to 1, keep 0 for --help
        return 0 if exc.code == 0 else 1
    if args.command is None:
        parser.print_help()
        return 1
    if getattr(args, "seed", None) is None:
        args.seed = _default_seed()
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "recover":
            return _cmd_recover(args)
        return _cmd_experiment(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RecoveryError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
