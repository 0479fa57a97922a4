"""Non-convex least-squares recovery: loss, gradient, gradient descent with
optional thresholding, and the Griffin-Lim baseline.

The loss is

    f(z) = 1/2 sum_m sum_{|l| <= W-1} |q_{m,l}(z) - Y[m, l]|^2,

where q_{m,l}(z) = z* H_{m,l} z is the quadratic measurement form.  All
per-(m, l) terms are evaluated in one batch of FFTs over the diagonal
kernels, so one loss or gradient evaluation costs O(W N log N); nothing ever
materializes an N x N operator.  Reductions are plain numpy sums over arrays
in a fixed layout, so traces are bit-reproducible.

For real iterates the gradient is the real gradient
sum (q - Re Y) (H + H^T) z and the iterates stay real.  For complex iterates
it is the conjugate-coordinate (Wirtinger) gradient, defined by the property
that the directional derivative along any perturbation delta equals
2 Re <grad, delta>; the finite-difference suite pins both conventions.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .forward import shifted_window_product, stft
from .model import (
    DivergenceError,
    InvalidWindowError,
    MeasurementSet,
    ProblemConfig,
    TrialRecord,
    fix_global_phase,
    relative_error,
)

DIVERGENCE_FACTOR = 1e6
LOSS_FLOOR_FACTOR = 1e-22
STALL_WINDOW = 10


@dataclass(frozen=True)
class GdOptions:
    """Gradient-descent settings: step size, iteration budget, optional
    per-entry threshold B, and the stall tolerance on relative loss change.

    divergence_factor controls the abort guard (loss above this multiple of
    its initial value raises DivergenceError); experiment drivers tighten it
    to detect step-size instability early and back off.
    """

    mu: float = 5e-3
    max_iter: int = 100_000
    B: Optional[float] = None
    stop_tol: float = 1e-12
    record_trace: bool = True
    divergence_factor: float = DIVERGENCE_FACTOR

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError("step size mu must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.B is not None and self.B <= 0:
            raise ValueError("threshold B must be positive when given")
        if self.stop_tol < 0:
            raise ValueError("stop_tol must be nonnegative")
        if self.divergence_factor <= 1:
            raise ValueError("divergence_factor must exceed 1")


class _LossContext:
    """Precomputed diagonal kernels, spectra and index maps for one problem."""

    def __init__(self, meas: MeasurementSet, cfg: ProblemConfig):
        W, N = cfg.window.W, cfg.N
        self.cfg = cfg
        self.ells = np.arange(-(W - 1), W)
        kernels = np.stack(
            [shifted_window_product(cfg.window.values, ell) for ell in self.ells]
        )
        self.spectra = np.fft.fft(kernels, axis=1)
        self.positions = cfg.frame_positions
        self.Ycols = meas.Y[:, self.ells % N].T  # (n_offsets, n_frames)
        n = np.arange(N)
        self.idx_plus = (n[None, :] + self.ells[:, None]) % N  # z[n + l]
        self.idx_minus = (n[None, :] - self.ells[:, None]) % N  # v[n - l]

    def residuals(self, z: np.ndarray) -> np.ndarray:
        """q_{m,l}(z) - Y[m,l] for all offsets and frames, shape (n_offsets, n_frames)."""
        p = z[None, :] * np.conj(z[self.idx_plus])
        q = np.fft.ifft(np.fft.fft(p, axis=1) * self.spectra, axis=1)[:, self.positions]
        return q - self.Ycols

    def loss_value(self, r: np.ndarray) -> float:
        return 0.5 * float(np.sum(np.abs(r) ** 2))

    def _frame_adjoint(self, weights: np.ndarray) -> np.ndarray:
        """s_l[u] = sum_m w_{m,l} c_l[mL - u] for every offset, via FFTs."""
        full = np.zeros((len(self.ells), self.cfg.N), dtype=complex)
        full[:, self.positions] = weights
        return np.fft.ifft(np.fft.fft(full, axis=1) * np.conj(self.spectra), axis=1)

    def gradient(self, z: np.ndarray, r: np.ndarray) -> np.ndarray:
        real_path = np.isrealobj(z)
        if real_path:
            w1 = w2 = r.real
        else:
            w1, w2 = 0.5 * np.conj(r), 0.5 * r
        s1 = self._frame_adjoint(w1)
        s2 = s1 if real_path else self._frame_adjoint(w2)
        rows = np.arange(len(self.ells))[:, None]
        term1 = (z[None, :] * s1)[rows, self.idx_minus].sum(axis=0)
        term2 = (z[self.idx_plus] * s2).sum(axis=0)
        grad = term1 + term2
        return grad.real if real_path else grad


def loss(z: np.ndarray, meas: MeasurementSet, cfg: ProblemConfig) -> float:
    ctx = _LossContext(meas, cfg)
    return ctx.loss_value(ctx.residuals(np.asarray(z)))


def gradient(z: np.ndarray, meas: MeasurementSet, cfg: ProblemConfig) -> np.ndarray:
    z = np.asarray(z)
    ctx = _LossContext(meas, cfg)
    return ctx.gradient(z, ctx.residuals(z))


def threshold(z: np.ndarray, B: float) -> np.ndarray:
    """Per-entry projection onto {|z[n]| <= B}, preserving phases (signs)."""
    z = np.asarray(z)
    if np.isrealobj(z):
        return np.clip(z, -B, B)
    mag = np.abs(z)
    over = mag > B
    out = z.copy()
    out[over] *= B / mag[over]
    return out


def gd_recover(
    meas: MeasurementSet,
    cfg: ProblemConfig,
    x0: np.ndarray,
    opts: GdOptions = GdOptions(),
    truth: Optional[np.ndarray] = None,
) -> tuple[np.ndarray, TrialRecord]:
    """Gradient descent from x0, with optional per-entry thresholding.

    Stops at max_iter or once the relative loss change stays below stop_tol
    for 10 consecutive iterations.  Raises DivergenceError when the loss
    becomes non-finite or exceeds 1e6 times its initial value.  When truth is
    given, a per-iterate relative-error trace is recorded alongside the loss.
    """
    t0 = time.perf_counter()
    z = np.asarray(x0).copy()
    ctx = _LossContext(meas, cfg)
    loss_trace, error_trace = [], []
    r = ctx.residuals(z)
    f_prev = ctx.loss_value(r)
    f_init = f_prev
    if opts.record_trace:
        loss_trace.append(f_prev)
        if truth is not None:
            error_trace.append(relative_error(z, truth))
    stall = 0
    iterations = 0
    for k in range(1, opts.max_iter + 1):
        z = z - opts.mu * ctx.gradient(z, r)
        if opts.B is not None:
            z = threshold(z, opts.B)
        r = ctx.residuals(z)
        f = ctx.loss_value(r)
        iterations = k
        if opts.record_trace:
            loss_trace.append(f)
            if truth is not None:
                error_trace.append(relative_error(z, truth))
        if not math.isfinite(f) or f > opts.divergence_factor * max(f_init, 1e-300):
            raise DivergenceError(
                f"gradient descent diverged at iteration {k} (loss {f:.3e})",
                iteration=k,
            )
        if f <= LOSS_FLOOR_FACTOR * f_init:
            break  # at the numerical floor, where relative changes are noise
        rel_change = abs(f - f_prev) / max(f_prev, 1e-300)
        stall = stall + 1 if rel_change < opts.stop_tol else 0
        f_prev = f
        if stall >= STALL_WINDOW:
            break
    estimate = fix_global_phase(z)
    record = TrialRecord(
        config=cfg,
        method="gd",
        error=relative_error(estimate, truth) if truth is not None else math.nan,
        iterations=iterations,
        loss_trace=loss_trace if opts.record_trace else None,
        error_trace=error_trace if (opts.record_trace and truth is not None) else None,
        wall_time=time.perf_counter() - t0,
    )
    return estimate, record


def zero_phase_start(meas: MeasurementSet, cfg: ProblemConfig) -> np.ndarray:
    """Classical starting point for the alternating-projection baseline: the
    least-squares synthesis of the measured magnitudes with all-zero phases."""
    target = np.sqrt(np.maximum(meas.Z, 0.0))
    weights = cfg.window.values[
        (cfg.frame_positions[:, None] - np.arange(cfg.N)[None, :]) % cfg.N
    ]
    denom = (weights**2).sum(axis=0)
    if denom.min() <= 0:
        raise InvalidWindowError(
            "window frames do not cover the signal: zero synthesis denominator"
        )
    frames = np.fft.ifft(target, axis=1)
    return (weights * frames).sum(axis=0) / denom


def gla_recover(
    meas: MeasurementSet,
    cfg: ProblemConfig,
    x0: np.ndarray,
    opts: GdOptions = GdOptions(),
    truth: Optional[np.ndarray] = None,
) -> tuple[np.ndarray, TrialRecord]:
    """Griffin-Lim baseline: alternating magnitude projection and least-squares
    inverse windowing (overlap-add with denominator sum_m g^2[mL - n]).

    The recorded "loss" trace is the measurement-domain residual
    ||sqrt(Z) - |stft(z)|||_F, which is non-increasing for this scheme.
    """
    t0 = time.perf_counter()
    target = np.sqrt(np.maximum(meas.Z, 0.0))
    weights = cfg.window.values[
        (cfg.frame_positions[:, None] - np.arange(cfg.N)[None, :]) % cfg.N
    ]
    denom = (weights**2).sum(axis=0)
    if denom.min() <= 0:
        raise InvalidWindowError(
            "window frames do not cover the signal: zero synthesis denominator"
        )
    z = np.asarray(x0).astype(complex)
    loss_trace, error_trace = [], []
    res_prev = None
    stall = 0
    iterations = 0
    for k in range(1, opts.max_iter + 1):
        X = stft(z, cfg)
        residual = float(np.linalg.norm(target - np.abs(X)))
        mag = np.abs(X)
        phases = np.where(mag > 0, X / np.where(mag > 0, mag, 1.0), 1.0)
        frames = np.fft.ifft(target * phases, axis=1)
        z = (weights * frames).sum(axis=0) / denom
        iterations = k
        if opts.record_trace:
            loss_trace.append(residual)
            if truth is not None:
                error_trace.append(relative_error(z, truth))
        if res_prev is not None:
            rel_change = abs(residual - res_prev) / max(res_prev, 1e-300)
            stall = stall + 1 if rel_change < opts.stop_tol else 0
            if stall >= STALL_WINDOW:
                break
        res_prev = residual
    estimate = fix_global_phase(z)
    record = TrialRecord(
        config=cfg,
        method="gla",
        error=relative_error(estimate, truth) if truth is not None else math.nan,
        iterations=iterations,
        loss_trace=loss_trace if opts.record_trace else None,
        error_trace=error_trace if (opts.record_trace and truth is not None) else None,
        wall_time=time.perf_counter() - t0,
    )
    return estimate, record


def write_trace(record: TrialRecord, path) -> None:
    """Per-iteration CSV: (iter, loss, error); error column empty without truth."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "loss", "error"])
        losses = record.loss_trace or []
        errors = record.error_trace or []
        for i, f in enumerate(losses):
            err = errors[i] if i < len(errors) else ""
            writer.writerow([i, repr(float(f)), repr(float(err)) if err != "" else ""])
