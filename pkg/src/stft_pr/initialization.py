"""Initialization and closed-form recovery from the diagonal least-squares solves.

Four constructions share the same backbone (solve the hop-1 circulant systems,
assemble a Hermitian approximation of the correlation matrix x x*, extract its
top eigenvector):

  * spectral_init_unit_hop: the hop-1 least-squares initializer; exact for
    admissible windows of length W >= ceil((N+1)/2).
  * spectral_init_upsampled: hop > 1; each diagonal is upsampled (expansion +
    smooth interpolation) to approximate the hop-1 data first.
  * unit_modulus_init: exact recovery of constant-modulus signals from just
    the offset-0 and offset-M diagonals.
  * recursive_recovery: exact recovery of non-vanishing signals by dividing
    consecutive entries of the offset-1 diagonal.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import circulant
from .forward import diagonal_system, solve_diagonal_system
from .model import (
    ConvergenceError,
    DegenerateInitWarning,
    InvalidWindowError,
    MeasurementSet,
    NearVanishingSignalError,
    ProblemConfig,
    distance,
    fix_global_phase,
)

POWER_TOL = 1e-10
POWER_MAX_ITER = 5000
# Noisy approximation matrices can have a nearly degenerate top pair, which
# the l1-shifted iteration resolves slowly; the initializers therefore run
# with a larger budget than the bare eigensolver default.
INIT_POWER_MAX_ITER = 50_000
VANISHING_TOL_FACTOR = 1e-6


def set_matrix_diagonal(X: np.ndarray, ell: int, values: np.ndarray) -> None:
    n = X.shape[0]
    i = np.arange(n)
    X[i, (i + ell) % n] = values


def get_matrix_diagonal(X: np.ndarray, ell: int) -> np.ndarray:
    n = X.shape[0]
    i = np.arange(n)
    return X[i, (i + ell) % n]


@dataclass(frozen=True)
class CorrelationApprox:
    """Hermitian approximation of x x*, filled diagonal by diagonal."""

    X0: np.ndarray
    populated_diagonals: frozenset

    @property
    def N(self) -> int:
        return self.X0.shape[0]


def assemble_correlation_approx(
    y_columns: dict, cfg: ProblemConfig, tol: float = circulant.DEFAULT_SINGULAR_TOL
) -> CorrelationApprox:
    """Least-squares solve per diagonal and Hermitian assembly.

    y_columns maps nonnegative offsets l to length-N right-hand sides.  The
    mirror diagonal -l is filled with the conjugate of the shifted solution,
    which for real data coincides with solving the -l system directly and
    keeps X0 exactly Hermitian.
    """
    N = cfg.N
    X0 = np.zeros((N, N), dtype=complex)
    populated = set()
    for ell, y in sorted(y_columns.items()):
        if ell < 0:
            raise ValueError("y_columns must be keyed by nonnegative offsets")
        sys = diagonal_system(ell, cfg, L=1)
        xhat = solve_diagonal_system(sys, y, tol=tol)
        set_matrix_diagonal(X0, ell, xhat)
        populated.add(ell)
        if ell > 0:
            set_matrix_diagonal(X0, -ell, np.roll(np.conj(xhat), ell))
            populated.add(-ell)
    return CorrelationApprox(X0=X0, populated_diagonals=frozenset(populated))


# ---------------------------------------------------------------------------
# eigenvector extraction


def principal_eigenvector(
    X0: np.ndarray,
    tol: float = POWER_TOL,
    max_iter: int = POWER_MAX_ITER,
    seed: int = 0,
) -> tuple[np.ndarray, float]:
    """Top (largest algebraic eigenvalue) unit eigenvector via power iteration.

    Iterates on X0 + c I with c the max column absolute sum, which dominates
    the spectral radius and so makes the target eigenvalue the largest in
    modulus.  The start vector is all-ones plus small seeded noise, so runs
    are deterministic and never orthogonal to the target by construction.
    Convergence is measured by the phase-invariant distance between
    successive iterates.  Returns the gauge-fixed eigenvector and the
    Rayleigh quotient with respect to X0 itself.
    """
    X0 = np.asarray(X0)
    n = X0.shape[0]
    shift = float(np.abs(X0).sum(axis=0).max())
    rng = np.random.default_rng(seed)
    v = np.ones(n, dtype=complex) + 0.01 * (
        rng.standard_normal(n) + 1j * rng.standard_normal(n)
    )
    v /= np.linalg.norm(v)
    if shift == 0.0:
        return fix_global_phase(v), 0.0

    A = X0 + shift * np.eye(n)
    converged = False
    for _ in range(max_iter):
        w = A @ v
        nrm = np.linalg.norm(w)
        if nrm == 0:
            raise ConvergenceError("power iteration hit the null space", residual=None)
        w /= nrm
        step = distance(w, v)[0]
        v = w
        if step <= tol:
            converged = True
            break
    lam = float(np.real(np.vdot(v, X0 @ v)))
    if not converged:
        residual = float(np.linalg.norm(X0 @ v - lam * v))
        raise ConvergenceError(
            f"power iteration did not converge in {max_iter} iterations",
            residual=residual,
        )
    return fix_global_phase(v), lam


def second_eigenvalue_estimate(
    X0: np.ndarray, v1: np.ndarray, lam1: float, **kwargs
) -> float:
    """Spectral-gap diagnostic: top eigenvalue of the deflated matrix."""
    deflated = X0 - lam1 * np.outer(v1, np.conj(v1))
    _, lam2 = principal_eigenvector(deflated, **kwargs)
    return lam2


# ---------------------------------------------------------------------------
# interpolation filters (hop > 1 upsampling)


@dataclass(frozen=True)
class InterpolationFilter:
    """Finite symmetric kernel h with h[0] = 1 and h[kL] = 0 for k != 0,
    so expansion followed by convolution keeps the known samples."""

    kind: str
    L: int
    taps: np.ndarray  # offsets -(len-1)/2 .. (len-1)/2

    @property
    def half_width(self) -> int:
        return (len(self.taps) - 1) // 2


def linear_filter(L: int) -> InterpolationFilter:
    """Triangular kernel 1 - |k|/L on |k| < L (linear interpolation)."""
    k = np.arange(-(L - 1), L)
    return InterpolationFilter(kind="linear", L=L, taps=1.0 - np.abs(k) / L)


def cubic_filter(L: int) -> InterpolationFilter:
    """Keys cubic-convolution kernel with a = -0.5, sampled at k/L, |k| < 2L."""
    a = -0.5
    k = np.arange(-(2 * L - 1), 2 * L)
    s = np.abs(k) / L
    taps = np.where(
        s <= 1.0,
        (a + 2.0) * s**3 - (a + 3.0) * s**2 + 1.0,
        np.where(s < 2.0, a * s**3 - 5.0 * a * s**2 + 8.0 * a * s - 4.0 * a, 0.0),
    )
    return InterpolationFilter(kind="cubic", L=L, taps=taps)


def make_filter(kind: str, L: int) -> InterpolationFilter:
    if kind == "linear":
        return linear_filter(L)
    if kind == "cubic":
        return cubic_filter(L)
    raise ValueError(f"unknown interpolation kind: {kind!r}")


def _expand(y_sub: np.ndarray, L: int, N: int) -> np.ndarray:
    """Zero-stuffing: place sample m at position m L (modulo N)."""
    stuffed = np.zeros(N, dtype=complex)
    positions = (np.arange(len(y_sub)) * L) % N
    stuffed[positions] = y_sub
    return stuffed


def upsample_diagonal(y_sub: np.ndarray, filt: InterpolationFilter, N: int) -> np.ndarray:
    """Expansion then circular convolution with the interpolation kernel."""
    stuffed = _expand(np.asarray(y_sub), filt.L, N)
    kernel = np.zeros(N)
    for offset, tap in zip(range(-filt.half_width, filt.half_width + 1), filt.taps):
        kernel[offset % N] += tap
    op = circulant.CirculantOperator.from_first_column(kernel)
    return circulant.apply(op, stuffed)


def ideal_lowpass_upsample(
    y_sub: np.ndarray, L: int, N: int, band: str = "one_sided"
) -> np.ndarray:
    """Expansion followed by exact low-pass interpolation (gain L on N/L bins).

    band "one_sided" keeps DFT bins [0, N/L); "centered" keeps the contiguous
    arc of N/L bins around zero.  Either choice inverts the downsampling
    exactly when the data's spectrum is supported on that arc.
    """
    if N % L != 0:
        raise ValueError("exact low-pass upsampling requires L | N")
    stuffed = _expand(np.asarray(y_sub), L, N)
    spec = np.fft.fft(stuffed)
    bins = N // L
    mask = np.zeros(N)
    if band == "one_sided":
        mask[:bins] = L
    elif band == "centered":
        mask[(np.arange(bins) - (bins - 1) // 2) % N] = L
    else:
        raise ValueError(f"unknown band: {band!r}")
    return np.fft.ifft(spec * mask)


# ---------------------------------------------------------------------------
# initializers


def _normalized_eigenvector_estimate(
    approx: CorrelationApprox, diag0: np.ndarray, seed: int, power_tol: float
) -> np.ndarray:
    """Scale the top eigenvector by the energy estimate from the offset-0 solve.

    Only the positive entries of the offset-0 solution contribute; under noise
    (or a singular offset-0 system) negative entries would otherwise corrupt
    the norm estimate.
    """
    diag0 = np.real(diag0)
    positive = diag0 > 0
    if not positive.any():
        warnings.warn(
            "offset-0 diagonal solve has no positive entries; returning the zero signal",
            DegenerateInitWarning,
        )
        return np.zeros(approx.N, dtype=complex)
    alpha = math.sqrt(float(diag0[positive].sum()))
    v, _ = principal_eigenvector(
        approx.X0, tol=power_tol, max_iter=INIT_POWER_MAX_ITER, seed=seed
    )
    return fix_global_phase(alpha * v)


def spectral_init_unit_hop(
    meas: MeasurementSet,
    cfg: ProblemConfig,
    seed: int = 0,
    power_tol: float = POWER_TOL,
) -> np.ndarray:
    """Hop-1 least-squares initialization.

    Solves every diagonal system with |l| <= W-1, assembles the correlation
    approximation, and returns its scaled top eigenvector.
    """
    if cfg.L != 1:
        raise ValueError("unit-hop initialization requires L = 1")
    y_columns = {ell: meas.Y[:, ell % cfg.N] for ell in range(cfg.window.W)}
    approx = assemble_correlation_approx(y_columns, cfg)
    return _normalized_eigenvector_estimate(
        approx, get_matrix_diagonal(approx.X0, 0), seed, power_tol
    )


def spectral_init_upsampled(
    meas: MeasurementSet,
    cfg: ProblemConfig,
    filt: Optional[InterpolationFilter] = None,
    seed: int = 0,
    power_tol: float = POWER_TOL,
) -> np.ndarray:
    """Hop > 1 initialization: upsample each diagonal, then proceed as hop 1.

    The hop-L diagonal data are the hop-1 data sampled at the frame positions,
    so each column is zero-stuffed and smoothed with the interpolation kernel
    before the hop-1 systems are solved.  Normalization uses the upsampled
    offset-0 column.
    """
    if cfg.L == 1:
        return spectral_init_unit_hop(meas, cfg, seed=seed, power_tol=power_tol)
    if filt is None:
        filt = cubic_filter(cfg.L)
    if filt.L != cfg.L:
        raise ValueError(f"filter upsampling factor {filt.L} does not match hop {cfg.L}")
    y_columns = {
        ell: upsample_diagonal(meas.Y[:, ell % cfg.N], filt, cfg.N)
        for ell in range(cfg.window.W)
    }
    approx = assemble_correlation_approx(y_columns, cfg)
    return _normalized_eigenvector_estimate(
        approx, get_matrix_diagonal(approx.X0, 0), seed, power_tol
    )


def spectral_init(
    meas: MeasurementSet,
    cfg: ProblemConfig,
    filt: Optional[InterpolationFilter] = None,
    seed: int = 0,
    power_tol: float = POWER_TOL,
) -> np.ndarray:
    """Dispatch to the hop-1 or upsampling initializer based on cfg.L."""
    if cfg.L == 1:
        return spectral_init_unit_hop(meas, cfg, seed=seed, power_tol=power_tol)
    return spectral_init_upsampled(meas, cfg, filt=filt, seed=seed, power_tol=power_tol)


def _require_admissible_offsets(cfg: ProblemConfig, offsets) -> None:
    for ell in offsets:
        spec = np.abs(diagonal_system(ell, cfg, L=1).spectrum)
        if spec.min() <= 1e-9 * spec.max():
            raise InvalidWindowError(
                f"window is not admissible at diagonal offset {ell}"
            )


def unit_modulus_init(
    meas: MeasurementSet, cfg: ProblemConfig, M: int = 1, seed: int = 0
) -> tuple[np.ndarray, float]:
    """Exact recovery of constant-modulus signals from diagonals 0 and M.

    The approximation matrix keeps only those two diagonals (as in the exact
    eigenvector construction, which makes a constant-modulus signal a top
    eigenvector with eigenvalue 2/N).  Returns the unit-norm gauge-fixed
    eigenvector and its eigenvalue.
    """
    if cfg.L != 1:
        raise ValueError("unit-modulus initialization requires L = 1")
    if not 1 <= M <= cfg.window.W - 1:
        raise ValueError(f"diagonal offset M={M} must satisfy 1 <= M <= W-1")
    _require_admissible_offsets(cfg, (0, M))
    N = cfg.N
    X0 = np.zeros((N, N), dtype=complex)
    for ell in (0, M):
        sys = diagonal_system(ell, cfg, L=1)
        set_matrix_diagonal(X0, ell, solve_diagonal_system(sys, meas.Y[:, ell % N]))
    v, lam = principal_eigenvector(X0, tol=1e-12, seed=seed)
    return fix_global_phase(v / np.linalg.norm(v)), lam


def recursive_recovery(meas: MeasurementSet, cfg: ProblemConfig) -> np.ndarray:
    """Entry-by-entry recovery of non-vanishing signals.

    Solves the offset-0 and offset-1 systems exactly, seeds |x[0]| from the
    offset-0 diagonal (phase fixed to zero), and walks the offset-1 diagonal:
    x1[n-1] = x[n-1] conj(x[n]), so x[n] = conj(x1[n-1] / x[n-1]).  Written
    with the conjugation explicit so complex signals keep a single global
    phase throughout; for real signals it reduces to plain division.
    """
    if cfg.L != 1:
        raise ValueError("recursive recovery requires L = 1")
    _require_admissible_offsets(cfg, (0, 1))
    N = cfg.N
    x0diag = np.real(
        solve_diagonal_system(diagonal_system(0, cfg, L=1), meas.Y[:, 0])
    )
    x1diag = solve_diagonal_system(diagonal_system(1, cfg, L=1), meas.Y[:, 1 % N])
    tau = VANISHING_TOL_FACTOR * math.sqrt(max(float(np.abs(x0diag).max()), 0.0))
    if x0diag[0] < 0:
        raise NearVanishingSignalError(
            "offset-0 solve is negative at index 0; cannot take a real square root",
            index=0,
        )
    x = np.zeros(N, dtype=complex)
    x[0] = math.sqrt(x0diag[0])
    if abs(x[0]) <= tau:
        raise NearVanishingSignalError("signal vanishes (or nearly) at index 0", index=0)
    for n in range(1, N):
        x[n] = np.conj(x1diag[n - 1] / x[n - 1])
        if abs(x[n]) <= tau:
            raise NearVanishingSignalError(
                f"signal vanishes (or nearly) at index {n}", index=n
            )
    return fix_global_phase(x)
