"""The measurement operator: windowed spectra, intensity data, and the
per-diagonal linear systems they induce.

Index conventions (everything is periodic modulo N):

    frame m sits at time position p = m L mod N,
    X[m, k]  = sum_n x[n] g[p - n] e^{-2 pi j k n / N},
    Z[m, k]  = |X[m, k]|^2,
    Y[m, l]  = (1/N) sum_k Z[m, k] e^{-2 pi j k l / N}
             = sum_n x[n] conj(x[n+l]) g[p - n] g[p - n - l].

For a fixed diagonal offset l the map x_l[n] = x[n] conj(x[n+l]) -> y_l is
linear with kernel c_l[s] = g[s] g[s-l]: y_l[m] = (c_l (*) x_l)[m L].  With
hop 1 that is a circulant system; larger hops subsample its rows.  Every
operation here routes through that single kernel definition, and the test
suite pins it against literal O(N^2) summation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import circulant
from .model import MeasurementSet, ProblemConfig, WindowSpec, add_noise

ADMISSIBILITY_TOL = 1e-9


def shifted_window_product(g: np.ndarray, ell: int) -> np.ndarray:
    """Kernel c_l[n] = g[n] g[n-l] of the diagonal-l system (periodic shift)."""
    g = np.asarray(g)
    return g * np.roll(g, ell)


def windowed_frames(x: np.ndarray, cfg: ProblemConfig) -> np.ndarray:
    """Rows x[n] g[p - n] for each frame position p, shape (n_frames, N)."""
    x = np.asarray(x)
    n = np.arange(cfg.N)
    idx = (cfg.frame_positions[:, None] - n[None, :]) % cfg.N
    return x[None, :] * cfg.window.values[idx]


def stft(x: np.ndarray, cfg: ProblemConfig) -> np.ndarray:
    """Windowed spectra X[m, k], computed as row-wise FFTs."""
    x = np.asarray(x)
    if x.shape != (cfg.N,):
        raise ValueError(f"signal length {x.shape} does not match N={cfg.N}")
    return np.fft.fft(windowed_frames(x, cfg), axis=1)


def measure(x: np.ndarray, cfg: ProblemConfig, noise_seed: int = None) -> MeasurementSet:
    """Intensity measurements of x; applies cfg.snr_db noise when set."""
    Z = np.abs(stft(x, cfg)) ** 2
    meas = MeasurementSet.from_intensity(Z)
    if cfg.snr_db is not None:
        seed = cfg.seed if noise_seed is None else noise_seed
        meas = add_noise(meas, cfg.snr_db, seed)
    return meas


def correlation_transform(Z: np.ndarray) -> np.ndarray:
    """Per-row DFT of the intensities, normalized by 1/N: the matrix Y."""
    Z = np.asarray(Z)
    return np.fft.fft(Z, axis=1) / Z.shape[1]


def measurement_form(z: np.ndarray, m: int, ell: int, cfg: ProblemConfig) -> complex:
    """The quadratic form z* H_{m,l} z behind entry Y[m, l].

    Evaluated as sum_u z[u] conj(z[u+l]) c_l[mL - u]: pointwise products and
    one circular shift, never the dense N x N operator.
    """
    z = np.asarray(z)
    N = cfg.N
    if not (-(cfg.window.W - 1) <= ell <= cfg.window.W - 1):
        raise ValueError(f"diagonal offset {ell} outside [-(W-1), W-1]")
    c = shifted_window_product(cfg.window.values, ell)
    p = z * np.conj(np.roll(z, -ell))
    pos = int(cfg.frame_positions[m])
    return complex(np.sum(p * c[(pos - np.arange(N)) % N]))


@dataclass(frozen=True)
class DiagonalSystem:
    """Linear system y_l = G_l x_l for one diagonal offset.

    For hop 1 this is the circulant with first column c_l; for larger hops the
    operator keeps only the rows at the frame positions.
    """

    ell: int
    first_column: np.ndarray
    spectrum: np.ndarray
    rows: int
    L: int

    @property
    def N(self) -> int:
        return len(self.first_column)

    @property
    def row_positions(self) -> np.ndarray:
        return (np.arange(self.rows) * self.L) % self.N

    def dense(self) -> np.ndarray:
        """Materialized rows-x-N matrix; test/oracle use only."""
        idx = (self.row_positions[:, None] - np.arange(self.N)[None, :]) % self.N
        return self.first_column[idx]


def diagonal_system(ell: int, cfg: ProblemConfig, L: int = None) -> DiagonalSystem:
    """Build the diagonal-l system for cfg; L overrides the hop (the
    initialization algorithms always solve the hop-1 systems)."""
    if not (-(cfg.window.W - 1) <= ell <= cfg.window.W - 1):
        raise ValueError(f"diagonal offset {ell} outside [-(W-1), W-1]")
    L = cfg.L if L is None else L
    c = shifted_window_product(cfg.window.values, ell)
    rows = -(-cfg.N // L)
    return DiagonalSystem(
        ell=ell, first_column=c, spectrum=np.fft.fft(c), rows=rows, L=L
    )


def apply_diagonal_system(sys: DiagonalSystem, v: np.ndarray) -> np.ndarray:
    """G_l v: full circular convolution, then the frame-position rows."""
    full = np.fft.ifft(sys.spectrum * np.fft.fft(v))
    return full[sys.row_positions]


def adjoint_diagonal_system(sys: DiagonalSystem, w: np.ndarray) -> np.ndarray:
    """G_l^* w for length-rows w (zero-stuff rows back to length N)."""
    full = np.zeros(sys.N, dtype=complex)
    full[sys.row_positions] = w
    return np.fft.ifft(np.conj(sys.spectrum) * np.fft.fft(full))


def solve_diagonal_system(
    sys: DiagonalSystem, y: np.ndarray, tol: float = circulant.DEFAULT_SINGULAR_TOL
) -> np.ndarray:
    """Pseudo-inverse solve of a hop-1 (square circulant) system."""
    if sys.rows != sys.N:
        raise ValueError("direct solves are defined for hop-1 systems only")
    op = circulant.CirculantOperator(first_column=sys.first_column, spectrum=sys.spectrum)
    return circulant.pinv_solve(op, y, tol=tol)


def is_admissible(window: WindowSpec, tol: float = ADMISSIBILITY_TOL) -> tuple[bool, float]:
    """Whether every diagonal system of the window is invertible.

    Checks, for each offset l in [-(W-1), W-1], that the DFT of g (.) shift(g)
    has no entry of modulus below tol times that spectrum's peak.  Returns the
    verdict and the worst-case modulus found (absolute units).
    """
    ok = True
    margin = np.inf
    for ell in range(-(window.W - 1), window.W):
        spec = np.abs(np.fft.fft(shifted_window_product(window.values, ell)))
        peak = spec.max()
        margin = min(margin, spec.min())
        if peak == 0 or spec.min() <= tol * peak:
            ok = False
    return ok, float(margin)
