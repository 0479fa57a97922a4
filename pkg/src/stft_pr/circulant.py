"""FFT-diagonalized circulant products and pseudo-inverse solves.

A circulant matrix C with first column c satisfies C v = c (*) v (circular
convolution), so both the product and the least-squares solve reduce to
pointwise work on DFT spectra: O(N log N) instead of O(N^2) / O(N^3).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_SINGULAR_TOL = 1e-9


@dataclass(frozen=True)
class CirculantOperator:
    """Immutable circulant operator, cached with the DFT of its first column."""

    first_column: np.ndarray
    spectrum: np.ndarray

    @staticmethod
    def from_first_column(c: np.ndarray) -> "CirculantOperator":
        c = np.asarray(c)
        op = CirculantOperator(first_column=c, spectrum=np.fft.fft(c))
        op.first_column.setflags(write=False)
        op.spectrum.setflags(write=False)
        return op

    @property
    def n(self) -> int:
        return len(self.first_column)

    def dense(self) -> np.ndarray:
        """Materialize the N x N matrix; test/oracle use only."""
        n = self.n
        idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
        return self.first_column[idx]


def apply(op: CirculantOperator, v: np.ndarray) -> np.ndarray:
    """C v via IDFT(spectrum * DFT(v))."""
    v = np.asarray(v)
    if v.shape != (op.n,):
        raise ValueError(f"vector length {v.shape} does not match operator size {op.n}")
    return np.fft.ifft(op.spectrum * np.fft.fft(v))


def pinv_solve(op: CirculantOperator, y: np.ndarray, tol: float = DEFAULT_SINGULAR_TOL) -> np.ndarray:
    """Moore-Penrose solve C^+ y.

    Spectral modes with |spectrum| <= tol * max|spectrum| are treated as
    singular and zeroed, which is exactly the pseudo-inverse in the Fourier
    basis; for invertible C this is the plain inverse solve.
    """
    y = np.asarray(y)
    if y.shape != (op.n,):
        raise ValueError(f"vector length {y.shape} does not match operator size {op.n}")
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    s = op.spectrum
    cutoff = tol * np.max(np.abs(s))
    w = np.zeros_like(s)
    keep = np.abs(s) > cutoff
    w[keep] = np.conj(s[keep]) / np.abs(s[keep]) ** 2
    return np.fft.ifft(w * np.fft.fft(y))
