"""Core data types, the phase-invariant error metric, and noise injection.

Signals are plain numpy vectors (float for real signals, complex otherwise).
All randomness goes through numpy's PCG64 generator so that experiments
replay bit-for-bit across machines given the same seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np


class RecoveryError(Exception):
    """Base class for runtime failures of the recovery algorithms."""


class ConvergenceError(RecoveryError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DivergenceError(RecoveryError):
    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


class NearVanishingSignalError(RecoveryError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class InvalidWindowError(RecoveryError):
    pass


class DegenerateInitWarning(UserWarning):
    """Raised when the normalization set P is empty and a zero signal is returned."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class WindowSpec:
    """Analysis window g, materialized at ambient length N with periodic indexing.

    kind   : "rectangular", "gaussian" or "custom"
    W      : support length in samples (g[n] = 0 outside [0, W-1] for the
             rectangular and gaussian kinds; custom windows may be full length)
    sigma  : standard deviation in samples, gaussian kind only
    values : the length-N window samples
    """

    kind: str
    W: int
    values: np.ndarray
    N: int
    sigma: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(np.asarray(self.values, dtype=float)))
        if self.values.shape != (self.N,):
            raise ValueError(f"window values must have length N={self.N}")
        if not 2 <= self.W <= self.N:
            raise ValueError(f"window length W={self.W} must satisfy 2 <= W <= N={self.N}")


def rectangular_window(N: int, W: int) -> WindowSpec:
    """All-ones window on [0, W-1], zero elsewhere."""
    g = np.zeros(N)
    g[:W] = 1.0
    return WindowSpec(kind="rectangular", W=W, values=g, N=N)


def gaussian_window(N: int, sigma: float) -> WindowSpec:
    """One-sided decaying window g[n] = exp(-n^2 / (2 sigma^2)), zeroed for n > 3 sigma.

    The support length is W = ceil(3 sigma).
    """
    W = int(math.ceil(3.0 * sigma))
    n = np.arange(N)
    g = np.exp(-(n**2) / (2.0 * sigma**2))
    g[W:] = 0.0
    return WindowSpec(kind="gaussian", W=W, values=g, N=N, sigma=float(sigma))


def custom_window(values: Sequence[float], W: Optional[int] = None) -> WindowSpec:
    values = np.asarray(values, dtype=float)
    N = len(values)
    if W is None:
        nonzero = np.nonzero(values)[0]
        W = int(nonzero[-1]) + 1 if len(nonzero) else N
        W = max(W, 2)
    return WindowSpec(kind="custom", W=int(W), values=values, N=N)


@dataclass(frozen=True)
class ProblemConfig:
    """Measurement setup: signal length N, window, hop L, optional SNR and seed.

    Frames sit at time positions m*L mod N for m = 0, ..., ceil(N/L) - 1.
    When L divides N this is the uniform frame grid; the experiment configs
    reproduced here also use hops that do not divide N, in which case the
    frame count is ceil(N/L) and the wrap spacing is shorter.  The
    upsampling-free recovery algorithms require L = 1; the CLI `recover`
    path additionally insists on L | N.
    """

    N: int
    window: WindowSpec
    L: int = 1
    snr_db: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("signal length N must be at least 2")
        if not 1 <= self.L <= self.N:
            raise ValueError(f"hop L={self.L} must satisfy 1 <= L <= N={self.N}")
        if self.window.N != self.N:
            raise ValueError("window ambient length does not match N")

    @property
    def n_frames(self) -> int:
        return -(-self.N // self.L)

    @property
    def frame_positions(self) -> np.ndarray:
        return (np.arange(self.n_frames) * self.L) % self.N

    def with_hop(self, L: int) -> "ProblemConfig":
        return replace(self, L=L)


@dataclass(frozen=True)
class MeasurementSet:
    """Phaseless data Z[m, k] = |X[m, k]|^2 and its per-row DFT Y[m, l] / N."""

    Z: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "Z", _readonly(np.asarray(self.Z, dtype=float)))
        object.__setattr__(self, "Y", _readonly(np.asarray(self.Y, dtype=complex)))
        if self.Z.shape != self.Y.shape:
            raise ValueError("Z and Y must have identical shapes")

    @property
    def n_frames(self) -> int:
        return self.Z.shape[0]

    @property
    def N(self) -> int:
        return self.Z.shape[1]

    @staticmethod
    def from_intensity(Z: np.ndarray) -> "MeasurementSet":
        Z = np.asarray(Z, dtype=float)
        Y = np.fft.fft(Z, axis=1) / Z.shape[1]
        return MeasurementSet(Z=Z, Y=Y)


@dataclass
class TrialRecord:
    """One recovery run: parameters, outcome metrics and an optional trace."""

    config: ProblemConfig
    method: str
    error: float
    iterations: int
    loss_trace: Optional[list] = None
    error_trace: Optional[list] = None
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# metric


def distance(z: np.ndarray, x: np.ndarray) -> tuple[float, float]:
    """Distance up to global phase: min over phi of ||z - x e^{j phi}||_2.

    Returns (d, phi) where phi in [0, 2 pi) attains the minimum.  The
    minimizer is phi = arg <x, z>; when the inner product vanishes any phi is
    optimal and 0 is returned.
    """
    z = np.asarray(z)
    x = np.asarray(x)
    if z.shape != x.shape:
        raise ValueError(f"shape mismatch: {z.shape} vs {x.shape}")
    ip = np.vdot(x, z)
    phi = float(np.angle(ip)) % (2.0 * math.pi) if ip != 0 else 0.0
    # Norm of the aligned difference rather than the expanded closed form
    # sqrt(||z||^2 + ||x||^2 - 2|ip|): same value, but no cancellation when
    # the vectors are nearly equal up to phase.
    d = float(np.linalg.norm(z - x * np.exp(1j * phi)))
    return d, phi


def relative_error(estimate: np.ndarray, truth: np.ndarray) -> float:
    """d(estimate, truth) / ||truth||_2."""
    nrm = np.linalg.norm(truth)
    if nrm == 0:
        raise ValueError("truth signal has zero norm")
    return distance(estimate, truth)[0] / nrm


# ---------------------------------------------------------------------------
# noise


def add_noise(
    meas: MeasurementSet, snr_db: float, seed: int, clip: bool = False
) -> MeasurementSet:
    """Additive i.i.d. Gaussian noise on the intensity measurements Z.

    The noise standard deviation is set from the Frobenius norm of Z so that
    the empirical SNR, 10 log10(||Z||_F^2 / ||noise||_F^2), concentrates at
    snr_db.  Y is always recomputed from the noisy Z.  snr_db = +inf (or a
    None config value upstream) leaves the measurements untouched.  Negative
    noisy intensities are kept unless clip is set.
    """
    if snr_db is None or math.isinf(snr_db):
        return meas
    if not math.isfinite(snr_db):
        raise ValueError("snr_db must be finite or +inf")
    rng = np.random.default_rng(seed)
    scale = np.linalg.norm(meas.Z) / math.sqrt(meas.Z.size) * 10.0 ** (-snr_db / 20.0)
    Z = meas.Z + rng.normal(0.0, 1.0, size=meas.Z.shape) * scale
    if clip:
        Z = np.maximum(Z, 0.0)
    return MeasurementSet.from_intensity(Z)


# ---------------------------------------------------------------------------
# signal generation


def random_signal(N: int, kind: str, seed: int) -> np.ndarray:
    """Seeded test signals.

    kind: "real" (standard normal), "complex" (circular complex normal),
    "unit-modulus" (entries of modulus 1/sqrt(N), uniform phases),
    "sign" (entries +-1/sqrt(N)), "nonvanishing" (complex with moduli
    bounded away from zero).
    """
    rng = np.random.default_rng(seed)
    if kind == "real":
        return rng.standard_normal(N)
    if kind == "complex":
        return (rng.standard_normal(N) + 1j * rng.standard_normal(N)) / math.sqrt(2.0)
    if kind == "unit-modulus":
        return np.exp(2j * math.pi * rng.random(N)) / math.sqrt(N)
    if kind == "sign":
        return rng.choice([-1.0, 1.0], size=N) / math.sqrt(N)
    if kind == "nonvanishing":
        moduli = 0.8 + 0.5 * rng.random(N)
        return moduli * np.exp(2j * math.pi * rng.random(N))
    raise ValueError(f"unknown signal kind: {kind!r}")


def fix_global_phase(x: np.ndarray) -> np.ndarray:
    """Rotate so the largest-modulus entry is real positive (gauge fixing)."""
    x = np.asarray(x)
    idx = int(np.argmax(np.abs(x)))
    pivot = x[idx]
    if pivot == 0:
        return x.copy()
    rotated = x * (abs(pivot) / pivot)
    return rotated.real if np.isrealobj(x) else rotated


# ---------------------------------------------------------------------------
# JSON interchange (complex scalars as [re, im] pairs)


def signal_to_json(x: np.ndarray) -> dict:
    x = np.asarray(x)
    if np.isrealobj(x):
        values = [[float(v), 0.0] for v in x]
        dtype = "real"
    else:
        values = [[float(v.real), float(v.imag)] for v in x]
        dtype = "complex"
    return {"type": "signal", "length": len(x), "dtype": dtype, "values": values}


def signal_from_json(doc: dict) -> np.ndarray:
    if doc.get("type") != "signal":
        raise ValueError("not a signal document")
    pairs = np.asarray(doc["values"], dtype=float)
    if pairs.shape != (doc["length"], 2):
        raise ValueError("malformed signal values")
    if doc.get("dtype") == "real":
        return pairs[:, 0].copy()
    return pairs[:, 0] + 1j * pairs[:, 1]


def measurements_to_json(meas: MeasurementSet) -> dict:
    return {
        "type": "measurements",
        "n_frames": meas.n_frames,
        "signal_length": meas.N,
        "Z": [[float(v) for v in row] for row in meas.Z],
        "Y": [[[float(v.real), float(v.imag)] for v in row] for row in meas.Y],
    }


def measurements_from_json(doc: dict) -> MeasurementSet:
    if doc.get("type") != "measurements":
        raise ValueError("not a measurements document")
    Z = np.asarray(doc["Z"], dtype=float)
    Y = np.asarray(doc["Y"], dtype=float)
    return MeasurementSet(Z=Z, Y=Y[..., 0] + 1j * Y[..., 1])


def save_json(doc: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)


def load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
