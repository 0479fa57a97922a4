"""Phase retrieval from phaseless short-time Fourier transform measurements.

Library layout:

    model           core types, phase-invariant metric, noise, JSON interchange
    circulant       FFT-diagonalized circulant products and pseudo-inverse solves
    forward         measurement operator and per-diagonal linear systems
    initialization  least-squares spectral initializers and exact recoveries
    solver          non-convex loss, gradient descent, Griffin-Lim baseline
    experiments     reproductions of the reference studies + theory certificates
    cli             command-line front end (`stft-pr`)
"""

from .model import (
    ConvergenceError,
    DivergenceError,
    InvalidWindowError,
    MeasurementSet,
    NearVanishingSignalError,
    ProblemConfig,
    RecoveryError,
    TrialRecord,
    WindowSpec,
    add_noise,
    custom_window,
    distance,
    fix_global_phase,
    gaussian_window,
    random_signal,
    rectangular_window,
    relative_error,
)
from .forward import (
    correlation_transform,
    diagonal_system,
    is_admissible,
    measure,
    measurement_form,
    stft,
)
from .initialization import (
    InterpolationFilter,
    cubic_filter,
    linear_filter,
    make_filter,
    principal_eigenvector,
    recursive_recovery,
    spectral_init,
    spectral_init_unit_hop,
    spectral_init_upsampled,
    unit_modulus_init,
)
from .solver import GdOptions, gd_recover, gla_recover, gradient, loss, threshold

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DivergenceError",
    "GdOptions",
    "InterpolationFilter",
    "InvalidWindowError",
    "MeasurementSet",
    "NearVanishingSignalError",
    "ProblemConfig",
    "RecoveryError",
    "TrialRecord",
    "WindowSpec",
    "add_noise",
    "correlation_transform",
    "cubic_filter",
    "custom_window",
    "diagonal_system",
    "distance",
    "fix_global_phase",
    "gaussian_window",
    "gd_recover",
    "gla_recover",
    "gradient",
    "is_admissible",
    "linear_filter",
    "loss",
    "make_filter",
    "measure",
    "measurement_form",
    "principal_eigenvector",
    "random_signal",
    "rectangular_window",
    "recursive_recovery",
    "relative_error",
    "spectral_init",
    "spectral_init_unit_hop",
    "spectral_init_upsampled",
    "stft",
    "threshold",
    "unit_modulus_init",
    "__version__",
]
