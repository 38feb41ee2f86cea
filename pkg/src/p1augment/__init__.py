"""Spin physics of the diamond P1 center.

Models the coupled electron-nuclear spin system of the substitutional
nitrogen defect: field-dependent energy levels with eigenstate labeling,
DEER spectrum synthesis, the hyperfine augmentation of the nuclear
gyromagnetic ratio, and simulation/fitting of nuclear Rabi oscillations.
"""

__version__ = "0.1.0"

from .augmentation import (
    AugmentationCurve,
    AugmentationResult,
    RfDrive,
    alpha_sweep,
    augmentation_factor,
    rf_hamiltonian,
)
from .deer import Lineshape, SpectralLine, Spectrum, SpectrumConfig, broaden, stick_spectrum
from .errors import ConfigError, ConvergenceError, DataError, NumericalError, TrackingError
from .model import (
    LABELS,
    FieldConfig,
    LabeledEigensystem,
    OrientationClass,
    P1Parameters,
    TransitionKind,
    TransitionRecord,
    build_hamiltonian,
    energy_sweep,
    label_states,
    transition_table,
)
from .rabi import (
    DampedSinusoidParams,
    FitResult,
    FittedPoint,
    NormalizationMode,
    NormalizedKind,
    NormalizedPoint,
    RabiTrace,
    TraceMeta,
    damped_sinusoid,
    fit_damped_sinusoid,
    normalize_dataset,
    rabi_frequency,
    simulate_trace,
)
from .spincore import EigenDecomposition, SpinOperatorSet, hermitian_eig, kron, spin_operators

__all__ = [
    "__version__",
    "AugmentationCurve",
    "AugmentationResult",
    "ConfigError",
    "ConvergenceError",
    "DampedSinusoidParams",
    "DataError",
    "EigenDecomposition",
    "FieldConfig",
    "FitResult",
    "FittedPoint",
    "LABELS",
    "LabeledEigensystem",
    "Lineshape",
    "NormalizationMode",
    "NormalizedKind",
    "NormalizedPoint",
    "NumericalError",
    "OrientationClass",
    "P1Parameters",
    "RabiTrace",
    "RfDrive",
    "SpectralLine",
    "Spectrum",
    "SpectrumConfig",
    "SpinOperatorSet",
    "TraceMeta",
    "TrackingError",
    "TransitionKind",
    "TransitionRecord",
    "alpha_sweep",
    "augmentation_factor",
    "broaden",
    "build_hamiltonian",
    "damped_sinusoid",
    "energy_sweep",
    "fit_damped_sinusoid",
    "hermitian_eig",
    "kron",
    "label_states",
    "normalize_dataset",
    "rabi_frequency",
    "rf_hamiltonian",
    "simulate_trace",
    "spin_operators",
    "stick_spectrum",
    "transition_table",
]
