"""DEER spectrum synthesis: stick lines plus a broadened curve.

The amplitude model is phenomenological: each line's contrast is the
orientation-class degeneracy (1 on-axis, 3 off-axis) times the rf drive
matrix element of the transition, with uniform level populations; the
whole set is rescaled so the strongest weighted line has amplitude 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .augmentation import RfDrive, rf_hamiltonian
from .model import (
    LABELS,
    OrientationClass,
    P1Parameters,
    TransitionKind,
    label_states,
    transition_table,
)


class Lineshape(Enum):
    LORENTZIAN = "lorentzian"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class SpectralLine:
    frequency_mhz: float
    amplitude: float
    transition: tuple
    kind: TransitionKind
    orientation: OrientationClass


@dataclass(frozen=True)
class SpectrumConfig:
    f_min: float
    f_max: float
    samples: int = 2001
    linewidth: float = 1.0  # FWHM, MHz
    lineshape: Lineshape = Lineshape.LORENTZIAN
    amplitude_floor: float = 0.0

    def __post_init__(self):
        if not self.f_min < self.f_max:
            raise ValueError("need f_min < f_max")
        if self.samples < 2:
            raise ValueError("need samples >= 2")
        if not (math.isfinite(self.linewidth) and self.linewidth > 0.0):
            raise ValueError("linewidth must be > 0")
        if self.amplitude_floor < 0.0:
            raise ValueError("amplitude_floor must be >= 0")


@dataclass(frozen=True)
class Spectrum:
    config: SpectrumConfig
    sticks: tuple
    frequencies_mhz: np.ndarray
    contrast: np.ndarray


def stick_spectrum(params: P1Parameters, field: float, drive: RfDrive) -> list:
    """All 30 transitions (15 per orientation class), degeneracy-weighted.

    Amplitudes are normalized so the largest weighted line equals 1.
    """
    if field < 0.0:
        raise ValueError("field must be >= 0")
    h_rf = rf_hamiltonian(params, drive)
    raw = []
    for orientation in (OrientationClass.ON_AXIS, OrientationClass.OFF_AXIS):
        sys = label_states(params, field, orientation)
        for rec in transition_table(sys):
            va, vb = sys.states[rec.from_label], sys.states[rec.to_label]
            weight = orientation.degeneracy * abs(np.vdot(va, h_rf @ vb))
            raw.append((rec, weight))
    peak = max(w for _, w in raw)
    lines = []
    for rec, weight in raw:
        lines.append(
            SpectralLine(
                frequency_mhz=rec.frequency_mhz,
                amplitude=weight / peak if peak > 0.0 else 0.0,
                transition=(rec.from_label, rec.to_label),
                kind=rec.kind,
                orientation=rec.orientation,
            )
        )
    return lines


def _profile(offsets: np.ndarray, fwhm: float, shape: Lineshape) -> np.ndarray:
    if shape is Lineshape.LORENTZIAN:
        half = fwhm / 2.0
        return half * half / (offsets * offsets + half * half)
    return np.exp(-4.0 * math.log(2.0) * (offsets / fwhm) ** 2)


def broaden(sticks, config: SpectrumConfig) -> Spectrum:
    """Sum unit-peak-height line profiles over a frequency grid."""
    freqs = np.linspace(config.f_min, config.f_max, config.samples)
    curve = np.zeros_like(freqs)
    kept = tuple(s for s in sticks if s.amplitude >= config.amplitude_floor)
    lo = config.f_min - 10.0 * config.linewidth
    hi = config.f_max + 10.0 * config.linewidth
    for line in kept:
        if not lo <= line.frequency_mhz <= hi:
            continue
        curve += line.amplitude * _profile(
            freqs - line.frequency_mhz, config.linewidth, config.lineshape
        )
    return Spectrum(config=config, sticks=kept, frequencies_mhz=freqs, contrast=curve)
