"""Hyperfine augmentation of the nuclear drive coupling.

The rf drive couples to both spins, H_rf = B_rf (gamma_e S.n + gamma_n I.n).
Expressed in the eigenbasis of the static Hamiltonian, its matrix element
between two labeled states measures the effective gyromagnetic ratio of
that transition; dividing by gamma_n * B_rf makes it the dimensionless
augmentation factor alpha. State mixing through the transverse hyperfine
coupling lets nominally nuclear transitions borrow electron-spin coupling,
which is what boosts alpha by orders of magnitude at low field.

alpha_raw is the literal dimensionless matrix element; alpha_norm divides
out the bare high-field element of the same transition (1/sqrt(2) for
adjacent nuclear lines with an x drive) and is NaN for transitions whose
bare element vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    I_TOTAL,
    LABELS,
    S_TOTAL,
    TWO_PI,
    LabeledEigensystem,
    OrientationClass,
    P1Parameters,
    basis_index,
    label_states,
)

_ZERO_BARE = 1e-12


@dataclass(frozen=True)
class RfDrive:
    """Oscillating drive field: amplitude in Gauss, unit polarization vector
    in the P1 frame (normalized on construction)."""

    amplitude: float = 1.0
    polarization: tuple = (1.0, 0.0, 0.0)

    def __post_init__(self):
        if not (math.isfinite(self.amplitude) and self.amplitude >= 0.0):
            raise ValueError("drive amplitude must be finite and >= 0")
        vec = np.asarray(self.polarization, dtype=float)
        if vec.shape != (3,) or not np.all(np.isfinite(vec)):
            raise ValueError("polarization must be a finite 3-vector")
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise ValueError("polarization must not be the zero vector")
        object.__setattr__(self, "polarization", tuple(vec / norm))


@dataclass(frozen=True)
class AugmentationResult:
    transition: tuple
    alpha_raw: float
    alpha_norm: float
    field: float
    orientation: OrientationClass


@dataclass(frozen=True)
class AugmentationCurve:
    """alpha samples over a field sweep; samples are (field_G, raw, norm)."""

    transition: tuple
    orientation: OrientationClass
    samples: tuple

    @property
    def fields(self) -> tuple:
        return tuple(s[0] for s in self.samples)

    @property
    def peak_normalized(self) -> tuple:
        """alpha_raw rescaled to its own maximum over the sweep window."""
        peak = max(s[1] for s in self.samples)
        return tuple(s[1] / peak for s in self.samples)


def _drive_operator(params: P1Parameters, polarization) -> np.ndarray:
    n = np.asarray(polarization, dtype=float)
    op = params.gamma_e * (n[0] * S_TOTAL[0] + n[1] * S_TOTAL[1] + n[2] * S_TOTAL[2])
    op = op + params.gamma_n * (n[0] * I_TOTAL[0] + n[1] * I_TOTAL[1] + n[2] * I_TOTAL[2])
    return op


def rf_hamiltonian(params: P1Parameters, drive: RfDrive) -> np.ndarray:
    """Drive Hamiltonian B_rf (gamma_e S.n + gamma_n I.n) in rad/us."""
    return TWO_PI * drive.amplitude * _drive_operator(params, drive.polarization)


def _check_labels(from_label: str, to_label: str):
    if from_label not in LABELS or to_label not in LABELS:
        raise ValueError(f"labels must be in {LABELS}, got {from_label!r}, {to_label!r}")
    if from_label == to_label:
        raise ValueError("transition labels must be distinct")


def bare_element(params: P1Parameters, drive: RfDrive, id_from, id_to) -> float:
    """High-field product-state element |<id_from|(S.n ge/gn + I.n)|id_to>|."""
    n = np.asarray(drive.polarization, dtype=float)
    s_op = n[0] * S_TOTAL[0] + n[1] * S_TOTAL[1] + n[2] * S_TOTAL[2]
    i_op = n[0] * I_TOTAL[0] + n[1] * I_TOTAL[1] + n[2] * I_TOTAL[2]
    ia, ib = basis_index(*id_from), basis_index(*id_to)
    ratio = params.gamma_e / params.gamma_n
    return abs(ratio * s_op[ia, ib] + i_op[ia, ib])


def _alpha_from_system(
    params: P1Parameters, sys: LabeledEigensystem, drive: RfDrive, from_label: str, to_label: str
) -> AugmentationResult:
    h_rf = rf_hamiltonian(params, drive)
    va, vb = sys.states[from_label], sys.states[to_label]
    element = abs(np.vdot(va, h_rf @ vb))
    alpha_raw = element / (TWO_PI * abs(params.gamma_n) * drive.amplitude)
    m_bare = bare_element(
        params, drive, sys.asymptotic_id[from_label], sys.asymptotic_id[to_label]
    )
    alpha_norm = alpha_raw / m_bare if m_bare > _ZERO_BARE else math.nan
    return AugmentationResult(
        transition=(from_label, to_label),
        alpha_raw=float(alpha_raw),
        alpha_norm=float(alpha_norm),
        field=sys.field.magnitude,
        orientation=sys.orientation,
    )


def augmentation_factor(
    params: P1Parameters,
    field_magnitude: float,
    orientation: OrientationClass,
    drive: RfDrive,
    from_label: str,
    to_label: str,
) -> AugmentationResult:
    """Augmentation factor of one labeled transition at one field."""
    _check_labels(from_label, to_label)
    if drive.amplitude <= 0.0:
        raise ValueError("drive amplitude must be > 0 to define alpha")
    sys = label_states(params, field_magnitude, orientation)
    return _alpha_from_system(params, sys, drive, from_label, to_label)


def alpha_sweep(
    params: P1Parameters,
    b_min: float,
    b_max: float,
    points: int,
    orientation: OrientationClass,
    drive: RfDrive,
    transition: tuple,
) -> AugmentationCurve:
    """Augmentation factor over a linear field grid (one continuation pass)."""
    from_label, to_label = transition
    _check_labels(from_label, to_label)
    if drive.amplitude <= 0.0:
        raise ValueError("drive amplitude must be > 0 to define alpha")
    if points < 1:
        raise ValueError("need points >= 1")
    if points == 1:
        if b_min != b_max:
            raise ValueError("a single-point sweep needs b_min == b_max")
        systems = [label_states(params, b_min, orientation)]
    else:
        from .model import energy_sweep

        systems = energy_sweep(params, b_min, b_max, points, orientation)
    samples = []
    for sys in systems:
        res = _alpha_from_system(params, sys, drive, from_label, to_label)
        samples.append((sys.field.magnitude, res.alpha_raw, res.alpha_norm))
    return AugmentationCurve(
        transition=(from_label, to_label), orientation=orientation, samples=tuple(samples)
    )
