"""P1-center spin Hamiltonian, eigenstate labeling, and transition tables.

The defect is an electron spin S=1/2 hyperfine-coupled to the 14N nuclear
spin I=1. The Hamiltonian is written in the P1 principal frame (defect
z-axis fixed, the magnetic field tilts):

    H = -gamma_e B.S - gamma_n B.I + a_par Sz Iz + a_perp (Sx Ix + Sy Iy) + q Iz^2

with all coupling constants given as plain frequencies (MHz, MHz/G). The
matrix returned by build_hamiltonian is in angular-frequency units
(rad/us), i.e. 2*pi times the MHz expression; every user-facing energy is
converted back to MHz.

Basis ordering is |m_S, m_I> with m_S in {+1/2, -1/2} outer and m_I in
{+1, 0, -1} inner, fixed globally so eigenvector components and golden
files are reproducible.

Eigenstates are labeled a..f by continuation from a high reference field
(10 kG), where they sort by descending energy and connect to the product
states (+1/2,+1), (+1/2,0), (+1/2,-1), (-1/2,-1), (-1/2,0), (-1/2,+1).
Stepping the field down (or up) with overlap matching keeps each label
glued to its state through the strongly mixed low-field region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import TrackingError
from .spincore import hermitian_eig, kron, spin_operators

TWO_PI = 2.0 * math.pi

LABELS = ("a", "b", "c", "d", "e", "f")

# High-field identities of the labels, in descending energy order at the
# reference field: electron Zeeman dominates, then the hyperfine coupling
# orders the nuclear sublevels (normally within each electron manifold).
HIGH_FIELD_IDS = (
    (+0.5, +1),
    (+0.5, 0),
    (+0.5, -1),
    (-0.5, -1),
    (-0.5, 0),
    (-0.5, +1),
)

# Continuation controls: geometric grid ratio, linear floor step once the
# geometric step shrinks below it, minimum step before giving up, and the
# overlap below which a step is considered ambiguous and halved.
REFERENCE_FIELD = 10_000.0
GRID_RATIO = 1.05
FLOOR_STEP = 0.5
MIN_STEP = 0.01
MIN_OVERLAP = 0.5

# The four off-axis P1 orientations sit at the tetrahedral angle from the
# field axis. Their field azimuth is fixed at 90 degrees so that the
# default x-polarized rf drive is orthogonal to the static field for every
# class, matching the crossed-wire drive geometry. Eigenvalues do not
# depend on this azimuth (the Hamiltonian is axially symmetric).
OFF_AXIS_THETA = math.degrees(math.acos(-1.0 / 3.0))
CANONICAL_AZIMUTH = 90.0


@dataclass(frozen=True)
class P1Parameters:
    """Coupling constants of the P1 Hamiltonian, as plain frequencies.

    gamma_e, gamma_n are MHz/G (signed); a_par, a_perp, q are MHz.
    Defaults are the accepted 14N P1 values.
    """

    gamma_e: float = -2.8
    gamma_n: float = 3.077e-4
    a_par: float = 114.0
    a_perp: float = 81.34
    q: float = -4.2

    def __post_init__(self):
        for name in ("gamma_e", "gamma_n", "a_par", "a_perp", "q"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"P1Parameters.{name} must be finite")


@dataclass(frozen=True)
class FieldConfig:
    """Static field: magnitude in Gauss plus polar/azimuth angles in degrees."""

    magnitude: float
    polar_theta: float = 0.0
    azimuth_phi: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.magnitude) and self.magnitude >= 0.0):
            raise ValueError("field magnitude must be finite and >= 0")
        if not (0.0 <= self.polar_theta <= 180.0):
            raise ValueError("polar_theta must lie in [0, 180] degrees")
        if not math.isfinite(self.azimuth_phi):
            raise ValueError("azimuth_phi must be finite")

    def vector(self) -> np.ndarray:
        """Cartesian field components in the P1 frame (Gauss)."""
        th = math.radians(self.polar_theta)
        ph = math.radians(self.azimuth_phi)
        return self.magnitude * np.array(
            [math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)]
        )


class OrientationClass(Enum):
    """Jahn-Teller orientation class relative to the applied field."""

    ON_AXIS = "on_axis"
    OFF_AXIS = "off_axis"

    @property
    def theta_deg(self) -> float:
        return 0.0 if self is OrientationClass.ON_AXIS else OFF_AXIS_THETA

    @property
    def degeneracy(self) -> int:
        return 1 if self is OrientationClass.ON_AXIS else 3

    def field_config(self, magnitude: float) -> FieldConfig:
        return FieldConfig(magnitude, self.theta_deg, CANONICAL_AZIMUTH)


class TransitionKind(Enum):
    ELECTRON_SQ = "electron_sq"
    NUCLEAR_SQ = "nuclear_sq"
    DOUBLE_QUANTUM = "double_quantum"

    @staticmethod
    def classify(delta_ms: float, delta_mi: float) -> "TransitionKind":
        key = (round(abs(delta_ms) * 2) / 2, abs(round(delta_mi)))
        if key == (1.0, 0):
            return TransitionKind.ELECTRON_SQ
        if key == (0.0, 1):
            return TransitionKind.NUCLEAR_SQ
        return TransitionKind.DOUBLE_QUANTUM


@dataclass(frozen=True)
class LabeledEigensystem:
    """Six labeled eigenpairs at one field point.

    energies are MHz keyed by label; states are the matching unit
    eigenvectors in the |m_S, m_I> basis; asymptotic_id gives each label's
    high-field (m_S, m_I) identity.
    """

    field: FieldConfig
    orientation: OrientationClass
    energies: dict
    states: dict
    asymptotic_id: dict

    def state_matrix(self) -> np.ndarray:
        """Eigenvector matrix with columns ordered a..f."""
        return np.column_stack([self.states[lbl] for lbl in LABELS])


@dataclass(frozen=True)
class TransitionRecord:
    from_label: str
    to_label: str
    frequency_mhz: float
    kind: TransitionKind
    delta_ms: float
    delta_mi: int
    orientation: OrientationClass


# 6x6 operator blocks in the fixed product basis, built once.
_S_HALF = spin_operators(0.5)
_I_ONE = spin_operators(1.0)
_EYE2 = np.eye(2, dtype=complex)
_EYE3 = np.eye(3, dtype=complex)
S_TOTAL = tuple(kron(op, _EYE3) for op in (_S_HALF.sx, _S_HALF.sy, _S_HALF.sz))
I_TOTAL = tuple(kron(_EYE2, op) for op in (_I_ONE.sx, _I_ONE.sy, _I_ONE.sz))
_IZ2 = kron(_EYE2, _I_ONE.sz @ _I_ONE.sz)


def basis_index(ms: float, mi: int) -> int:
    """Row index of the product state |m_S, m_I>."""
    return (0 if ms > 0 else 1) * 3 + (1 - mi)


def build_hamiltonian(params: P1Parameters, field: FieldConfig) -> np.ndarray:
    """Assemble the 6x6 P1 Hamiltonian in rad/us."""
    b = field.vector()
    h = -params.gamma_e * (b[0] * S_TOTAL[0] + b[1] * S_TOTAL[1] + b[2] * S_TOTAL[2])
    h = h - params.gamma_n * (b[0] * I_TOTAL[0] + b[1] * I_TOTAL[1] + b[2] * I_TOTAL[2])
    h = h + params.a_par * (S_TOTAL[2] @ I_TOTAL[2])
    h = h + params.a_perp * (S_TOTAL[0] @ I_TOTAL[0] + S_TOTAL[1] @ I_TOTAL[1])
    h = h + params.q * _IZ2
    return TWO_PI * h


def _eigensystem_mhz(params: P1Parameters, orientation: OrientationClass, magnitude: float):
    """Diagonalize at one field point; energies in MHz, ascending."""
    decomp = hermitian_eig(build_hamiltonian(params, orientation.field_config(magnitude)))
    return decomp.eigenvalues / TWO_PI, decomp.eigenvectors


def _greedy_bijection(overlap: np.ndarray):
    """Assign old states to new columns, largest overlap first."""
    work = overlap.copy()
    n = overlap.shape[0]
    perm = [-1] * n
    for _ in range(n):
        i, j = np.unravel_index(np.argmax(work), work.shape)
        perm[i] = int(j)
        work[i, :] = -1.0
        work[:, j] = -1.0
    worst = min(overlap[i, perm[i]] for i in range(n))
    return perm, float(worst)


class _Tracker:
    """Carries labeled eigenvectors along a field path with overlap matching."""

    def __init__(self, params: P1Parameters, orientation: OrientationClass):
        self.params = params
        self.orientation = orientation
        energies, vectors = _eigensystem_mhz(params, orientation, REFERENCE_FIELD)
        order = np.argsort(energies)[::-1]  # descending: labels a..f
        self.field = REFERENCE_FIELD
        self.energies = energies[order]
        self.vectors = vectors[:, order]

    def _match(self, target: float):
        """One tracking step self.field -> target, halving on ambiguity."""
        energies, vectors = _eigensystem_mhz(self.params, self.orientation, target)
        overlap = np.abs(self.vectors.conj().T @ vectors) ** 2
        perm, worst = _greedy_bijection(overlap)
        if worst < MIN_OVERLAP:
            if abs(self.field - target) <= MIN_STEP:
                raise TrackingError(
                    f"eigenstate continuation ambiguous at B={target:.6g} G "
                    f"(worst overlap {worst:.3f} at the minimum step)",
                    field_gauss=target,
                )
            midpoint = 0.5 * (self.field + target)
            self._match(midpoint)
            self._match(target)
            return
        self.field = target
        self.energies = energies[perm]
        self.vectors = vectors[:, perm]

    def advance(self, target: float):
        """Walk from the current field to target on the geometric grid."""
        while self.field != target:
            if target < self.field:
                step = self.field - self.field / GRID_RATIO
                nxt = self.field / GRID_RATIO if step >= FLOOR_STEP else self.field - FLOOR_STEP
                nxt = max(nxt, target)
            else:
                step = self.field * (GRID_RATIO - 1.0)
                nxt = self.field * GRID_RATIO if step >= FLOOR_STEP else self.field + FLOOR_STEP
                nxt = min(nxt, target)
            self._match(nxt)

    def snapshot(self) -> LabeledEigensystem:
        energies = {lbl: float(self.energies[i]) for i, lbl in enumerate(LABELS)}
        states = {lbl: self.vectors[:, i].copy() for i, lbl in enumerate(LABELS)}
        ids = {lbl: HIGH_FIELD_IDS[i] for i, lbl in enumerate(LABELS)}
        return LabeledEigensystem(
            field=self.orientation.field_config(self.field),
            orientation=self.orientation,
            energies=energies,
            states=states,
            asymptotic_id=ids,
        )


_LABEL_CACHE: dict = {}
_LABEL_CACHE_MAX = 256


def label_states(
    params: P1Parameters, field_magnitude: float, orientation: OrientationClass
) -> LabeledEigensystem:
    """Labeled eigensystem at one field, via continuation from 10 kG."""
    if not (math.isfinite(field_magnitude) and field_magnitude >= 0.0):
        raise ValueError("field_magnitude must be finite and >= 0")
    key = (params, float(field_magnitude), orientation)
    cached = _LABEL_CACHE.get(key)
    if cached is None:
        tracker = _Tracker(params, orientation)
        tracker.advance(float(field_magnitude))
        cached = tracker.snapshot()
        if len(_LABEL_CACHE) >= _LABEL_CACHE_MAX:
            _LABEL_CACHE.clear()
        _LABEL_CACHE[key] = cached
    states = {lbl: vec.copy() for lbl, vec in cached.states.items()}
    return LabeledEigensystem(
        cached.field, cached.orientation, dict(cached.energies), states, dict(cached.asymptotic_id)
    )


def energy_sweep(
    params: P1Parameters,
    b_min: float,
    b_max: float,
    points: int,
    orientation: OrientationClass,
) -> list:
    """Labeled eigensystems on a linear field grid, one continuation pass."""
    if not (0.0 <= b_min < b_max):
        raise ValueError("need 0 <= b_min < b_max")
    if points < 2:
        raise ValueError("need points >= 2")
    grid = np.linspace(b_min, b_max, points)
    results: dict = {}
    tracker = _Tracker(params, orientation)
    above = sorted(b for b in grid if b > REFERENCE_FIELD)
    below = sorted((b for b in grid if b <= REFERENCE_FIELD), reverse=True)
    for b in above:
        tracker.advance(float(b))
        results[float(b)] = tracker.snapshot()
    if above:
        tracker = _Tracker(params, orientation)
    for b in below:
        tracker.advance(float(b))
        results[float(b)] = tracker.snapshot()
    return [results[float(b)] for b in grid]


def transition_table(sys: LabeledEigensystem) -> list:
    """All 15 label pairs with positive frequencies and classifications."""
    records = []
    for i in range(6):
        for j in range(i + 1, 6):
            lo, hi = LABELS[i], LABELS[j]
            ms_lo, mi_lo = sys.asymptotic_id[lo]
            ms_hi, mi_hi = sys.asymptotic_id[hi]
            delta_ms = ms_hi - ms_lo
            delta_mi = int(mi_hi - mi_lo)
            records.append(
                TransitionRecord(
                    from_label=lo,
                    to_label=hi,
                    frequency_mhz=abs(sys.energies[lo] - sys.energies[hi]),
                    kind=TransitionKind.classify(delta_ms, delta_mi),
                    delta_ms=delta_ms,
                    delta_mi=delta_mi,
                    orientation=sys.orientation,
                )
            )
    return records
