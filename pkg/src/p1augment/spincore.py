"""Dense complex linear algebra and angular-momentum operator construction.

All matrices are plain complex128 numpy arrays; nothing here ever exceeds
6x6. The Hermitian eigensolver is a cyclic Jacobi iteration rather than a
LAPACK call so that eigenvector ordering and phases are fully pinned down:
downstream state tracking and golden-file tests rely on bit-stable output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError

HERMITICITY_TOL = 1e-10   # relative, against the largest element
OFFDIAG_TOL = 1e-14       # off-diagonal Frobenius norm, relative to ||H||_F
MAX_SWEEPS = 100


@dataclass(frozen=True)
class SpinOperatorSet:
    """Cartesian spin matrices in the |s, m> basis, m descending."""

    spin: float
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray

    @property
    def dim(self) -> int:
        return int(round(2 * self.spin)) + 1


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues ascending (rad/us); eigenvectors as matching columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def spin_operators(s) -> SpinOperatorSet:
    """Build Sx, Sy, Sz for spin s from ladder operators.

    Basis states are |s, m> ordered by descending m. Raises ValueError
    unless 2s is a nonnegative integer.
    """
    two_s = 2 * s
    if not np.isfinite(two_s) or two_s < 0 or abs(two_s - round(two_s)) > 1e-12:
        raise ValueError(f"invalid spin {s!r}: 2s must be a nonnegative integer")
    dim = int(round(two_s)) + 1
    m = s - np.arange(dim)
    sp = np.zeros((dim, dim), dtype=complex)
    for k in range(1, dim):
        # <m+1| S+ |m> with m = m[k]
        sp[k - 1, k] = np.sqrt(s * (s + 1) - m[k] * (m[k] + 1))
    sm = sp.conj().T
    sx = (sp + sm) / 2
    sy = (sp - sm) / 2j
    sz = np.diag(m).astype(complex)
    return SpinOperatorSet(spin=float(s), sx=sx, sy=sy, sz=sz)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with row-major block convention."""
    return np.kron(np.asarray(a), np.asarray(b))


def is_hermitian(h: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    h = np.asarray(h)
    scale = max(1.0, float(np.max(np.abs(h))) if h.size else 0.0)
    return bool(np.max(np.abs(h - h.conj().T)) <= tol * scale)


def _jacobi_pair(app: float, aqq: float, apq: complex):
    """Rotation (c, s, phase) annihilating the off-diagonal element apq."""
    mag = abs(apq)
    phase = apq / mag
    if app == aqq:
        t = 1.0
    else:
        tau = (app - aqq) / (2.0 * mag)
        t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    return c, t * c, phase


def hermitian_eig(h: np.ndarray) -> EigenDecomposition:
    """Diagonalize a Hermitian matrix by cyclic Jacobi rotations.

    The input is checked for Hermiticity, symmetrized, and swept until the
    off-diagonal Frobenius norm drops below OFFDIAG_TOL relative to ||H||_F
    (at most MAX_SWEEPS sweeps). Eigenvalues come back sorted ascending with
    unit-norm eigenvector columns in matching order. Each eigenvector's
    global phase is fixed by making its largest-magnitude component real
    and positive (lowest index wins ties), so repeated calls are bit-stable.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if not is_hermitian(h):
        raise ValueError("matrix is not Hermitian within tolerance")
    n = h.shape[0]
    a = (h + h.conj().T) / 2.0
    v = np.eye(n, dtype=complex)

    norm = np.linalg.norm(a)
    if norm == 0.0:
        return EigenDecomposition(np.zeros(n), v)

    converged = False
    for _ in range(MAX_SWEEPS):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= OFFDIAG_TOL * norm:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) == 0.0:
                    continue
                c, s, ph = _jacobi_pair(a[p, p].real, a[q, q].real, apq)
                # columns: A <- A J, with J[pp]=c, J[pq]=-s*ph, J[qp]=s*conj(ph), J[qq]=c
                col_p = c * a[:, p] + s * np.conj(ph) * a[:, q]
                col_q = -s * ph * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = col_p, col_q
                # rows: A <- J^dagger A
                row_p = c * a[p, :] + s * ph * a[q, :]
                row_q = -s * np.conj(ph) * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = row_p, row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vcol_p = c * v[:, p] + s * np.conj(ph) * v[:, q]
                vcol_q = -s * ph * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = vcol_p, vcol_q
    if not converged:
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        raise ConvergenceError(
            f"Jacobi eigensolver did not converge after {MAX_SWEEPS} sweeps on a "
            f"{n}x{n} matrix (|H|_F={norm:.6e}, off-diagonal residual={off:.3e})"
        )

    eigenvalues = np.diag(a).real.copy()
    order = np.argsort(eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    vectors = v[:, order]
    for j in range(n):
        col = vectors[:, j]
        k = int(np.argmax(np.abs(col)))
        ph = col[k] / abs(col[k])
        vectors[:, j] = col * np.conj(ph)
    return EigenDecomposition(eigenvalues, vectors)
