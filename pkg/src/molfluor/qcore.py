"""Dense complex operators on the five-level Hilbert space.

Basis convention used throughout the package (fixed, never reordered):

    index 0 -> |a1>   upper level, higher by omega12/2
    index 1 -> |a2>   upper level, lower by omega12/2
    index 2 -> |b>    intermediate level (visible decay target)
    index 3 -> |c>    ground level
    index 4 -> |d>    intermediate level (ultraviolet decay target)

Vectorization is column-stacking: ``vectorize(rho)[i + 5*j] == rho[i, j]``,
so that ``vec(A @ X @ B) == kron(B.T, A) @ vec(X)``.  Every superoperator in
:mod:`molfluor.lindblad` relies on this convention.

Operators are plain complex ``numpy`` arrays of shape (5, 5); the only
wrapped type is :class:`DensityMatrix`, which enforces the physical-state
invariants (Hermiticity, unit trace, positivity) at construction time.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

#: Hilbert-space dimension of the model.
DIM = 5

#: Tolerance for Hermiticity checks (max elementwise |A - A^dag|).
HERMITICITY_TOL = 1e-12
#: Tolerance for the unit-trace invariant of a density matrix.
TRACE_TOL = 1e-10
#: Eigenvalue floor for positive-semidefiniteness checks.
POSITIVITY_TOL = 1e-9


class Level(enum.IntEnum):
    """Named basis levels with their fixed indices."""

    A1 = 0
    A2 = 1
    B = 2
    C = 3
    D = 4

    @property
    def label(self) -> str:
        return self.name.lower()


#: Lowercase labels in basis order, used for equation-of-motion bookkeeping.
LEVEL_LABELS = tuple(lv.label for lv in Level)


def identity() -> np.ndarray:
    """5x5 complex identity."""
    return np.eye(DIM, dtype=complex)


def ket_bra(i: int, j: int) -> np.ndarray:
    """Basis transition operator |i><j|."""
    op = np.zeros((DIM, DIM), dtype=complex)
    op[int(i), int(j)] = 1.0
    return op


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a).conj().T


def trace(a: np.ndarray) -> complex:
    """Matrix trace of a square operator."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"trace expects a square matrix, got shape {a.shape}")
    return complex(np.trace(a))


def hermitian_check(a: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    """True if max |a[i,j] - conj(a[j,i])| <= tol."""
    a = np.asarray(a)
    return bool(np.abs(a - a.conj().T).max() <= tol)


def positivity_check(a: np.ndarray, tol: float = POSITIVITY_TOL) -> bool:
    """True if the minimum eigenvalue of the Hermitian part is >= -tol."""
    a = np.asarray(a)
    herm = 0.5 * (a + a.conj().T)
    return bool(np.linalg.eigvalsh(herm).min() >= -tol)


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stack a 5x5 operator into a length-25 vector.

    ``vectorize(rho)[i + DIM*j] == rho[i, j]``.
    """
    rho = np.asarray(rho)
    if rho.shape != (DIM, DIM):
        raise ValueError(f"expected a {DIM}x{DIM} operator, got shape {rho.shape}")
    return rho.reshape(DIM * DIM, order="F")


def unvectorize(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vectorize`; exact round trip."""
    v = np.asarray(v)
    if v.shape != (DIM * DIM,):
        raise ValueError(f"expected a length-{DIM * DIM} vector, got shape {v.shape}")
    return v.reshape(DIM, DIM, order="F")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated 5x5 physical state: Hermitian, unit trace, positive.

    The wrapped array is a read-only copy, so instances are safe to share
    between concurrent workers.
    """

    matrix: np.ndarray

    @classmethod
    def from_matrix(cls, m: np.ndarray, normalize: bool = False) -> "DensityMatrix":
        """Validate ``m`` and wrap it.

        Parameters
        ----------
        m:
            Candidate 5x5 complex matrix.
        normalize:
            If True, divide by the trace before validation (used to scrub
            the roundoff left by linear solves and integrators).
        """
        m = np.asarray(m, dtype=complex)
        if m.shape != (DIM, DIM):
            raise ValueError(f"expected a {DIM}x{DIM} matrix, got shape {m.shape}")
        if not np.isfinite(m).all():
            raise ValueError("density matrix contains non-finite entries")
        if not hermitian_check(m):
            raise ValueError("density matrix is not Hermitian within tolerance "
                             f"{HERMITICITY_TOL}")
        if normalize:
            tr = np.trace(m).real
            if tr <= 0:
                raise ValueError(f"cannot normalize: trace = {tr}")
            m = m / tr
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace deviates from 1 by {abs(tr - 1.0):.3e}")
        if not positivity_check(m):
            lam = np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min()
            raise ValueError(f"density matrix not positive: min eigenvalue {lam:.3e}")
        m = m.copy()
        m.setflags(write=False)
        return cls(matrix=m)

    def population(self, level: int) -> float:
        """Diagonal element <level|rho|level> as a real number."""
        return float(self.matrix[int(level), int(level)].real)

    def coherence(self, i: int, j: int) -> complex:
        """Off-diagonal element <i|rho|j>."""
        return complex(self.matrix[int(i), int(j)])
