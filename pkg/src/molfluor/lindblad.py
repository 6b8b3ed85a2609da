"""Liouvillian construction, stationary-state solve, and a propagation oracle.

The generator acts on column-stacked states (see :mod:`molfluor.qcore`):

    L = -i (I (x) H - H^T (x) I)
        + sum_k [ conj(C_k) (x) C_k
                  - (I (x) C_k^dag C_k + (C_k^dag C_k)^T (x) I) / 2 ]

so that ``unvectorize(L @ vectorize(rho))`` equals
``-i[H, rho] + sum_k D[C_k] rho`` with the dissipator
``D[A]B = A B A^dag - (A^dag A B + B A^dag A) / 2``.

The stationary state is found by a direct dense solve of ``L v = 0`` with the
row of the (c, c) element replaced by the trace constraint ``sum_i rho_ii = 1``.
A fixed-step RK4 integrator serves as an independent oracle for that solve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import (
    DIM,
    HERMITICITY_TOL,
    LEVEL_LABELS,
    Level,
    DensityMatrix,
    hermitian_check,
    unvectorize,
    vectorize,
)

#: Residual bound for an accepted stationary state, relative to max(1, ||L||_inf).
RESIDUAL_TOL = 1e-10
#: Largest tolerated trace drift over a full RK4 run.
TRACE_DRIFT_TOL = 1e-8


class SteadyStateError(RuntimeError):
    """The stationary-state solve did not produce a reliable answer."""


class NonUniqueSteadyStateError(SteadyStateError):
    """The kernel of the Liouvillian is degenerate (no unique stationary state)."""


class IntegrationError(RuntimeError):
    """Fixed-step integration became unstable.

    Attributes
    ----------
    time:
        Evolution time at which the first non-finite entry appeared.
    """

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time


def dissipator_apply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Single-channel dissipator  D[a] b = a b a^dag - {a^dag a, b} / 2."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    ada = a.conj().T @ a
    return a @ b @ a.conj().T - 0.5 * (ada @ b + b @ ada)


@dataclass(frozen=True, eq=False)
class Liouvillian:
    """Immutable generator: 25x25 matrix plus its ingredients."""

    matrix: np.ndarray
    hamiltonian: np.ndarray
    collapses: tuple[np.ndarray, ...]

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Action of the generator on a 5x5 operator."""
        return unvectorize(self.matrix @ vectorize(rho))

    @property
    def norm_inf(self) -> float:
        return float(np.abs(self.matrix).sum(axis=1).max())


@dataclass(frozen=True)
class SteadyState:
    """Stationary state together with its kernel residual ||L vec(rho)||_inf."""

    rho: DensityMatrix
    residual: float


def build_liouvillian(h: np.ndarray, collapses) -> Liouvillian:
    """Assemble the generator from a Hamiltonian and collapse operators.

    Parameters
    ----------
    h:
        Hermitian 5x5 Hamiltonian (validated to ``HERMITICITY_TOL``).
    collapses:
        Iterable of 5x5 collapse operators, each already scaled so its
        dissipator enters with unit prefactor.
    """
    h = np.asarray(h, dtype=complex)
    if h.shape != (DIM, DIM):
        raise ValueError(f"Hamiltonian must be {DIM}x{DIM}, got {h.shape}")
    if not hermitian_check(h, HERMITICITY_TOL):
        raise ValueError("Hamiltonian is not Hermitian within tolerance "
                         f"{HERMITICITY_TOL}")
    cops = tuple(np.asarray(c, dtype=complex) for c in collapses)
    for c in cops:
        if c.shape != (DIM, DIM):
            raise ValueError(f"collapse operator must be {DIM}x{DIM}, got {c.shape}")
        if not np.isfinite(c).all():
            raise ValueError("collapse operator contains non-finite entries")

    eye = np.eye(DIM, dtype=complex)
    mat = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for c in cops:
        cdc = c.conj().T @ c
        mat += np.kron(c.conj(), c) - 0.5 * (np.kron(eye, cdc) + np.kron(cdc.T, eye))
    return Liouvillian(matrix=mat, hamiltonian=h.copy(), collapses=cops)


#: Flattened index of the (c, c) element, whose row carries the trace constraint.
_TRACE_ROW = int(Level.C) + DIM * int(Level.C)
_DIAGONAL_SLOTS = tuple(i + DIM * i for i in range(DIM))


def steady_state(liouvillian: Liouvillian) -> SteadyState:
    """Solve ``L vec(rho) = 0`` with the unit-trace constraint imposed.

    The (c, c) row of the 25x25 system is replaced by ``sum_i rho_ii = 1``
    and the system solved directly.  The result is Hermitized and its trace
    renormalized before validation against the density-matrix invariants.

    Raises
    ------
    NonUniqueSteadyStateError
        If the constrained system is singular, i.e. the stationary state is
        degenerate.  Degenerate states are reported, never averaged.
    SteadyStateError
        If the residual exceeds ``RESIDUAL_TOL * max(1, ||L||_inf)``.
    """
    mat = liouvillian.matrix.copy()
    rhs = np.zeros(DIM * DIM, dtype=complex)
    mat[_TRACE_ROW, :] = 0.0
    for k in _DIAGONAL_SLOTS:
        mat[_TRACE_ROW, k] = 1.0
    rhs[_TRACE_ROW] = 1.0
    try:
        v = np.linalg.solve(mat, rhs)
    except np.linalg.LinAlgError as exc:
        raise NonUniqueSteadyStateError(
            "constrained stationary system is singular; the model has no "
            "unique steady state (check that every level can relax)") from exc

    rho = unvectorize(v)
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if tr <= 0:
        raise SteadyStateError(f"stationary solve returned trace {tr:.3e}")
    rho /= tr

    residual = float(np.abs(liouvillian.matrix @ vectorize(rho)).max())
    bound = RESIDUAL_TOL * max(1.0, liouvillian.norm_inf)
    if residual > bound:
        raise SteadyStateError(
            f"stationary residual {residual:.3e} exceeds {bound:.3e}; "
            "the steady state is ill-conditioned or nearly degenerate")
    return SteadyState(rho=DensityMatrix.from_matrix(rho, normalize=True),
                       residual=residual)


def time_evolve(liouvillian: Liouvillian, rho0: DensityMatrix,
                t_final: float, dt: float) -> DensityMatrix:
    """Propagate ``rho0`` to ``t_final`` with fixed-step classical RK4.

    Serves as an oracle for :func:`steady_state`: the RK4 fixed points are
    exactly the kernel of the generator, so for long times the integrated
    state converges to the stationary state independently of the linear
    solve.  Trace is preserved to roundoff because every stage has zero
    trace; a drift beyond ``TRACE_DRIFT_TOL`` raises.

    Raises
    ------
    IntegrationError
        If any entry becomes non-finite (step too large for the spectrum);
        carries the offending time.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_final < 0:
        raise ValueError(f"t_final must be nonnegative, got {t_final}")
    mat = liouvillian.matrix
    v = vectorize(rho0.matrix).astype(complex)
    steps = int(round(t_final / dt))
    t = 0.0
    # overflow on an unstable trajectory is expected and caught below
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(steps):
            k1 = mat @ v
            k2 = mat @ (v + 0.5 * dt * k1)
            k3 = mat @ (v + 0.5 * dt * k2)
            k4 = mat @ (v + dt * k3)
            v = v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += dt
            if not np.isfinite(v).all():
                raise IntegrationError(
                    f"integration unstable at t = {t:.6g} (dt = {dt:.3g} too "
                    "large for the fastest rate)", time=t)
    rho = unvectorize(v)
    drift = abs(np.trace(rho).real - 1.0)
    if drift > TRACE_DRIFT_TOL:
        raise IntegrationError(
            f"trace drifted by {drift:.3e} over the run", time=t)
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix.from_matrix(rho, normalize=True)


def eom_rows(liouvillian: Liouvillian, drop_tol: float = 1e-14):
    """Per-element equations of motion as coefficient maps.

    Returns ``{(i_label, j_label): {(k_label, l_label): coeff}}`` where the
    time derivative of element (i, j) is ``sum coeff * rho_kl``.  Entries
    with ``|coeff| <= drop_tol`` are omitted.  Useful for auditing the
    generator against hand-written equation listings.
    """
    rows: dict[tuple[str, str], dict[tuple[str, str], complex]] = {}
    mat = liouvillian.matrix
    for i in range(DIM):
        for j in range(DIM):
            row = mat[i + DIM * j]
            terms: dict[tuple[str, str], complex] = {}
            for col in range(DIM * DIM):
                coeff = row[col]
                if abs(coeff) > drop_tol:
                    k, l = col % DIM, col // DIM
                    terms[(LEVEL_LABELS[k], LEVEL_LABELS[l])] = complex(coeff)
            rows[(LEVEL_LABELS[i], LEVEL_LABELS[j])] = terms
    return rows
