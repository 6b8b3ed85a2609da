"""Five-level molecule: drives, interference-bearing decay channels, intensity.

The molecule has two close upper levels |a1>, |a2> (splitting ``omega12``),
two well-separated intermediate levels |b>, |d>, and the ground level |c>.
A single laser drives the ladder three ways: one-photon c->b (``omega_bc``),
one-photon b->a1,a2 (``omega_ab``), and an effective two-photon c->a1,a2
(``q``).  In the rotating frame the Hamiltonian is time independent with
diagonal (omega12/2 - Delta, -omega12/2 - Delta, -Delta/2 - delta, 0, 0).

Spontaneous emission from the upper doublet interferes: for mutual dipole
polarization p the two decay channels to a given intermediate level are the
symmetric and antisymmetric combinations weighted by (1 +/- p).  The emitted
intensity on a transition with rate ``gamma`` and polarization ``p`` is

    I = gamma * (rho_11 + rho_22 + 2 p Re rho_12).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .qcore import DIM, Level, DensityMatrix, ket_bra
from .lindblad import build_liouvillian, steady_state


@dataclass(frozen=True)
class ModelParams:
    """All physical knobs, in one common arbitrary frequency unit.

    ``gamma_d`` is never pinned by the reference curves; it defaults to
    ``gamma_b``.  The intensity traces are insensitive to it in the
    weak-driving regime (it only gates the d -> c return flow).
    ``p_u = -1`` (antiparallel, uv transition) and ``p_v = +1`` (parallel,
    visible transition) are the physical defaults.
    """

    omega_ab: float = 0.0
    omega_bc: float = 0.0
    q: float = 0.0
    omega12: float = 6.0
    delta_2ph: float = 0.0
    delta_1ph: float = 0.0
    gamma_u: float = 0.5
    gamma_v: float = 0.5
    gamma_b: float = 1.0
    gamma_d: float | None = None
    p_u: float = -1.0
    p_v: float = 1.0

    def __post_init__(self):
        if self.gamma_d is None:
            object.__setattr__(self, "gamma_d", float(self.gamma_b))
        for name in ("omega_ab", "omega_bc", "q"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.omega12 <= 0:
            raise ValueError(f"omega12 must be > 0, got {self.omega12}")
        for name in ("gamma_u", "gamma_v", "gamma_b", "gamma_d"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        for name in ("p_u", "p_v"):
            if abs(getattr(self, name)) > 1:
                raise ValueError(f"|{name}| must be <= 1, got {getattr(self, name)}")

    def replace(self, **kwargs) -> "ModelParams":
        """Copy with some fields replaced (delta sweeps etc.)."""
        current = {
            "omega_ab": self.omega_ab, "omega_bc": self.omega_bc, "q": self.q,
            "omega12": self.omega12, "delta_2ph": self.delta_2ph,
            "delta_1ph": self.delta_1ph, "gamma_u": self.gamma_u,
            "gamma_v": self.gamma_v, "gamma_b": self.gamma_b,
            "gamma_d": self.gamma_d, "p_u": self.p_u, "p_v": self.p_v,
        }
        current.update(kwargs)
        return ModelParams(**current)


@dataclass(frozen=True)
class IntensityTriple:
    """Scaled emission rates: uv transition, visible transition, and the
    hypothetical orthogonal-dipole (p = 0) trace."""

    i_u: float
    i_v: float
    i_p0: float


def build_hamiltonian(params: ModelParams) -> np.ndarray:
    """Rotating-frame Hamiltonian of the driven molecule.

    The |d> diagonal entry is fixed at 0: |d> couples only through decay, so
    its rotating-frame energy cannot affect any observable (covered by a
    regression test).
    """
    h = np.zeros((DIM, DIM), dtype=complex)
    h[Level.A1, Level.A1] = params.omega12 / 2.0 - params.delta_2ph
    h[Level.A2, Level.A2] = -params.omega12 / 2.0 - params.delta_2ph
    h[Level.B, Level.B] = -params.delta_2ph / 2.0 - params.delta_1ph
    h[Level.A1, Level.B] = h[Level.A2, Level.B] = params.omega_ab
    h[Level.A1, Level.C] = h[Level.A2, Level.C] = params.q
    h[Level.B, Level.C] = params.omega_bc
    h[Level.B, Level.A1] = h[Level.B, Level.A2] = params.omega_ab
    h[Level.C, Level.A1] = h[Level.C, Level.A2] = params.q
    h[Level.C, Level.B] = params.omega_bc
    return h


def build_collapse_ops(params: ModelParams) -> list[np.ndarray]:
    """Interference-bearing collapse operators, already rate-scaled.

    Upper-doublet emission to |b> (rate ``gamma_v``) and to |d>
    (``gamma_u``) each split into a symmetric and an antisymmetric channel
    weighted by (1 + p) and (1 - p); channels with zero weight are dropped.
    The two intermediate levels decay to ground at ``gamma_b``, ``gamma_d``.

    The per-level total decay rate is p-independent (gamma_u + gamma_v on
    each upper level); p only redistributes it between the combinations,
    which is what produces the interference cross terms.
    """
    sym_b = (ket_bra(Level.B, Level.A1) + ket_bra(Level.B, Level.A2)) / math.sqrt(2)
    asym_b = (ket_bra(Level.B, Level.A1) - ket_bra(Level.B, Level.A2)) / math.sqrt(2)
    sym_d = (ket_bra(Level.D, Level.A1) + ket_bra(Level.D, Level.A2)) / math.sqrt(2)
    asym_d = (ket_bra(Level.D, Level.A1) - ket_bra(Level.D, Level.A2)) / math.sqrt(2)
    channels = [
        (params.gamma_v * (1.0 + params.p_v), sym_b),
        (params.gamma_v * (1.0 - params.p_v), asym_b),
        (params.gamma_u * (1.0 + params.p_u), sym_d),
        (params.gamma_u * (1.0 - params.p_u), asym_d),
        (params.gamma_b, ket_bra(Level.C, Level.B)),
        (params.gamma_d, ket_bra(Level.C, Level.D)),
    ]
    return [math.sqrt(rate) * op for rate, op in channels if rate > 0.0]


def build_model_liouvillian(params: ModelParams):
    """Convenience: Liouvillian of the full driven-dissipative model."""
    return build_liouvillian(build_hamiltonian(params), build_collapse_ops(params))


def intensity(rho: DensityMatrix, gamma: float, p: float) -> float:
    """Scaled steady-state emission rate gamma*(rho11 + rho22 + 2 p Re rho12).

    Nonnegative for any physical state and |p| <= 1; values in
    [-1e-12, 0) from roundoff are clipped to 0.
    """
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    if abs(p) > 1:
        raise ValueError(f"|p| must be <= 1, got {p}")
    value = gamma * (rho.population(Level.A1) + rho.population(Level.A2)
                     + 2.0 * p * rho.coherence(Level.A1, Level.A2).real)
    if value < 0.0:
        if value < -1e-12:
            raise ValueError(f"intensity {value:.3e} below the roundoff floor; "
                             "state is not physical")
        value = 0.0
    return value


def solve_point(params: ModelParams) -> tuple[DensityMatrix, IntensityTriple]:
    """Stationary state and its three intensity traces at one detuning."""
    rho = steady_state(build_model_liouvillian(params)).rho
    triple = IntensityTriple(
        i_u=intensity(rho, params.gamma_u, params.p_u),
        i_v=intensity(rho, params.gamma_v, params.p_v),
        i_p0=intensity(rho, params.gamma_u, 0.0),
    )
    return rho, triple


def default_timestep(params: ModelParams) -> float:
    """Fixed RK4 step: 0.01 over the largest rate/drive/splitting magnitude."""
    scale = max(params.omega_ab, params.omega_bc, params.q, params.omega12,
                abs(params.delta_2ph), abs(params.delta_1ph),
                params.gamma_u, params.gamma_v, params.gamma_b, params.gamma_d)
    return 0.01 / scale
