"""Closed-form weak-field steady states and the perturbative cascade solver.

Two driving regimes admit closed forms when the two upper-level decay rates
are equal (``gamma_u == gamma_v == gamma_a``):

* two-photon only (``q`` drive, no one-photon couplings): the upper-level
  populations are single Lorentzians in the detuning and the coherence
  follows from the same second-order solution;
* one-photon cascade (``omega_ab``, ``omega_bc`` drives, ``q = 0``): the
  populations are products of the step resonance and the two-photon
  resonance, and the upper-level coherence is a four-term expression whose
  addends correspond to the four second/third-order pathways feeding it.

``cascade_solver`` solves the same hierarchy numerically, stage by stage,
straight from the Liouvillian rows.  It is an oracle that is independent of
both the closed forms and the full 25x25 kernel solve: each stage is a small
well-scaled linear solve, so it does not suffer the absolute roundoff floor
of the global solve at extremely weak driving.

Conventions inside this module (all real):

    w   = delta_1ph + Delta/2          c->b step detuning
    u+  = delta_1ph - Delta/2 + omega12/2   b->a1 step detuning
    u-  = delta_1ph - Delta/2 - omega12/2   b->a2 step detuning
    v-  = Delta - omega12/2           two-photon detuning from a1
    v+  = Delta + omega12/2           two-photon detuning from a2
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qcore import DIM, Level
from .lindblad import steady_state
from .model import ModelParams, build_model_liouvillian


class RegimeError(ValueError):
    """Parameters violate the validity regime of a closed-form solution."""


@dataclass(frozen=True)
class WeakFieldSolution:
    """Leading-order steady-state elements of the upper doublet.

    ``rho_bb`` is 0 in the two-photon-only regime (no coherent population of
    the intermediate level at this order).
    """

    rho11: float
    rho22: float
    re_rho12: float
    rho_bb: float
    regime: str  # "two_photon_only" | "one_photon_cascade"


def _gamma_a(params: ModelParams) -> float:
    if not math.isclose(params.gamma_u, params.gamma_v, rel_tol=1e-12, abs_tol=0.0):
        raise RegimeError(
            f"closed forms require gamma_u == gamma_v, got {params.gamma_u} "
            f"and {params.gamma_v}")
    return params.gamma_u


def _detunings(params: ModelParams):
    d, dl, om = params.delta_2ph, params.delta_1ph, params.omega12
    w = dl + d / 2.0
    up = dl - d / 2.0 + om / 2.0
    um = dl - d / 2.0 - om / 2.0
    vm = d - om / 2.0
    vp = d + om / 2.0
    return w, up, um, vm, vp


def two_photon_weak(params: ModelParams) -> WeakFieldSolution:
    """Weak two-photon driving: Lorentzian populations and their coherence.

    Valid for ``q`` much smaller than the decay rates and no one-photon
    drives.  Note the level-label convention of this closed form: ``rho11``
    peaks at ``Delta = -omega12/2``.  The numeric steady state of the model
    Hamiltonian peaks the |a1> population at ``Delta = +omega12/2``, so the
    two labels are swapped relative to the full solve (the intensities,
    which are symmetric under the swap, are unaffected).
    """
    ga = _gamma_a(params)
    _, _, _, vm, vp = _detunings(params)
    q2 = params.q ** 2
    rho11 = q2 / (vp * vp + ga * ga)
    rho22 = q2 / (vm * vm + ga * ga)
    d, om = params.delta_2ph, params.omega12
    re12 = (q2 * (d * d - (om / 2.0) ** 2 + ga * ga)
            / ((vp * vp + ga * ga) * (vm * vm + ga * ga)))
    return WeakFieldSolution(rho11=rho11, rho22=rho22, re_rho12=re12,
                             rho_bb=0.0, regime="two_photon_only")


def _require_cascade(params: ModelParams) -> float:
    ga = _gamma_a(params)
    if params.q != 0.0:
        raise RegimeError(
            f"cascade closed forms require q = 0, got q = {params.q}")
    return ga


def cascade_weak(params: ModelParams, literal_rho_bb: bool = False) -> WeakFieldSolution:
    """Weak one-photon cascade driving: fourth-order populations/coherence.

    ``rho_bb`` defaults to the second-order result ``omega_bc**2 / ((Delta/2
    + delta)**2 + gamma_b**2/4)``; ``literal_rho_bb=True`` substitutes an
    ``omega_ab * omega_bc`` numerator instead (a historical variant kept
    reproducible; the cascade solver adjudicates in favor of the default).
    """
    ga = _require_cascade(params)
    gb = params.gamma_b
    w, _, _, vm, vp = _detunings(params)
    dw = w * w + gb * gb / 4.0
    o2 = params.omega_ab ** 2 * params.omega_bc ** 2
    rho11 = o2 / (dw * (vm * vm + ga * ga))
    rho22 = o2 / (dw * (vp * vp + ga * ga))
    if literal_rho_bb:
        rho_bb = params.omega_ab * params.omega_bc / dw
    else:
        rho_bb = params.omega_bc ** 2 / dw
    return WeakFieldSolution(rho11=rho11, rho22=rho22,
                             re_rho12=upper_level_coherence(params),
                             rho_bb=rho_bb, regime="one_photon_cascade")


def _coherence_factors(params: ModelParams):
    ga = _require_cascade(params)
    gb = params.gamma_b
    w, up, um, vm, vp = _detunings(params)
    fw = gb / 2.0 - 1j * w
    f1 = ga - 1j * vm
    f2 = ga - 1j * vp
    g1 = (ga + gb / 2.0) + 1j * up
    g2 = (ga + gb / 2.0) + 1j * um
    z = 2.0 * ga + 1j * params.omega12
    return fw, f1, f2, g1, g2, z, w, gb


def coherence_addends(params: ModelParams) -> tuple[float, float, float, float]:
    """The four pathway contributions to Re rho_12 in the cascade regime.

    Addends 1 and 2 route through the second-order two-photon coherences of
    |a1> and |a2|; addends 3 and 4 route through the second-order
    intermediate-level population.  Each is a real rational function of the
    detunings; they are evaluated here in complex-product form, which is
    algebraically identical to the expanded rational form but immune to
    transcription slips.  ``coherence_audit`` checks every addend against a
    stage-isolated numeric solve.
    """
    fw, f1, f2, g1, g2, z, w, gb = _coherence_factors(params)
    o4 = params.omega_ab ** 2 * params.omega_bc ** 2
    bb = params.omega_bc ** 2 / (w * w + gb * gb / 4.0)
    a1 = o4 * (1.0 / (z * fw * f1 * g1)).real
    a2 = o4 * (1.0 / (z * np.conj(fw) * np.conj(f2) * np.conj(g2))).real
    a3 = params.omega_ab ** 2 * bb * (1.0 / (z * g1)).real
    a4 = params.omega_ab ** 2 * bb * (1.0 / (z * np.conj(g2))).real
    return (a1, a2, a3, a4)


def upper_level_coherence(params: ModelParams) -> float:
    """Full weak-field Re rho_12 for cascade driving (sum of the four addends)."""
    return float(sum(coherence_addends(params)))


def coherence_large_splitting(params: ModelParams) -> float:
    """Large-splitting limit of the cascade coherence.

    Keeps only the leading pathway when ``omega12`` dwarfs every rate and
    detuning: a single negative Lorentzian at the step resonance,

        -omega_ab^2 omega_bc^2 / [(omega12/2)^2 ((Delta/2+delta)^2 + (gamma_b/2)^2)].
    """
    _require_cascade(params)
    gb = params.gamma_b
    w = params.delta_1ph + params.delta_2ph / 2.0
    o4 = params.omega_ab ** 2 * params.omega_bc ** 2
    return -o4 / ((params.omega12 / 2.0) ** 2 * (w * w + (gb / 2.0) ** 2))


def lorentzian_intensity(params: ModelParams, p: float, gamma: float) -> float:
    """Three-Lorentzian limit of the cascade-driving intensity.

    Valid when ``omega12`` is much larger than all rates and ``delta_1ph``:
    side peaks at ``Delta = +/- omega12/2`` with width ``gamma_a`` and a
    central peak at ``Delta = -2 delta_1ph`` with width ``gamma_b/2`` whose
    weight ``(1 - p)/2`` vanishes for parallel dipoles (p = 1).
    """
    ga = _require_cascade(params)
    if abs(p) > 1:
        raise ValueError(f"|p| must be <= 1, got {p}")
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    gb = params.gamma_b
    w, _, _, vm, vp = _detunings(params)
    pref = 16.0 * gamma * params.omega_ab ** 2 * params.omega_bc ** 2 / params.omega12 ** 2
    side = 1.0 / (vm * vm + ga * ga) + 1.0 / (vp * vp + ga * ga)
    central = 0.5 * (1.0 - p) / (w * w + (gb / 2.0) ** 2)
    return pref * (side + central)


# ---------------------------------------------------------------------------
# Stage-by-stage numeric solver for the weak-field hierarchy.
# ---------------------------------------------------------------------------

#: Elements solved at each perturbative order in the drive amplitude.
#: Stage 0 is the ground population, fixed at 1.
_STAGES: tuple[tuple[tuple[int, int], ...], ...] = (
    ((Level.C, Level.C),),
    ((Level.B, Level.C), (Level.C, Level.B)),
    ((Level.B, Level.B),
     (Level.A1, Level.C), (Level.C, Level.A1),
     (Level.A2, Level.C), (Level.C, Level.A2)),
    ((Level.A1, Level.B), (Level.B, Level.A1),
     (Level.A2, Level.B), (Level.B, Level.A2)),
    ((Level.A1, Level.A1), (Level.A2, Level.A2),
     (Level.A1, Level.A2), (Level.A2, Level.A1)),
)


def _flat(i: int, j: int) -> int:
    return int(i) + DIM * int(j)


def cascade_elements(params: ModelParams,
                     source_mask=None) -> dict[tuple[int, int], complex]:
    """Solve the truncated weak-field hierarchy stage by stage.

    Each stage is a small linear solve: the Liouvillian rows of that stage's
    elements, restricted to same-stage columns, driven by the lower-stage
    solutions as sources.  Returns every solved element keyed by (row, col)
    level indices, including the exact normalization ``rho_cc = 1``.

    ``source_mask``, if given, is a set of (row, col) index pairs; elements
    outside it are zeroed when used as sources for *later* stages.  This
    isolates individual pathways (used by :func:`coherence_audit`).

    Raises
    ------
    RegimeError
        If ``q != 0`` (the hierarchy presumes pure step-wise driving) or a
        stage solve is singular.
    """
    if params.q != 0.0:
        raise RegimeError(
            f"cascade solver requires q = 0, got q = {params.q}")
    liouvillian = build_model_liouvillian(params)
    mat = liouvillian.matrix
    mask = (None if source_mask is None
            else {(int(i), int(j)) for i, j in source_mask})

    def as_source(pair: tuple[int, int], value: complex) -> complex:
        return value if (mask is None or pair in mask) else 0.0j

    ground = (int(Level.C), int(Level.C))
    known: dict[tuple[int, int], complex] = {ground: 1.0 + 0.0j}
    masked: dict[tuple[int, int], complex] = {ground: as_source(ground, 1.0 + 0.0j)}

    for stage in _STAGES[1:]:
        idx = [(int(i), int(j)) for i, j in stage]
        rows = [_flat(i, j) for i, j in idx]
        a = mat[np.ix_(rows, rows)]
        b = np.zeros(len(rows), dtype=complex)
        for (k, l), value in masked.items():
            if value != 0.0:
                b -= mat[rows, _flat(k, l)] * value
        try:
            x = np.linalg.solve(a, b)
        except np.linalg.LinAlgError as exc:
            raise RegimeError(
                f"singular stage solve for elements {idx}; parameters are "
                "outside the weak-field hierarchy") from exc
        for pair, value in zip(idx, x):
            known[pair] = complex(value)
            masked[pair] = as_source(pair, complex(value))
    return known


def cascade_solver(params: ModelParams) -> WeakFieldSolution:
    """Fourth-order populations and coherence from the staged numeric solve.

    Works for ``gamma_u != gamma_v`` as well (the stage solves pick up the
    extra cross couplings automatically), unlike the closed forms.
    """
    elems = cascade_elements(params)
    a1, a2 = int(Level.A1), int(Level.A2)
    bb = int(Level.B)
    return WeakFieldSolution(
        rho11=elems[(a1, a1)].real,
        rho22=elems[(a2, a2)].real,
        re_rho12=elems[(a1, a2)].real,
        rho_bb=elems[(bb, bb)].real,
        regime="one_photon_cascade",
    )


# ---------------------------------------------------------------------------
# Per-addend audit of the closed-form coherence.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoherenceAuditRow:
    """One addend of the closed-form coherence against its staged value."""

    addend: int
    closed_form: float
    staged: float
    abs_diff: float
    rel_diff: float


@dataclass(frozen=True)
class CoherenceAudit:
    """Structured comparison of the coherence closed form.

    ``rows`` hold the per-addend checks against pathway-isolated staged
    solves; ``numeric_re_rho12`` is the full stationary solve (the orders
    beyond the hierarchy make it differ from ``closed_total`` at relative
    order drive^2 / rate^2).
    """

    rows: tuple[CoherenceAuditRow, ...]
    closed_total: float
    staged_total: float
    numeric_re_rho12: float

    def worst_rel_diff(self) -> float:
        return max(row.rel_diff for row in self.rows)


def _staged_addends(params: ModelParams) -> tuple[float, float, float, float]:
    """Pathway-isolated coherence contributions from the staged solve.

    The stage-3 sources split into the intermediate-population pathway
    ((b, b)) and the two-photon-coherence pathway ((a1, c), (a2, c) and
    conjugates); within stage 4 the coherence row picks them up separately
    via its (a1, b) and (b, a2) couplings.
    """
    a1, a2, b, c = (int(Level.A1), int(Level.A2), int(Level.B), int(Level.C))
    common = {(c, c), (b, c), (c, b),
              (a1, b), (b, a1), (a2, b), (b, a2),
              (a1, a1), (a2, a2), (a1, a2), (a2, a1)}
    # Split the stage-3 sources: two-photon coherences vs intermediate population.
    coh_sources = common | {(a1, c), (c, a1), (a2, c), (c, a2)}
    pop_sources = common | {(b, b)}

    via_coh = cascade_elements(params, source_mask=coh_sources)
    via_pop = cascade_elements(params, source_mask=pop_sources)

    ga = _gamma_a(params)
    z = 2.0 * ga + 1j * params.omega12
    oab = params.omega_ab
    # rho12 = -i oab (rho_b2 - rho_1b) / z, split by pathway and by which of
    # the two stage-3 elements carries it.
    a1_term = (1j * oab * via_coh[(a1, b)] / z).real
    a2_term = (-1j * oab * via_coh[(b, a2)] / z).real
    a3_term = (1j * oab * via_pop[(a1, b)] / z).real
    a4_term = (-1j * oab * via_pop[(b, a2)] / z).real
    return (a1_term, a2_term, a3_term, a4_term)


def coherence_audit(params: ModelParams) -> CoherenceAudit:
    """Compare every closed-form coherence addend against the staged oracle.

    Relative differences are measured against the largest addend magnitude
    so near-zero addends do not inflate the report.
    """
    closed = coherence_addends(params)
    staged = _staged_addends(params)
    scale = max(max(abs(x) for x in closed), max(abs(x) for x in staged))
    rows = []
    for n, (cf, st) in enumerate(zip(closed, staged), start=1):
        diff = abs(cf - st)
        rows.append(CoherenceAuditRow(
            addend=n, closed_form=cf, staged=st, abs_diff=diff,
            rel_diff=diff / scale if scale > 0 else 0.0))
    numeric = steady_state(build_model_liouvillian(params)).rho.coherence(
        Level.A1, Level.A2).real
    return CoherenceAudit(rows=tuple(rows),
                          closed_total=float(sum(closed)),
                          staged_total=float(sum(staged)),
                          numeric_re_rho12=numeric)
