"""Detuning sweeps, peak detection, CSV emission, and bundled presets.

A sweep evaluates the model on a uniform grid of the two-photon detuning and
records the upper-level elements plus the three intensity traces.  The
``delta`` column is reported in units of ``gamma_u + gamma_v`` (the
conventional axis for these curves); every bundled preset has
``gamma_u + gamma_v == 1`` so the numbers coincide with the raw detuning.

Evaluation modes
----------------
numeric
    Full stationary solve of the 25x25 generator at every grid point.
analytic_2ph / analytic_cascade
    Closed-form weak-field solutions (see :mod:`molfluor.analytic`).  The
    ``rho_dd`` and ``rho_bb``/``rho_cc`` columns are filled from the exact
    steady-flux relations ``gamma_d rho_dd = i_u`` and
    ``gamma_b rho_bb = i_v`` where the closed form itself does not provide
    them.
cascade_solver
    Stage-by-stage numeric solve of the weak-field hierarchy.
compare
    ``run_sweep`` evaluates numerically; :func:`compare_sweep` additionally
    evaluates the matching closed form and reports deviations.

Every grid point is a pure function of the parameters, so points may be
evaluated in any order (or concurrently) with identical results; rows are
assembled in increasing detuning.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import peak_prominences

from .qcore import Level
from .model import IntensityTriple, ModelParams, solve_point
from . import analytic

CSV_HEADER = "delta,rho11,rho22,re_rho12,rho_bb,rho_cc,rho_dd,i_u,i_v,i_p0"
COLUMNS = tuple(CSV_HEADER.split(","))
MODES = ("numeric", "analytic_2ph", "analytic_cascade", "cascade_solver", "compare")
TRACE_IDS = ("i_u", "i_v", "i_p0")

PRESET_NAMES = ("fig2", "fig4", "fig5", "fig_delta", "fig_alpha", "fig_uv")


class CsvFormatError(ValueError):
    """A sweep CSV file does not conform to the documented format."""


class SweepError(RuntimeError):
    """A sweep aborted because one grid point failed to solve."""


@dataclass(frozen=True)
class SweepConfig:
    """A sweep specification: parameters, grid, mode, optional output path.

    ``delta_min``/``delta_max`` are in the same units as ``ModelParams``
    frequencies; ``params.delta_2ph`` is ignored (the grid replaces it).
    """

    params: ModelParams
    delta_min: float = -6.0
    delta_max: float = 6.0
    points: int = 241
    mode: str = "numeric"
    output_path: str | None = None

    def __post_init__(self):
        if not self.delta_min < self.delta_max:
            raise ValueError(
                f"delta_min must be < delta_max, got [{self.delta_min}, {self.delta_max}]")
        if self.points < 3:
            raise ValueError(f"points must be >= 3, got {self.points}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; choose from {MODES}")

    def grid(self) -> np.ndarray:
        return np.linspace(self.delta_min, self.delta_max, self.points)


@dataclass(frozen=True, eq=False)
class SweepResult:
    """Sweep table: one row per grid point, columns as in ``CSV_HEADER``."""

    data: np.ndarray  # shape (points, 10), float64

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 2 or data.shape[1] != len(COLUMNS):
            raise ValueError(f"sweep data must have {len(COLUMNS)} columns, "
                             f"got shape {data.shape}")
        if data.shape[0] < 1:
            raise ValueError("sweep data must have at least one row")
        if not np.all(np.diff(data[:, 0]) > 0):
            raise ValueError("rows must be strictly increasing in delta")
        object.__setattr__(self, "data", data)

    @property
    def rows(self) -> list[tuple[float, ...]]:
        return [tuple(row) for row in self.data]

    def column(self, name: str) -> np.ndarray:
        return self.data[:, COLUMNS.index(name)]

    @property
    def delta(self) -> np.ndarray:
        return self.data[:, 0]


@dataclass(frozen=True)
class PeakReport:
    """Detected local maxima of one intensity trace."""

    peaks: tuple[tuple[float, float, float], ...]  # (delta, height, prominence)
    trace_id: str

    @property
    def locations(self) -> tuple[float, ...]:
        return tuple(p[0] for p in self.peaks)


def evaluate_point(params: ModelParams, delta: float, mode: str,
                   delta_scale: float | None = None) -> tuple[float, ...]:
    """One sweep row at a single detuning (delta in raw frequency units).

    ``delta_scale`` defaults to ``gamma_u + gamma_v`` and divides the
    reported delta column only.
    """
    if delta_scale is None:
        delta_scale = params.gamma_u + params.gamma_v
    p = params.replace(delta_2ph=float(delta))
    if mode in ("numeric", "compare"):
        rho, triple = solve_point(p)
        return (delta / delta_scale,
                rho.population(Level.A1), rho.population(Level.A2),
                rho.coherence(Level.A1, Level.A2).real,
                rho.population(Level.B), rho.population(Level.C),
                rho.population(Level.D),
                triple.i_u, triple.i_v, triple.i_p0)

    if mode == "analytic_2ph":
        sol = analytic.two_photon_weak(p)
    elif mode == "analytic_cascade":
        sol = analytic.cascade_weak(p)
    elif mode == "cascade_solver":
        sol = analytic.cascade_solver(p)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    upper = sol.rho11 + sol.rho22
    i_u = max(p.gamma_u * (upper + 2.0 * p.p_u * sol.re_rho12), 0.0)
    i_v = max(p.gamma_v * (upper + 2.0 * p.p_v * sol.re_rho12), 0.0)
    i_p0 = max(p.gamma_u * upper, 0.0)
    # Steady-flux relations fill the columns the closed forms do not model.
    rho_dd = i_u / p.gamma_d
    rho_bb = sol.rho_bb if sol.rho_bb > 0.0 else i_v / p.gamma_b
    rho_cc = 1.0 - sol.rho11 - sol.rho22 - rho_bb - rho_dd
    return (delta / delta_scale, sol.rho11, sol.rho22, sol.re_rho12,
            rho_bb, rho_cc, rho_dd, i_u, i_v, i_p0)


def run_sweep(config: SweepConfig) -> SweepResult:
    """Evaluate the configured mode on the detuning grid.

    In ``compare`` mode this returns the numeric result (use
    :func:`compare_sweep` for the deviation report).  A failure at any grid
    point aborts the sweep and names the offending detuning.
    """
    scale = config.params.gamma_u + config.params.gamma_v
    rows = []
    for delta in config.grid():
        try:
            rows.append(evaluate_point(config.params, float(delta),
                                       config.mode, scale))
        except (ValueError, RuntimeError) as exc:
            if isinstance(exc, SweepError):
                raise
            raise SweepError(
                f"sweep failed at delta = {delta:.6g}: {exc}") from exc
    return SweepResult(data=np.array(rows, dtype=float))


@dataclass(frozen=True)
class CompareReport:
    """Numeric sweep against its matching closed form.

    ``max_rel_deviation`` maps each intensity column to the largest relative
    deviation over the grid points where the numeric trace exceeds 1% of its
    maximum (relative error below that threshold is dominated by the tails).
    """

    numeric: SweepResult
    analytic: SweepResult
    analytic_mode: str
    max_rel_deviation: dict[str, float]


def compare_sweep(config: SweepConfig) -> CompareReport:
    """Run numeric and closed-form sweeps side by side and compare."""
    p = config.params
    if p.q > 0.0 and p.omega_ab == 0.0 and p.omega_bc == 0.0:
        mode = "analytic_2ph"
    elif p.q == 0.0 and (p.omega_ab > 0.0 or p.omega_bc > 0.0):
        mode = "analytic_cascade"
    else:
        raise ValueError(
            "no closed form matches these drives (need pure two-photon or "
            "pure one-photon cascade driving)")
    numeric = run_sweep(SweepConfig(params=p, delta_min=config.delta_min,
                                    delta_max=config.delta_max,
                                    points=config.points, mode="numeric"))
    closed = run_sweep(SweepConfig(params=p, delta_min=config.delta_min,
                                   delta_max=config.delta_max,
                                   points=config.points, mode=mode))
    deviations = {}
    for name in TRACE_IDS:
        num = numeric.column(name)
        ana = closed.column(name)
        if num.max() > 0:
            mask = num > 0.01 * num.max()
            deviations[name] = float((np.abs(ana - num)[mask] / num[mask]).max())
        else:
            deviations[name] = 0.0
    return CompareReport(numeric=numeric, analytic=closed, analytic_mode=mode,
                         max_rel_deviation=deviations)


def detect_peaks(result: SweepResult, trace_id: str,
                 min_prominence_fraction: float = 0.02) -> PeakReport:
    """Local maxima of one intensity trace with a prominence floor.

    A peak is an interior grid point strictly greater than both neighbors
    whose topographic prominence (height above the higher of the two
    flanking minima) is at least ``min_prominence_fraction`` times the
    global maximum of the trace.  A flat zero trace yields an empty report.
    """
    if trace_id not in TRACE_IDS:
        raise ValueError(f"unknown trace {trace_id!r}; choose from {TRACE_IDS}")
    if not 0.0 < min_prominence_fraction < 1.0:
        raise ValueError("min_prominence_fraction must be in (0, 1), got "
                         f"{min_prominence_fraction}")
    y = result.column(trace_id)
    if len(y) < 3:
        raise ValueError(f"need at least 3 rows to detect peaks, got {len(y)}")
    top = y.max()
    if top <= 0.0:
        return PeakReport(peaks=(), trace_id=trace_id)

    interior = np.arange(1, len(y) - 1)
    strict = interior[(y[interior] > y[interior - 1]) & (y[interior] > y[interior + 1])]
    if strict.size == 0:
        return PeakReport(peaks=(), trace_id=trace_id)
    prominences = peak_prominences(y, strict)[0]
    threshold = min_prominence_fraction * top
    delta = result.delta
    peaks = tuple((float(delta[i]), float(y[i]), float(pr))
                  for i, pr in zip(strict, prominences) if pr >= threshold)
    return PeakReport(peaks=peaks, trace_id=trace_id)


def write_csv(result: SweepResult, path) -> None:
    """Write the sweep table: pinned header, 17 significant digits, LF endings."""
    lines = [CSV_HEADER]
    for row in result.data:
        lines.append(",".join(f"{v:.17g}" for v in row))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path) -> SweepResult:
    """Exact inverse of :func:`write_csv` up to float parsing.

    Raises :class:`CsvFormatError` naming the offending line for a wrong
    header, an empty row, a wrong field count, or an unparsable value.
    """
    with open(path, "r", newline="") as fh:
        text = fh.read()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise CsvFormatError("empty file")
    if lines[0] != CSV_HEADER:
        raise CsvFormatError(
            f"header mismatch: expected {CSV_HEADER!r}, found {lines[0]!r}")
    rows = []
    for n, line in enumerate(lines[1:], start=2):
        if line.strip() == "":
            raise CsvFormatError(f"line {n}: empty row")
        fields = line.split(",")
        if len(fields) != len(COLUMNS):
            raise CsvFormatError(
                f"line {n}: expected {len(COLUMNS)} fields, found {len(fields)}")
        try:
            rows.append(tuple(float(f) for f in fields))
        except ValueError as exc:
            raise CsvFormatError(f"line {n}: {exc}") from None
    if not rows:
        raise CsvFormatError("no data rows")
    try:
        return SweepResult(data=np.array(rows, dtype=float))
    except ValueError as exc:
        raise CsvFormatError(str(exc)) from None


def preset(name: str) -> list[SweepConfig]:
    """Bundled sweep configurations reproducing the reference curves.

    Every preset uses the grid [-6, 6] with 241 points (step 0.05 in units
    of ``gamma_u + gamma_v``).  ``fig_alpha`` expands to three sweeps, one
    per intermediate-decay ratio alpha = gamma_b / gamma_u in {2, 0.3, 0.02};
    all others expand to a single sweep.

    ========== =============================================================
    fig2       two-photon driving only, q = 1e-4 (weak)
    fig4       one-photon cascade, omega_ab = omega_bc = 0.01 (weak)
    fig5       one-photon cascade, omega = 1, gamma_b = 0.15 (strong)
    fig_delta  strong cascade with shifted intermediate level, delta = 0.3
    fig_alpha  strong cascade, gamma_b scanned over {1.0, 0.15, 0.01}
    fig_uv     strong cascade with unequal rates gamma_u=0.7, gamma_v=0.3
    ========== =============================================================
    """
    base = dict(omega12=6.0, delta_1ph=0.0, gamma_u=0.5, gamma_v=0.5,
                p_u=-1.0, p_v=1.0)
    if name == "fig2":
        params = [ModelParams(q=1e-4, gamma_b=1.0, **base)]
    elif name == "fig4":
        params = [ModelParams(omega_ab=0.01, omega_bc=0.01, gamma_b=1.0, **base)]
    elif name == "fig5":
        params = [ModelParams(omega_ab=1.0, omega_bc=1.0, gamma_b=0.15, **base)]
    elif name == "fig_delta":
        params = [ModelParams(omega_ab=1.0, omega_bc=1.0, gamma_b=0.15,
                              **{**base, "delta_1ph": 0.3})]
    elif name == "fig_alpha":
        params = [ModelParams(omega_ab=1.0, omega_bc=1.0,
                              gamma_b=alpha * base["gamma_u"], **base)
                  for alpha in (2.0, 0.3, 0.02)]
    elif name == "fig_uv":
        params = [ModelParams(omega_ab=1.0, omega_bc=1.0, gamma_b=0.15,
                              **{**base, "gamma_u": 0.7, "gamma_v": 0.3})]
    else:
        raise ValueError(f"unknown preset {name!r}; available: "
                         + ", ".join(PRESET_NAMES))
    return [SweepConfig(params=p, delta_min=-6.0, delta_max=6.0, points=241)
            for p in params]
