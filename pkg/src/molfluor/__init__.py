"""Steady-state Lindblad engine and a five-level molecular fluorescence model.

The package answers one physical question numerically and analytically: how
does the steady-state fluorescence of a laser-driven five-level molecule
depend on the mutual polarization of its transition dipole moments?  Pure
two-photon driving yields two intensity peaks regardless of polarization;
adding a two-step one-photon excitation path produces a third, central peak
on transitions with antiparallel dipoles only.

Layers
------
``qcore``     operators, vectorization, density-matrix invariants
``lindblad``  Liouvillian build, stationary solve, RK4 oracle, equation audit
``model``     the molecule: drives, decay channels, intensity observable
``analytic``  weak-field closed forms and the staged cascade solver
``sweep``     detuning sweeps, peak detection, CSV, presets
``cli``       command-line front end (``molfluor ...``)
"""

from .qcore import (
    DIM,
    Level,
    LEVEL_LABELS,
    DensityMatrix,
    dagger,
    hermitian_check,
    identity,
    ket_bra,
    positivity_check,
    trace,
    unvectorize,
    vectorize,
)
from .lindblad import (
    IntegrationError,
    Liouvillian,
    NonUniqueSteadyStateError,
    SteadyState,
    SteadyStateError,
    build_liouvillian,
    dissipator_apply,
    eom_rows,
    steady_state,
    time_evolve,
)
from .model import (
    IntensityTriple,
    ModelParams,
    build_collapse_ops,
    build_hamiltonian,
    build_model_liouvillian,
    default_timestep,
    intensity,
    solve_point,
)
from .analytic import (
    CoherenceAudit,
    CoherenceAuditRow,
    RegimeError,
    WeakFieldSolution,
    cascade_elements,
    cascade_solver,
    cascade_weak,
    coherence_addends,
    coherence_audit,
    coherence_large_splitting,
    lorentzian_intensity,
    two_photon_weak,
    upper_level_coherence,
)
from .sweep import (
    COLUMNS,
    CSV_HEADER,
    CompareReport,
    CsvFormatError,
    MODES,
    PRESET_NAMES,
    PeakReport,
    SweepConfig,
    SweepError,
    SweepResult,
    TRACE_IDS,
    compare_sweep,
    detect_peaks,
    evaluate_point,
    preset,
    read_csv,
    run_sweep,
    write_csv,
)

__version__ = "0.1.0"
