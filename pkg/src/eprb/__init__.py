"""Toolkit for two-setting, two-outcome bipartite joint-probability tables.

Construct, validate and analyze behaviors of experiments in which two
distant parties each choose between two dichotomic measurements: check
normalization and the absence of signaling, solve the dependent half of
the probability table from the free half, build the canonical reference
boxes, test membership in the local polytope, run the witness-based
nonlocality analysis, and search for the quantum extremal values with a
derivative-free optimizer.  The ``eprb`` command line exposes the same
operations on JSON and CSV files.
"""

from .behavior import (
    Behavior,
    BehaviorFormatError,
    CheckResult,
    ConstraintReport,
    CorrelationVector,
    chsh_delta,
    correlation,
    validate,
)
from .boxes import (
    DeterministicAssignment,
    LocalityResult,
    deterministic_box,
    is_local,
    pr_box,
    quantum_extremal_box,
    uniform_box,
)
from .hardy import (
    GOLDEN_MEAN,
    HardyReport,
    HardySet,
    QUANTUM_WITNESS_MAX,
    analyze,
    analyze_all,
    ch_inequality,
    hardy_sets,
    set_for_witness,
)
from .linsys import (
    ConstraintMatrix,
    DependentSet,
    FreeSet,
    behavior_from_free_set,
    build_matrix,
    check_feasible,
    combine,
    rank,
    solve_dependent,
    solve_dependent_generic,
)
from .optimizer import (
    OptimizationConfig,
    OptimizationResult,
    ScanRow,
    ghz_impossibility,
    hardy_theta_scan,
    maximize_chsh,
    maximize_hardy,
    maximize_hardy_maxent,
)
from .quantum import (
    QuantumModel,
    behavior_from_model,
    bloch_projector,
    joint_probability,
    marginal_from_model,
    planar_parameters,
    random_model,
)

__version__ = "0.1.0"

__all__ = [
    "Behavior",
    "BehaviorFormatError",
    "CheckResult",
    "ConstraintReport",
    "ConstraintMatrix",
    "CorrelationVector",
    "DependentSet",
    "DeterministicAssignment",
    "FreeSet",
    "GOLDEN_MEAN",
    "HardyReport",
    "HardySet",
    "LocalityResult",
    "OptimizationConfig",
    "OptimizationResult",
    "QUANTUM_WITNESS_MAX",
    "QuantumModel",
    "ScanRow",
    "analyze",
    "analyze_all",
    "behavior_from_free_set",
    "behavior_from_model",
    "bloch_projector",
    "build_matrix",
    "ch_inequality",
    "check_feasible",
    "chsh_delta",
    "combine",
    "correlation",
    "deterministic_box",
    "ghz_impossibility",
    "hardy_sets",
    "hardy_theta_scan",
    "is_local",
    "joint_probability",
    "marginal_from_model",
    "maximize_chsh",
    "maximize_hardy",
    "maximize_hardy_maxent",
    "planar_parameters",
    "pr_box",
    "quantum_extremal_box",
    "random_model",
    "rank",
    "set_for_witness",
    "solve_dependent",
    "solve_dependent_generic",
    "uniform_box",
    "validate",
]
