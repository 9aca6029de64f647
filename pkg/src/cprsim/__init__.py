"""Truncated Fock-space simulator for cascaded photon-replacement distillation."""

from .errors import (
    CprsimError,
    DegenerateObjectiveError,
    DomainError,
    ImpossibleOutcomeError,
    NoThresholdError,
    PhysicalityError,
)
from .fock import (
    DEFAULT_POLICY,
    BeamSplitter,
    DiagonalShiftOperator,
    SchmidtDiagonalState,
    TmsvParams,
    TruncationPolicy,
    apply_operator,
    bs_coefficient,
    build_heralded_operator,
    pr_coefficient,
    tmsv,
)
from .protocols import (
    Arrangement,
    CascadeResult,
    ProtocolKind,
    Step,
    asymmetric_arrangement,
    cascade,
    cpr_coefficients,
    symmetric_arrangement,
)
from .measures import (
    CovarianceMatrix,
    MeasureRecord,
    covariance,
    entanglement_rate,
    entropy_term,
    log_negativity,
    log_negativity_tmsv,
    measure_state,
    non_gaussianity,
    symplectic_eigenvalues,
)
from .closedform import (
    log_negativity_closed,
    moment_double_sum_variant,
    power_moment,
    probability_monotone_check,
    success_probability_closed,
)
from .sweep import (
    SweepRecord,
    TrendPoint,
    compare_protocols,
    enhancement_threshold,
    find_t_max,
    grid_sweep,
    point_measures,
    trend,
)

__version__ = "0.1.0"
