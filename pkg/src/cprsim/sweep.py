"""Parameter sweeps and transmissivity optimization.

Grid points are independent work items; results are assembled in input
order, so serial and parallel runs emit identical record sequences.  The
transmissivity domain is clamped away from the exact endpoints, which are
covered by analytic special cases elsewhere.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    DegenerateObjectiveError,
    DomainError,
    ImpossibleOutcomeError,
    NoThresholdError,
)
from .fock import DEFAULT_POLICY, BeamSplitter, TmsvParams, TruncationPolicy, tmsv
from .measures import MeasureRecord, log_negativity, log_negativity_tmsv, measure_state
from .protocols import (
    Arrangement,
    ProtocolKind,
    asymmetric_arrangement,
    cascade,
    symmetric_arrangement,
)

__all__ = [
    "CLAMP_LO",
    "CLAMP_HI",
    "SEARCH_LO",
    "SEARCH_HI",
    "SweepRecord",
    "TrendPoint",
    "default_arrangement",
    "point_measures",
    "grid_sweep",
    "find_t_max",
    "trend",
    "enhancement_threshold",
    "compare_protocols",
]

#: Transmissivity clamp for sweep and optimization domains.
CLAMP_LO = 1e-6
CLAMP_HI = 1.0 - 1e-9

#: Bracketing-scan window used by the transmissivity optimizer.
SEARCH_LO = 0.01
SEARCH_HI = 0.999

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_SCAN_POINTS = 64


@dataclass(frozen=True)
class SweepRecord:
    """One grid point: protocol, parameters, and its measures.

    ``measures`` is ``None`` for impossible-outcome points, which are
    recorded with probability zero and the remaining measures absent.
    """

    protocol: ProtocolKind
    k: int
    lam: float
    t: float
    measures: Optional[MeasureRecord]


@dataclass(frozen=True)
class TrendPoint:
    """Entanglement-maximizing transmissivity and its measures for one k."""

    k: int
    t_max: float
    e_max: float
    p_at_max: float


def default_arrangement(
    kind: ProtocolKind, k: int, mode: str = "default", asymmetric_mode: int = 1
) -> Arrangement:
    """Canonical arrangement per protocol: replacement runs on one mode
    (arrangement-invariant anyway); addition and subtraction alternate."""
    if mode == "symmetric":
        return symmetric_arrangement(k, kind)
    if mode == "asymmetric":
        return asymmetric_arrangement(k, kind, asymmetric_mode)
    if kind is ProtocolKind.PR:
        return asymmetric_arrangement(k, kind, asymmetric_mode)
    return symmetric_arrangement(k, kind)


def point_measures(
    kind: ProtocolKind,
    k: int,
    lam: float,
    t: float,
    *,
    arrangement_mode: str = "default",
    asymmetric_mode: int = 1,
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> Optional[MeasureRecord]:
    """Measures at one parameter point, or ``None`` if the herald cannot fire."""
    arrangement = default_arrangement(kind, k, arrangement_mode, asymmetric_mode)
    state = tmsv(TmsvParams(lam), policy)
    try:
        result = cascade(state, arrangement, BeamSplitter(t))
    except ImpossibleOutcomeError:
        return None
    return measure_state(result.state, result.total_probability)


def _validate_grid(name: str, grid: Sequence[float]) -> list[float]:
    # The exact endpoint 1.0 is admitted: it is the analytic identity point
    # for replacement and the no-click/always-click boundary for the others.
    values = [float(v) for v in grid]
    if not values:
        raise DomainError(f"{name} grid must be nonempty")
    for v in values:
        if not (CLAMP_LO <= v <= CLAMP_HI or v == 1.0):
            raise DomainError(
                f"{name} grid value {v} outside clamp domain [{CLAMP_LO}, {CLAMP_HI}]"
            )
    return values


def grid_sweep(
    kind: ProtocolKind,
    arrangement_mode: str,
    k: int,
    lambda_grid: Sequence[float],
    t_grid: Sequence[float],
    *,
    policy: TruncationPolicy = DEFAULT_POLICY,
    max_workers: int = 1,
    asymmetric_mode: int = 1,
) -> list[SweepRecord]:
    """One record per (lambda, t) grid point, lambda-major ordering."""
    lams = _validate_grid("lambda", lambda_grid)
    ts = _validate_grid("t", t_grid)
    for lam in lams:
        if not 0.0 < lam < 1.0:
            raise DomainError("lambda grid values must lie in (0, 1)")
    points = [(lam, t) for lam in lams for t in ts]

    def evaluate(point: tuple[float, float]) -> SweepRecord:
        lam, t = point
        measures = point_measures(
            kind,
            k,
            lam,
            t,
            arrangement_mode=arrangement_mode,
            asymmetric_mode=asymmetric_mode,
            policy=policy,
        )
        return SweepRecord(kind, k, lam, t, measures)

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(evaluate, points))
    return [evaluate(point) for point in points]


def _negativity_objective(
    kind: ProtocolKind, k: int, lam: float, policy: TruncationPolicy
) -> Callable[[float], float]:
    state = tmsv(TmsvParams(lam), policy)
    arrangement = default_arrangement(kind, k)

    def objective(t: float) -> float:
        return log_negativity(cascade(state, arrangement, BeamSplitter(t)).state)

    return objective


def find_t_max(
    kind: ProtocolKind,
    k: int,
    lam: float,
    tol: float = 1e-8,
    *,
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> TrendPoint:
    """Locate the entanglement-maximizing transmissivity for one protocol.

    A 64-point scan brackets the global maximum first because the
    replacement objective can be multimodal (coefficients change sign and
    carve dips into E_N(t)); golden-section search then refines the best
    bracket down to width ``tol``.
    """
    if tol < 1e-8:
        raise DomainError("tol must be at least 1e-8")
    objective = _negativity_objective(kind, k, lam, policy)
    ts = np.linspace(SEARCH_LO, SEARCH_HI, _SCAN_POINTS)
    values = [objective(t) for t in ts]
    if max(values) - min(values) < tol:
        raise DegenerateObjectiveError(
            f"objective varies by less than {tol} across the scan window"
        )
    best = int(np.argmax(values))
    a = float(ts[max(best - 1, 0)])
    b = float(ts[min(best + 1, _SCAN_POINTS - 1)])
    x1 = b - _INV_GOLDEN * (b - a)
    x2 = a + _INV_GOLDEN * (b - a)
    f1, f2 = objective(x1), objective(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_GOLDEN * (b - a)
            f2 = objective(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_GOLDEN * (b - a)
            f1 = objective(x1)
    t_max = 0.5 * (a + b)
    state = tmsv(TmsvParams(lam), policy)
    result = cascade(state, default_arrangement(kind, k), BeamSplitter(t_max))
    return TrendPoint(k, t_max, log_negativity(result.state), result.total_probability)


def trend(
    kind: ProtocolKind,
    k_max: int,
    lam: float,
    tol: float = 1e-8,
    *,
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> tuple[list[TrendPoint], float]:
    """Trend points for k = 1..k_max plus the fitted slope of log10 P.

    The slope is least-squares over k >= 3 to skip the small-k transient
    (over all k when fewer than two points remain).
    """
    if not 1 <= k_max <= 20:
        raise DomainError("k_max must lie in 1..20")
    step = 1 if kind is ProtocolKind.PR else 2
    ks = [k for k in range(1, k_max + 1) if k % step == 0]
    points = [find_t_max(kind, k, lam, tol, policy=policy) for k in ks]
    fit_points = [pt for pt in points if pt.k >= 3]
    if len(fit_points) < 2:
        fit_points = points
    slope = float("nan")
    if len(fit_points) >= 2:
        xs = np.asarray([pt.k for pt in fit_points], dtype=float)
        ys = np.asarray([math.log10(pt.p_at_max) for pt in fit_points])
        slope = float(np.polyfit(xs, ys, 1)[0])
    return points, slope


def enhancement_threshold(kind: ProtocolKind, k: int, tol: float = 1e-6) -> float:
    """Largest initial squeezing still enhanced by the protocol.

    Bisects ``max_t E_N(lam, t) - E_N_tmsv(lam)`` on lambda in
    [0.05, 0.95]; raises :class:`NoThresholdError` without a sign change.
    """
    if k < 1:
        raise NoThresholdError("a zero-step protocol is the identity and never enhances")
    if tol < 1e-6:
        raise DomainError("tol must be at least 1e-6")

    def gap(lam: float) -> float:
        return find_t_max(kind, k, lam).e_max - log_negativity_tmsv(lam)

    lo, hi = 0.05, 0.95
    gap_lo, gap_hi = gap(lo), gap(hi)
    if gap_lo <= 0.0 or gap_hi >= 0.0:
        raise NoThresholdError(
            f"no enhancement sign change on [{lo}, {hi}] "
            f"(gap({lo}) = {gap_lo}, gap({hi}) = {gap_hi})"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if gap(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def compare_protocols(
    k: int,
    lam: float,
    t_grid: Sequence[float],
    *,
    policy: TruncationPolicy = DEFAULT_POLICY,
    max_workers: int = 1,
) -> list[SweepRecord]:
    """Replacement/addition/subtraction series over one transmissivity grid.

    Replacement runs asymmetrically (the arrangement does not matter for
    it); addition and subtraction run symmetrically, which requires an even
    step count.
    """
    if k < 2 or k % 2:
        raise DomainError("protocol comparison requires an even step count >= 2")
    records: list[SweepRecord] = []
    for kind, mode in (
        (ProtocolKind.PR, "asymmetric"),
        (ProtocolKind.PA, "symmetric"),
        (ProtocolKind.PS, "symmetric"),
    ):
        records.extend(
            grid_sweep(kind, mode, k, [lam], t_grid, policy=policy, max_workers=max_workers)
        )
    return records
