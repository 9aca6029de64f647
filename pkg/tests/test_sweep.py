import math

import numpy as np
import pytest

from cprsim import (
    BeamSplitter,
    DegenerateObjectiveError,
    DomainError,
    NoThresholdError,
    ProtocolKind,
    TmsvParams,
    asymmetric_arrangement,
    cascade,
    compare_protocols,
    enhancement_threshold,
    find_t_max,
    grid_sweep,
    log_negativity,
    log_negativity_tmsv,
    tmsv,
    trend,
)
from cprsim.sweep import CLAMP_LO, SEARCH_HI


class TestGridSweep:
    def test_identity_point(self):
        records = grid_sweep(ProtocolKind.PR, "asymmetric", 1, [0.1], [1.0])
        assert len(records) == 1
        m = records[0].measures
        assert round(m.log_negativity, 5) == 0.28951
        assert m.log_negativity == pytest.approx(math.log2(11.0 / 9.0), abs=1e-10)
        assert m.probability == pytest.approx(1.0, abs=1e-12)
        assert m.non_gaussianity < 1e-9

    def test_frozen_point(self):
        records = grid_sweep(ProtocolKind.PR, "asymmetric", 1, [0.1], [0.5])
        m = records[0].measures
        assert m.log_negativity == pytest.approx(0.2958134286934839, abs=1e-9)
        assert m.probability == pytest.approx(0.25001392054957905, rel=1e-11)

    def test_lambda_major_ordering(self):
        records = grid_sweep(ProtocolKind.PR, "asymmetric", 1, [0.1, 0.2], [0.3, 0.6])
        assert [(r.lam, r.t) for r in records] == [
            (0.1, 0.3),
            (0.1, 0.6),
            (0.2, 0.3),
            (0.2, 0.6),
        ]

    def test_enhancement_region_confined_to_weak_squeezing(self):
        lambdas = [round(0.05 * i, 2) for i in range(1, 20)]
        ts = [round(0.02 * i, 2) for i in range(1, 50)]
        records = grid_sweep(ProtocolKind.PR, "asymmetric", 4, lambdas, ts)
        enhancing = sorted(
            {
                r.lam
                for r in records
                if r.measures is not None
                and r.measures.log_negativity > log_negativity_tmsv(r.lam)
            }
        )
        assert enhancing, "some weakly squeezed inputs must be enhanced"
        assert 0.4 < max(enhancing) < 0.65

    def test_deterministic_and_parallel_identical(self):
        serial = grid_sweep(ProtocolKind.PR, "asymmetric", 2, [0.2, 0.4], [0.3, 0.7, 0.9])
        again = grid_sweep(ProtocolKind.PR, "asymmetric", 2, [0.2, 0.4], [0.3, 0.7, 0.9])
        threaded = grid_sweep(
            ProtocolKind.PR, "asymmetric", 2, [0.2, 0.4], [0.3, 0.7, 0.9], max_workers=4
        )
        assert serial == again == threaded

    def test_grid_clamp(self):
        with pytest.raises(DomainError):
            grid_sweep(ProtocolKind.PR, "asymmetric", 1, [0.1], [0.0])
        with pytest.raises(DomainError):
            grid_sweep(ProtocolKind.PR, "asymmetric", 1, [0.1], [CLAMP_LO / 2.0])


class TestFindTMax:
    def test_single_step_beats_baseline(self):
        point = find_t_max(ProtocolKind.PR, 1, 0.1)
        assert point.e_max > 0.28951
        assert 0.0 < point.p_at_max <= 1.0

    def test_e_max_nondecreasing_in_k(self):
        values = [find_t_max(ProtocolKind.PR, k, 0.1).e_max for k in range(1, 7)]
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_addition_maximized_at_upper_bound(self):
        tol = 1e-8
        point = find_t_max(ProtocolKind.PA, 4, 0.1, tol)
        assert abs(point.t_max - SEARCH_HI) <= tol

    def test_optimizer_soundness_on_audit_grid(self):
        for k in (1, 4):
            point = find_t_max(ProtocolKind.PR, k, 0.1)
            state = tmsv(TmsvParams(0.1))
            arrangement = asymmetric_arrangement(k, ProtocolKind.PR)
            for t in np.linspace(0.01, 0.999, 512):
                e = log_negativity(cascade(state, arrangement, BeamSplitter(t)).state)
                assert point.e_max >= e - 1e-6

    def test_degenerate_objective(self):
        with pytest.raises(DegenerateObjectiveError):
            find_t_max(ProtocolKind.PR, 1, 0.1, tol=5.0)

    def test_tol_validation(self):
        with pytest.raises(DomainError):
            find_t_max(ProtocolKind.PR, 1, 0.1, tol=1e-9)


class TestTrend:
    def test_head_reduces_to_find_t_max(self):
        points, _ = trend(ProtocolKind.PR, 1, 0.1)
        direct = find_t_max(ProtocolKind.PR, 1, 0.1)
        assert points[0] == direct

    def test_probability_decays_with_k(self):
        points, slope = trend(ProtocolKind.PR, 6, 0.1)
        ps = [p.p_at_max for p in points]
        assert all(b < a for a, b in zip(ps, ps[1:]))
        assert slope < -0.3

    def test_k_max_validation(self):
        with pytest.raises(DomainError):
            trend(ProtocolKind.PR, 21, 0.1)


class TestEnhancementThreshold:
    def test_zero_steps_never_enhances(self):
        with pytest.raises(NoThresholdError):
            enhancement_threshold(ProtocolKind.PR, 0)

    def test_single_step_threshold_band(self):
        lam_star = enhancement_threshold(ProtocolKind.PR, 1)
        assert 0.45 < lam_star < 0.75

    def test_tol_validation(self):
        with pytest.raises(DomainError):
            enhancement_threshold(ProtocolKind.PR, 1, tol=1e-7)


@pytest.fixture(scope="module")
def records():
    t_grid = [round(0.02 * i, 2) for i in range(1, 50)] + [1.0]
    return compare_protocols(4, 0.1, t_grid)


class TestCompareProtocols:
    def test_series_structure(self, records):
        kinds = [r.protocol for r in records]
        assert kinds == sorted(kinds, key=[ProtocolKind.PR, ProtocolKind.PA, ProtocolKind.PS].index)
        assert len({r.t for r in records}) == 50

    def test_addition_subtraction_agree_pointwise(self, records):
        pa = [r for r in records if r.protocol is ProtocolKind.PA and r.measures]
        ps = [r for r in records if r.protocol is ProtocolKind.PS and r.measures]
        assert len(pa) == len(ps)
        for a, s in zip(pa, ps):
            assert a.measures.log_negativity == pytest.approx(
                s.measures.log_negativity, abs=1e-9
            )

    def test_identity_column(self, records):
        # at t = 1 replacement is the identity while addition/subtraction
        # heralds can no longer fire
        at_one = {r.protocol: r for r in records if r.t == 1.0}
        pr = at_one[ProtocolKind.PR].measures
        assert pr.probability == pytest.approx(1.0, abs=1e-12)
        assert pr.log_negativity == pytest.approx(log_negativity_tmsv(0.1), abs=1e-10)
        assert at_one[ProtocolKind.PA].measures is None
        assert at_one[ProtocolKind.PS].measures is None

    def test_replacement_rate_wins_near_full_transmission(self, records):
        pr = {r.t: r for r in records if r.protocol is ProtocolKind.PR}
        pa = {r.t: r for r in records if r.protocol is ProtocolKind.PA}
        band = [
            t
            for t in pr
            if 0.9 < t < 1.0
            and pr[t].measures is not None
            and pa[t].measures is not None
            and pr[t].measures.rate > pa[t].measures.rate
        ]
        assert band

    def test_odd_k_rejected(self):
        with pytest.raises(DomainError):
            compare_protocols(3, 0.1, [0.5])
