import math

import numpy as np
import pytest

from cprsim import (
    DomainError,
    log_negativity_closed,
    moment_double_sum_variant,
    power_moment,
    probability_monotone_check,
    success_probability_closed,
)
from cprsim.closedform import MAX_MOMENT_ORDER, _eulerian_row
from conftest import direct_cascade_sums, direct_power_moment

GRID_LAMBDA = (0.1, 0.3, 0.5, 0.7)
GRID_T = (0.2, 0.4, 0.6, 0.8)


class TestEulerianNumbers:
    def test_small_rows(self):
        assert _eulerian_row(1) == (1,)
        assert _eulerian_row(2) == (1, 1)
        assert _eulerian_row(3) == (1, 4, 1)
        assert _eulerian_row(4) == (1, 11, 11, 1)

    @pytest.mark.parametrize("m", [2, 5, 10, 20, 40])
    def test_row_sums_to_factorial(self, m):
        assert sum(_eulerian_row(m)) == math.factorial(m)


class TestPowerMoment:
    def test_base_case(self):
        assert power_moment(0, 0.3) == pytest.approx(1.0 / 0.7, rel=1e-15)

    def test_first_moment_frozen(self):
        assert power_moment(1, 0.16) == pytest.approx(0.2267573696145125, rel=1e-15)
        assert power_moment(1, 0.16) == pytest.approx(direct_power_moment(1, 0.16), rel=1e-13)

    def test_second_moment_exact(self):
        assert power_moment(2, 0.5) == pytest.approx(6.0, rel=1e-14)

    @pytest.mark.parametrize("m", range(13))
    @pytest.mark.parametrize("z", [0.05, 0.3, 0.6, 0.9])
    def test_against_direct_summation(self, m, z):
        assert power_moment(m, z) == pytest.approx(direct_power_moment(m, z), rel=1e-12)

    def test_high_order_finite(self):
        assert math.isfinite(power_moment(MAX_MOMENT_ORDER, 0.9))

    def test_domain(self):
        for bad_z in (0.0, 1.0, -0.5, 1.5):
            with pytest.raises(DomainError):
                power_moment(1, bad_z)
        with pytest.raises(DomainError):
            power_moment(MAX_MOMENT_ORDER + 1, 0.5)
        with pytest.raises(DomainError):
            power_moment(-1, 0.5)


class TestMomentRecursion:
    @pytest.mark.parametrize("lam", (0.1, 0.4, 0.7))
    @pytest.mark.parametrize("t", (0.3, 0.6, 0.9))
    @pytest.mark.parametrize("k", (1, 2, 4))
    def test_derivative_recursion(self, lam, t, k):
        # a_{m+1} = (t / 2k) * d a_m / d t with a_m evaluated at lam^2 t^(2k)
        h = 1e-6
        for m in range(10):
            hi = power_moment(m, lam * lam * (t + h) ** (2 * k))
            lo = power_moment(m, lam * lam * (t - h) ** (2 * k))
            derived = (t / (2 * k)) * (hi - lo) / (2 * h)
            assert derived == pytest.approx(
                power_moment(m + 1, lam * lam * t ** (2 * k)), rel=1e-5
            )


class TestDoubleSumVariant:
    @pytest.mark.parametrize("z", [0.16, 0.5, 0.8])
    def test_diverges_from_recursion_at_m1(self, z):
        # The flat double sum collapses to z(2-z)/(1-z)^2 at m=1, while the
        # recursion-consistent moment is z/(1-z)^2; the gap is the regression
        # being pinned here.
        variant = moment_double_sum_variant(1, z)
        assert variant == pytest.approx(z * (2.0 - z) / (1.0 - z) ** 2, rel=1e-12)
        recursion = power_moment(1, z)
        assert abs(variant - recursion) > 0.1 * recursion

    def test_matches_literal_double_loop(self):
        z = 0.37
        m = 3
        a0 = 1.0 / (1.0 - z)
        literal = a0 ** (m + 1) * sum(
            i * z**i * (1.0 - z) ** j for i in range(m + 1) for j in range(m + 1)
        )
        assert moment_double_sum_variant(m, z) == pytest.approx(literal, rel=1e-14)


class TestSuccessProbability:
    @pytest.mark.parametrize("k", [1, 2, 5])
    @pytest.mark.parametrize("lam", [0.1, 0.6])
    def test_identity_at_full_transmission(self, k, lam):
        assert success_probability_closed(k, lam, 1.0) == pytest.approx(1.0, rel=1e-13)

    def test_frozen_single_step(self):
        assert success_probability_closed(1, 0.1, 0.5) == pytest.approx(
            0.25001392054957905, rel=1e-12
        )

    @pytest.mark.parametrize("lam", GRID_LAMBDA)
    @pytest.mark.parametrize("t", GRID_T)
    @pytest.mark.parametrize("k", range(1, 7))
    def test_matches_direct_series(self, lam, t, k):
        direct, _, _ = direct_cascade_sums(k, lam, t)
        assert success_probability_closed(k, lam, t) == pytest.approx(direct, rel=1e-9)

    def test_domain(self):
        with pytest.raises(DomainError):
            success_probability_closed(0, 0.5, 0.5)
        with pytest.raises(DomainError):
            success_probability_closed(1, 0.5, 0.0)
        with pytest.raises(DomainError):
            success_probability_closed(21, 0.5, 0.5)


class TestLogNegativityClosed:
    @pytest.mark.parametrize("lam", GRID_LAMBDA)
    @pytest.mark.parametrize("t", GRID_T)
    @pytest.mark.parametrize("k", (2, 4, 6))
    def test_matches_direct_series_even_k(self, lam, t, k):
        ssq, sabs, _ = direct_cascade_sums(k, lam, t)
        oracle = 2.0 * math.log2(sabs / math.sqrt(ssq))
        assert log_negativity_closed(k, lam, t) == pytest.approx(oracle, abs=1e-9)

    @pytest.mark.parametrize("k", (2, 4))
    @pytest.mark.parametrize("lam", (0.1, 0.5))
    def test_full_transmission_reduces_to_tmsv(self, k, lam):
        expected = math.log2((1.0 + lam) / (1.0 - lam))
        assert log_negativity_closed(k, lam, 1.0) == pytest.approx(expected, rel=1e-12)

    def test_odd_k_warns_and_residual_is_sign_weight(self):
        k, lam, t = 1, 0.1, 0.9
        with pytest.warns(RuntimeWarning):
            closed = log_negativity_closed(k, lam, t)
        ssq, sabs, signed = direct_cascade_sums(k, lam, t)
        oracle = 2.0 * math.log2(sabs / math.sqrt(ssq))
        residual = oracle - closed
        assert residual > 0.0
        # the signed sum loses exactly twice the weight of the coefficients
        # beyond the sign flip at n > t^2 / (1 - t^2)
        assert residual == pytest.approx(2.0 * math.log2(sabs / signed), abs=1e-10)
        flip = t * t / (1.0 - t * t)
        pref = math.sqrt(1.0 - lam * lam)
        negative_weight = -math.fsum(
            pref * lam**n * (t ** (n + 1) - n * (1 - t * t) * t ** (n - 1))
            for n in range(1, 200)
            if n > flip
        )
        assert signed == pytest.approx(sabs - 2.0 * negative_weight, rel=1e-12)

    def test_even_k_does_not_warn(self):
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("error")
            log_negativity_closed(2, 0.1, 0.9)


class TestProbabilityMonotone:
    def test_representative_points(self):
        ok, margins = probability_monotone_check(8, 0.1, 0.5)
        assert ok and len(margins) == 7
        ok, _ = probability_monotone_check(6, 0.6, 0.7)
        assert ok

    def test_full_transmission_margins_vanish(self):
        ok, margins = probability_monotone_check(5, 0.3, 1.0)
        assert ok
        assert all(abs(m) < 1e-12 for m in margins)

    def test_domain(self):
        with pytest.raises(DomainError):
            probability_monotone_check(1, 0.5, 0.5)
