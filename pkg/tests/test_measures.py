import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cprsim import (
    BeamSplitter,
    CovarianceMatrix,
    DomainError,
    PhysicalityError,
    ProtocolKind,
    SchmidtDiagonalState,
    TmsvParams,
    asymmetric_arrangement,
    cascade,
    covariance,
    entanglement_rate,
    entropy_term,
    log_negativity,
    log_negativity_tmsv,
    measure_state,
    non_gaussianity,
    symmetric_arrangement,
    symplectic_eigenvalues,
    tmsv,
)


def single_term_state(offset_a=0, offset_b=0):
    return SchmidtDiagonalState(offset_a, offset_b, np.asarray([1.0]))


class TestLogNegativity:
    def test_product_state_is_zero(self):
        assert log_negativity(single_term_state(1, 1)) == 0.0

    def test_tmsv_half(self):
        assert log_negativity(tmsv(TmsvParams(0.5))) == pytest.approx(math.log2(3), abs=1e-10)

    def test_frozen_single_replacement(self):
        state = tmsv(TmsvParams(0.1))
        result = cascade(state, asymmetric_arrangement(1, ProtocolKind.PR), BeamSplitter(0.5))
        assert log_negativity(result.state) == pytest.approx(0.2958134286934839, abs=1e-9)

    @pytest.mark.parametrize("lam10", range(1, 10))
    def test_consistency_with_closed_form(self, lam10):
        lam = lam10 / 10.0
        assert abs(log_negativity(tmsv(TmsvParams(lam))) - log_negativity_tmsv(lam)) < 1e-10


class TestLogNegativityTmsv:
    def test_values(self):
        assert log_negativity_tmsv(1e-9) == pytest.approx(0.0, abs=1e-8)
        assert log_negativity_tmsv(0.5) == pytest.approx(math.log2(3), rel=1e-15)
        assert log_negativity_tmsv(0.1) == pytest.approx(math.log2(11.0 / 9.0), rel=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            log_negativity_tmsv(1.0)


class TestCovariance:
    @pytest.mark.parametrize("lam", [0.1, 0.5, 0.9])
    def test_tmsv_closed_form(self, lam):
        V = covariance(tmsv(TmsvParams(lam)))
        denom = 1.0 - lam * lam
        assert V.alpha1 == pytest.approx((1.0 + lam * lam) / denom, rel=1e-11)
        assert V.alpha2 == pytest.approx(V.alpha1, rel=1e-15)
        assert V.gamma == pytest.approx(2.0 * lam / denom, rel=1e-11)

    def test_vacuum(self):
        V = covariance(single_term_state())
        assert (V.alpha1, V.alpha2, V.gamma) == (1.0, 1.0, 0.0)

    def test_one_photon_pair(self):
        V = covariance(single_term_state(1, 1))
        assert (V.alpha1, V.alpha2, V.gamma) == (3.0, 3.0, 0.0)

    def test_zero_offset_reduction_to_literal_sums(self):
        state = cascade(
            tmsv(TmsvParams(0.4)), asymmetric_arrangement(2, ProtocolKind.PR), BeamSplitter(0.6)
        ).state
        c = state.coeffs
        alpha = 1.0 + 2.0 * math.fsum(n * c[n] ** 2 for n in range(len(c)))
        gamma = 2.0 * math.fsum((n + 1) * c[n] * c[n + 1] for n in range(len(c) - 1))
        V = covariance(state)
        assert V.alpha1 == pytest.approx(alpha, abs=1e-12)
        assert V.gamma == pytest.approx(gamma, abs=1e-12)

    def test_offset_shift_law(self):
        base = cascade(
            tmsv(TmsvParams(0.4)), asymmetric_arrangement(2, ProtocolKind.PR), BeamSplitter(0.6)
        ).state
        shifted = SchmidtDiagonalState(base.offset_a + 1, base.offset_b + 1, base.coeffs)
        V0, V1 = covariance(base), covariance(shifted)
        assert V1.alpha1 == pytest.approx(V0.alpha1 + 2.0, abs=1e-12)
        assert V1.alpha2 == pytest.approx(V0.alpha2 + 2.0, abs=1e-12)
        c = base.coeffs
        gamma_expected = 2.0 * math.fsum(
            math.sqrt((n + 2) * (n + 2)) * c[n] * c[n + 1] for n in range(len(c) - 1)
        )
        assert V1.gamma == pytest.approx(gamma_expected, abs=1e-12)

    def test_as_matrix_block_form(self):
        V = covariance(tmsv(TmsvParams(0.3)))
        M = V.as_matrix()
        assert M.shape == (4, 4)
        assert M[0, 0] == M[1, 1] == V.alpha1
        assert M[0, 2] == V.gamma and M[1, 3] == -V.gamma


class TestSymplecticEigenvalues:
    def test_tmsv_is_pure_gaussian(self):
        nu_p, nu_m = symplectic_eigenvalues(covariance(tmsv(TmsvParams(0.5))))
        assert nu_p == pytest.approx(1.0, abs=1e-11)
        assert nu_m == pytest.approx(1.0, abs=1e-11)

    def test_vacuum_and_photon_pair(self):
        assert symplectic_eigenvalues(covariance(single_term_state())) == (1.0, 1.0)
        assert symplectic_eigenvalues(covariance(single_term_state(1, 1))) == (3.0, 3.0)

    def test_unequal_offsets_against_dense_eigenvalues(self):
        # two additions on mode 1 only: alpha1 != alpha2
        state = cascade(
            tmsv(TmsvParams(0.4)),
            ((1, ProtocolKind.PA), (1, ProtocolKind.PA)),
            BeamSplitter(0.7),
        ).state
        V = covariance(state)
        assert V.alpha1 != V.alpha2
        nu_p, nu_m = symplectic_eigenvalues(V)
        omega = np.block(
            [
                [np.array([[0.0, 1.0], [-1.0, 0.0]]), np.zeros((2, 2))],
                [np.zeros((2, 2)), np.array([[0.0, 1.0], [-1.0, 0.0]])],
            ]
        )
        spectrum = np.sort(np.abs(np.linalg.eigvals(1j * omega @ V.as_matrix())))
        assert nu_m == pytest.approx(spectrum[0], rel=1e-10)
        assert nu_p == pytest.approx(spectrum[-1], rel=1e-10)

    def test_unphysical_matrix_rejected(self):
        with pytest.raises(PhysicalityError):
            symplectic_eigenvalues(CovarianceMatrix(1.0, 1.0, 2.0))


class TestEntropyTerm:
    def test_zero_at_unit(self):
        assert entropy_term(1.0) == 0.0
        assert entropy_term(1.0 + 1e-13) == 0.0

    def test_strictly_increasing(self):
        zs = [1.0 + 1e-9, 1.0 + 1e-6, 1.001, 1.1, 1.5, 2.0, 3.0, 10.0, 100.0]
        values = [entropy_term(z) for z in zs]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_below_vacuum_rejected(self):
        with pytest.raises(PhysicalityError):
            entropy_term(0.9)

    def test_known_value(self):
        # nu = 3: 2*log2(2) - 1*log2(1) = 2
        assert entropy_term(3.0) == pytest.approx(2.0, rel=1e-15)


class TestNonGaussianity:
    @pytest.mark.parametrize("lam10", range(1, 10))
    def test_tmsv_is_gaussian(self, lam10):
        assert non_gaussianity(tmsv(TmsvParams(lam10 / 10.0))) < 1e-9

    def test_vacuum(self):
        assert non_gaussianity(single_term_state()) == 0.0

    def test_photon_pair_plateau(self):
        # |1,1>: nu = 3 for both modes, hence 2 + 2 bits
        assert non_gaussianity(single_term_state(1, 1)) == pytest.approx(4.0, rel=1e-12)

    def test_replacement_output_degaussifies(self):
        state = tmsv(TmsvParams(0.1))
        low = cascade(state, asymmetric_arrangement(4, ProtocolKind.PR), BeamSplitter(0.3)).state
        high = cascade(state, asymmetric_arrangement(4, ProtocolKind.PR), BeamSplitter(0.95)).state
        assert non_gaussianity(low) > 3.5  # nearly |1,1>
        assert non_gaussianity(high) < 0.01  # nearly the input


class TestEntanglementRate:
    def test_edges(self):
        assert entanglement_rate(0.0, 0.7) == 0.0
        assert entanglement_rate(1.3, 1.0) == 1.3

    def test_frozen_product(self):
        assert entanglement_rate(0.2958134286934839, 0.25001392054957905) == pytest.approx(
            0.07395747505887126, rel=1e-13
        )

    def test_domain(self):
        with pytest.raises(DomainError):
            entanglement_rate(-0.5, 0.5)
        with pytest.raises(DomainError):
            entanglement_rate(0.5, 1.5)


class TestSignInvariance:
    @given(lam=st.floats(min_value=0.05, max_value=0.9))
    @settings(max_examples=25, deadline=None)
    def test_global_sign_flip_changes_nothing(self, lam):
        state = tmsv(TmsvParams(lam))
        flipped = SchmidtDiagonalState(0, 0, -state.coeffs)
        assert log_negativity(flipped) == log_negativity(state)
        assert covariance(flipped) == covariance(state)
        assert non_gaussianity(flipped) == non_gaussianity(state)


def test_measure_record_rate_identity():
    state = tmsv(TmsvParams(0.2))
    record = measure_state(state, 0.5)
    assert record.rate == pytest.approx(record.log_negativity * record.probability, rel=1e-12)
    assert record.probability == 0.5
