"""Entanglement and non-Gaussianity measures for Schmidt-diagonal states.

Quadratures are ``x = a + a^dag`` and ``p = i (a^dag - a)`` (vacuum variance
1, vacuum symplectic eigenvalue 1); all logarithms are base 2, so
entanglement and entropy come out in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, PhysicalityError
from .fock import SchmidtDiagonalState

__all__ = [
    "CovarianceMatrix",
    "MeasureRecord",
    "log_negativity",
    "log_negativity_tmsv",
    "covariance",
    "symplectic_eigenvalues",
    "entropy_term",
    "non_gaussianity",
    "entanglement_rate",
    "measure_state",
]

#: Symplectic eigenvalues may undershoot 1 by this much before erroring.
PHYSICALITY_SLACK = 1e-9

#: |z - 1| below this maps the entropy term to its limit 0.
ENTROPY_UNIT_BAND = 1e-12

#: Slack accepted on probability and negativity bounds.
NUMERIC_SLACK = 1e-12


@dataclass(frozen=True)
class CovarianceMatrix:
    """Two-mode covariance matrix ``[[a1*I, g*s], [g*s, a2*I]]``.

    ``I = diag(1, 1)`` and ``s = diag(1, -1)``; ``alpha1``/``alpha2`` are the
    per-mode diagonals and ``gamma`` the cross term.
    """

    alpha1: float
    alpha2: float
    gamma: float

    def as_matrix(self) -> np.ndarray:
        """Dense 4x4 matrix in (x1, p1, x2, p2) ordering."""
        eye = np.diag([1.0, 1.0])
        sig = np.diag([1.0, -1.0])
        return np.block(
            [[self.alpha1 * eye, self.gamma * sig], [self.gamma * sig, self.alpha2 * eye]]
        )


@dataclass(frozen=True)
class MeasureRecord:
    """Measures for one parameter point: E_N, P, G, and the rate E_N * P."""

    log_negativity: float
    probability: float
    non_gaussianity: float
    rate: float


def log_negativity(state: SchmidtDiagonalState) -> float:
    """Logarithmic negativity ``2 log2(sum_n |c_n|)`` of a normalized state.

    Offsets are irrelevant: the Schmidt coefficients alone determine the
    entanglement.
    """
    return 2.0 * math.log2(float(np.sum(np.abs(state.coeffs))))


def log_negativity_tmsv(lam: float) -> float:
    """Closed geometric-sum value ``log2((1 + lam) / (1 - lam))``."""
    if not 0.0 < lam < 1.0:
        raise DomainError("lambda must lie in (0, 1)")
    return math.log2((1.0 + lam) / (1.0 - lam))


def covariance(state: SchmidtDiagonalState) -> CovarianceMatrix:
    """Second statistical moments of a Schmidt-diagonal state.

    With offsets ``(a, b)``:
    ``alpha1 = 1 + 2 sum (n + a) c_n^2``,
    ``alpha2 = 1 + 2 sum (n + b) c_n^2``,
    ``gamma = 2 sum sqrt((n + a + 1)(n + b + 1)) c_n c_{n+1}``.
    """
    c = state.coeffs
    n = np.arange(c.size, dtype=float)
    sq = c * c
    alpha1 = 1.0 + 2.0 * float(np.dot(n + state.offset_a, sq))
    alpha2 = 1.0 + 2.0 * float(np.dot(n + state.offset_b, sq))
    if c.size > 1:
        heads = n[:-1]
        radicals = np.sqrt((heads + state.offset_a + 1.0) * (heads + state.offset_b + 1.0))
        gamma = 2.0 * float(np.dot(radicals * c[:-1], c[1:]))
    else:
        gamma = 0.0
    return CovarianceMatrix(alpha1, alpha2, gamma)


def symplectic_eigenvalues(V: CovarianceMatrix) -> tuple[float, float]:
    """Symplectic eigenvalues ``(nu_plus, nu_minus)`` of a two-mode matrix.

    For ``alpha1 == alpha2`` both equal ``sqrt(alpha^2 - gamma^2)``; the
    general case uses ``nu^2 = (Delta +- sqrt(Delta^2 - 4 det V)) / 2`` with
    ``Delta = alpha1^2 + alpha2^2 - 2 gamma^2`` and
    ``det V = (alpha1 alpha2 - gamma^2)^2``.
    """
    a1, a2, g = V.alpha1, V.alpha2, V.gamma
    if a1 == a2:
        val = a1 * a1 - g * g
        if val < 0.0:
            raise PhysicalityError(f"negative symplectic invariant {val}")
        nu = math.sqrt(val)
        nus = (nu, nu)
    else:
        delta = a1 * a1 + a2 * a2 - 2.0 * g * g
        det = (a1 * a2 - g * g) ** 2
        disc = delta * delta - 4.0 * det
        if disc < -PHYSICALITY_SLACK:
            raise PhysicalityError(f"symplectic discriminant {disc} below tolerance")
        disc = max(disc, 0.0)
        root = math.sqrt(disc)
        nus = (math.sqrt((delta + root) / 2.0), math.sqrt((delta - root) / 2.0))
    if nus[1] < 1.0 - PHYSICALITY_SLACK:
        raise PhysicalityError(f"symplectic eigenvalue {nus[1]} below vacuum limit")
    return nus


def entropy_term(z: float) -> float:
    """Bosonic entropy of one symplectic eigenvalue, in bits.

    ``((z+1)/2) log2((z+1)/2) - ((z-1)/2) log2((z-1)/2)``, extended
    continuously by ``entropy_term(1) = 0``; strictly increasing for
    ``z >= 1``.
    """
    if z < 1.0 - PHYSICALITY_SLACK:
        raise PhysicalityError(f"symplectic eigenvalue {z} below vacuum limit")
    if z <= 1.0 or abs(z - 1.0) < ENTROPY_UNIT_BAND:
        return 0.0
    zp = 0.5 * (z + 1.0)
    zm = 0.5 * (z - 1.0)
    return zp * math.log2(zp) - zm * math.log2(zm)


def non_gaussianity(state: SchmidtDiagonalState) -> float:
    """Relative-entropy non-Gaussianity of a normalized pure state.

    Equals the von Neumann entropy of the Gaussian state sharing the
    state's first and second moments (the state itself is pure).
    """
    nu_plus, nu_minus = symplectic_eigenvalues(covariance(state))
    return entropy_term(nu_plus) + entropy_term(nu_minus)


def entanglement_rate(e: float, p: float) -> float:
    """Product of distilled entanglement and herald probability."""
    if e < -NUMERIC_SLACK:
        raise DomainError("log negativity must be nonnegative")
    if not -NUMERIC_SLACK <= p <= 1.0 + NUMERIC_SLACK:
        raise DomainError("probability must lie in [0, 1]")
    return e * p


def measure_state(state: SchmidtDiagonalState, probability: float) -> MeasureRecord:
    """Bundle all measures for a state heralded with the given probability."""
    e = log_negativity(state)
    g = non_gaussianity(state)
    return MeasureRecord(e, probability, g, entanglement_rate(e, probability))
