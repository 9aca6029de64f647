"""Shared oracles, independent of the implementation paths they check."""

import math

import numpy as np
import pytest
from scipy.linalg import expm


@pytest.fixture(scope="session")
def unitary_bs_oracle():
    """Beam-splitter action computed through a matrix exponential.

    Builds exp(theta * (a1^dag a2 - a2^dag a1)) with cos(theta) = t on a
    two-mode Fock space truncated at ``cutoff`` photons per mode, applies it
    to |n1, n2>, and returns the output amplitude table indexed by
    (j1, j2).  Photon number is conserved, so the truncation is exact
    whenever cutoff >= n1 + n2.
    """

    def oracle(n1: int, n2: int, t: float, cutoff: int | None = None) -> np.ndarray:
        if cutoff is None:
            cutoff = n1 + n2
        dim = cutoff + 1
        lower = np.diag(np.sqrt(np.arange(1, dim)), k=1)  # annihilation
        a1 = np.kron(lower, np.eye(dim))
        a2 = np.kron(np.eye(dim), lower)
        theta = math.acos(t)
        generator = theta * (a1.T @ a2 - a2.T @ a1)
        unitary = expm(generator)
        vec = np.zeros(dim * dim)
        vec[n1 * dim + n2] = 1.0
        return (unitary @ vec).reshape(dim, dim)

    return oracle


def direct_cascade_sums(k: int, lam: float, t: float, n_max: int = 300):
    """Direct truncated-series sums for a k-step replacement cascade.

    Computed from the coefficient monomials alone (no package imports):
    returns (sum of squared coefficients, sum of absolute values, signed
    sum) including the sqrt(1 - lam^2) prefactor.
    """
    pref = math.sqrt(1.0 - lam * lam)
    sq, absolute, signed = [], [], []
    for n in range(n_max + 1):
        f = t if n == 0 else t ** (n + 1) - n * (1.0 - t * t) * t ** (n - 1)
        c = pref * lam**n * f**k
        sq.append(c * c)
        absolute.append(abs(c))
        signed.append(c)
    return math.fsum(sq), math.fsum(absolute), math.fsum(signed)


def direct_power_moment(m: int, z: float, tol: float = 1e-18) -> float:
    """Term-by-term summation of sum_n n**m z**n, run to convergence."""
    total = 0.0
    n = 0
    term = 1.0 if m == 0 else 0.0
    while True:
        total += term
        n += 1
        term = float(n) ** m * z**n
        if term < tol * max(total, 1.0) and n > m + 4:
            return total
