"""Closed-form success probability and negativity for replacement cascades.

Both closed forms expand the cascade coefficient polynomial binomially and
reduce every term to a power moment ``sum_{n>=0} n**m z**n``.  The moments
are evaluated through their Eulerian-polynomial closed form, so this module
never sums the defining series term by term; the step-composed cascade in
:mod:`cprsim.protocols` therefore acts as a fully independent cross-check.

Authority order when the evaluations disagree: direct series first, the
derivative recursion ``a_{m+1} = (t / 2k) d a_m / d t`` second.  The flat
double-sum form kept in :func:`moment_double_sum_variant` is inconsistent
with that recursion already at ``m = 1`` and exists only as a regression
reference.
"""

from __future__ import annotations

import functools
import math
import warnings

from .errors import DomainError

__all__ = [
    "MAX_MOMENT_ORDER",
    "power_moment",
    "moment_double_sum_variant",
    "success_probability_closed",
    "log_negativity_closed",
    "probability_monotone_check",
]

#: Largest supported moment order; Eulerian rows stay exact integers here.
MAX_MOMENT_ORDER = 40


@functools.lru_cache(maxsize=None)
def _eulerian_row(m: int) -> tuple[int, ...]:
    """Eulerian numbers ``A(m, j)`` for ``j = 0..m-1``, exact integers.

    Recurrence: ``A(m, j) = (j + 1) A(m-1, j) + (m - j) A(m-1, j-1)``.
    """
    if m < 1:
        raise DomainError("Eulerian rows start at order 1")
    row: tuple[int, ...] = (1,)
    for order in range(2, m + 1):
        prev = row
        row = tuple(
            (j + 1) * (prev[j] if j < len(prev) else 0)
            + (order - j) * (prev[j - 1] if j >= 1 else 0)
            for j in range(order)
        )
    return row


def _validate_moment_args(m: int, z: float) -> None:
    if not isinstance(m, int) or m < 0:
        raise DomainError("moment order must be a nonnegative integer")
    if m > MAX_MOMENT_ORDER:
        raise DomainError(f"moment order is capped at {MAX_MOMENT_ORDER}")
    if not 0.0 < z < 1.0:
        raise DomainError(f"series argument must lie in (0, 1), got {z}")


def power_moment(m: int, z: float) -> float:
    """Closed-form value of ``sum_{n>=0} n**m z**n`` for ``0 < z < 1``.

    ``m = 0`` gives ``1 / (1 - z)``; otherwise the Eulerian form
    ``z * sum_j A(m, j) z**j / (1 - z)**(m + 1)``.
    """
    _validate_moment_args(m, z)
    if m == 0:
        return 1.0 / (1.0 - z)
    acc = 0.0
    for a in reversed(_eulerian_row(m)):
        acc = acc * z + a
    return z * acc / (1.0 - z) ** (m + 1)


def moment_double_sum_variant(m: int, z: float) -> float:
    """Flat double-sum unrolling of the moment recursion; kept as a foil.

    Evaluates ``(1 - z)**-(m+1) * sum_{i,j=0}^{m} i z**i (1 - z)**j``
    literally.  At ``m = 1`` this yields ``z (2 - z) / (1 - z)**2`` rather
    than the recursion-consistent ``z / (1 - z)**2``, so it must never feed
    a production path; regression tests pin the divergence.
    """
    _validate_moment_args(m, z)
    one_minus = 1.0 - z
    total = 0.0
    for i in range(m + 1):
        for j in range(m + 1):
            total += i * z**i * one_minus**j
    return total / one_minus ** (m + 1)


def _binomial_moment_sum(count: int, t: float, z: float) -> float:
    """``sum_{l=0}^{count} C(count, l) t**(count-2l) (-(1-t^2))**l a_l(z)``."""
    neg_refl_sq = -(1.0 - t * t)
    total = 0.0
    for l in range(count + 1):
        total += (
            math.comb(count, l) * t ** (count - 2 * l) * neg_refl_sq**l * power_moment(l, z)
        )
    return total


def _validate_cascade_args(k: int, lam: float, t: float) -> None:
    if not isinstance(k, int) or k < 1:
        raise DomainError("step count k must be a positive integer")
    if 2 * k > MAX_MOMENT_ORDER:
        raise DomainError(f"step count k is capped at {MAX_MOMENT_ORDER // 2}")
    if not 0.0 < lam < 1.0:
        raise DomainError("lambda must lie in (0, 1)")
    if not 0.0 < t <= 1.0:
        raise DomainError("amplitude transmissivity must lie in (0, 1]")


def success_probability_closed(k: int, lam: float, t: float) -> float:
    """Closed-form success probability of a ``k``-step replacement cascade.

    ``(1 - lam^2) sum_{m=0}^{2k} C(2k, m) t**(2k-2m) (-1)^m (1-t^2)^m a_m``
    with ``a_m = power_moment(m, lam^2 t^(2k))``.  Equals 1 at ``t = 1``.
    """
    _validate_cascade_args(k, lam, t)
    x = lam * lam * t ** (2 * k)
    return (1.0 - lam * lam) * _binomial_moment_sum(2 * k, t, x)


def log_negativity_closed(k: int, lam: float, t: float) -> float:
    """Closed-form logarithmic negativity of a ``k``-step cascade.

    The numerator squares the *signed* coefficient sum, which equals the
    absolute sum only when every cascade coefficient shares one sign; that
    is guaranteed for even ``k``.  Odd ``k`` emits a validity warning and
    returns the signed-sum value unchanged.
    """
    _validate_cascade_args(k, lam, t)
    if k % 2:
        warnings.warn(
            "closed-form negativity squares the signed coefficient sum and is "
            "exact only for even step counts",
            RuntimeWarning,
            stacklevel=2,
        )
    y = lam * t**k
    x = lam * lam * t ** (2 * k)
    numerator = _binomial_moment_sum(k, t, y)
    denominator = _binomial_moment_sum(2 * k, t, x)
    return math.log2(numerator * numerator / denominator)


def probability_monotone_check(
    k_max: int, lam: float, t: float, slack: float = 1e-12
) -> tuple[bool, list[float]]:
    """Check that the cascade success probability never grows with ``k``.

    Returns ``(ok, margins)`` where ``margins[i] = P_{i+1} - P_{i+2}``; the
    check passes when every margin is at least ``-slack``.
    """
    if k_max < 2:
        raise DomainError("k_max must be at least 2")
    probabilities = [success_probability_closed(k, lam, t) for k in range(1, k_max + 1)]
    margins = [probabilities[i] - probabilities[i + 1] for i in range(len(probabilities) - 1)]
    return all(m >= -slack for m in margins), margins
