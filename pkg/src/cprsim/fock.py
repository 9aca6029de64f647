"""Schmidt-diagonal two-mode states and heralded beam-splitter operators.

Conventions used throughout the package:

* ``t`` is the *amplitude* transmissivity of a beam splitter; the amplitude
  reflectivity is ``sqrt(1 - t**2)``, so ``t**2 + r**2 = 1``.
* Two-mode pure states are kept in Schmidt-diagonal form
  ``sum_n c_n |n + a, n + b>`` with real coefficients and per-mode Fock
  offsets ``a`` and ``b``.  Every heralded operation built here maps this
  family onto itself, which keeps the whole pipeline one-dimensional
  instead of a full two-mode tensor.
* A heralded operation mixes one mode with an ``ancilla_in``-photon state
  on a beam splitter and post-selects on ``detected`` photons at the spare
  output port.  The surviving mode picks up a diagonal coefficient and a
  fixed Fock-index shift ``ancilla_in - detected``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, ImpossibleOutcomeError

__all__ = [
    "MIN_EVENT_PROBABILITY",
    "TruncationPolicy",
    "DEFAULT_POLICY",
    "TmsvParams",
    "BeamSplitter",
    "SchmidtDiagonalState",
    "DiagonalShiftOperator",
    "bs_coefficient",
    "build_heralded_operator",
    "pr_coefficient",
    "tmsv",
    "apply_operator",
]

#: Success probabilities below this signal a herald that can never fire.
MIN_EVENT_PROBABILITY = 1e-300

#: Normalization slack accepted when constructing a state.
NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class TruncationPolicy:
    """Adaptive Fock-space truncation.

    Coefficient lists are extended until the newest term's squared
    amplitude falls below ``tail_tolerance`` times the running norm, with a
    hard cap of ``n_cap`` photons.  The default tolerance is pinned by the
    *absolute*-coefficient sum inside the negativity measure, whose tail is
    a factor ``lam / (1 - lam)`` fatter than the norm's; ``1e-28`` keeps
    that measure accurate to 1e-10 across the supported squeezing range.
    """

    tail_tolerance: float = 1e-28
    n_cap: int = 400

    def __post_init__(self) -> None:
        if not 0.0 < self.tail_tolerance < 1.0:
            raise DomainError("tail_tolerance must lie in (0, 1)")
        if self.n_cap < 1:
            raise DomainError("n_cap must be a positive integer")


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class TmsvParams:
    """Two-mode squeezed vacuum parameters.

    ``lam`` is the Schmidt parameter (``tanh`` of the squeezing parameter).
    ``r`` may be supplied for convenience; when present it must be
    consistent with ``lam`` to machine precision.  Use
    :meth:`from_squeezing` to construct directly from ``r``.
    """

    lam: float
    r: Optional[float] = None

    def __post_init__(self) -> None:
        if not 0.0 < self.lam < 1.0:
            raise DomainError(f"lambda must lie in (0, 1), got {self.lam}")
        if self.r is not None:
            if self.r <= 0.0:
                raise DomainError("squeezing parameter r must be positive")
            expected = math.tanh(self.r)
            if abs(self.lam - expected) > 4.0 * np.finfo(float).eps:
                raise DomainError(
                    f"lambda={self.lam} is inconsistent with tanh(r)={expected}"
                )

    @classmethod
    def from_squeezing(cls, r: float) -> "TmsvParams":
        if r <= 0.0:
            raise DomainError("squeezing parameter r must be positive")
        return cls(math.tanh(r), r)


@dataclass(frozen=True)
class BeamSplitter:
    """Beam splitter with amplitude transmissivity ``t`` in [0, 1]."""

    t: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.t <= 1.0:
            raise DomainError(f"amplitude transmissivity must lie in [0, 1], got {self.t}")

    @property
    def r_amp(self) -> float:
        """Amplitude reflectivity ``sqrt(1 - t**2)``."""
        return math.sqrt(max(0.0, 1.0 - self.t * self.t))


@dataclass(frozen=True, eq=False)
class SchmidtDiagonalState:
    """Normalized two-mode pure state ``sum_n c_n |n + a, n + b>``.

    The coefficient array is stored normalized and read-only; signs are
    retained (absolute values are taken only inside entanglement measures).
    """

    offset_a: int
    offset_b: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        if self.offset_a < 0 or self.offset_b < 0:
            raise DomainError("Fock offsets must be nonnegative")
        arr = np.array(self.coeffs, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("coefficients must form a nonempty 1-d sequence")
        if not np.all(np.isfinite(arr)):
            raise DomainError("coefficients must be finite")
        norm_sq = float(np.dot(arr, arr))
        if abs(norm_sq - 1.0) > NORMALIZATION_TOL:
            raise DomainError(f"state is not normalized: sum c_n^2 = {norm_sq!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def n_max(self) -> int:
        """Truncation bound: the largest retained Schmidt index."""
        return self.coeffs.size - 1


@dataclass(frozen=True, eq=False)
class DiagonalShiftOperator:
    """Heralded single-mode operator ``sum_n d_n |n + shift><n|``.

    ``coeffs[n]`` is the amplitude picked up by Fock input ``|n>``;
    ``herald`` records ``(ancilla_in, detected)`` and fixes
    ``shift = ancilla_in - detected``.
    """

    shift: int
    coeffs: np.ndarray
    herald: tuple[int, int]
    bs: BeamSplitter

    def __post_init__(self) -> None:
        ancilla_in, detected = self.herald
        if ancilla_in < 0 or detected < 0:
            raise DomainError("herald photon numbers must be nonnegative")
        if self.shift != ancilla_in - detected:
            raise DomainError("shift must equal ancilla_in - detected")
        arr = np.array(self.coeffs, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("operator coefficients must form a nonempty 1-d sequence")
        if not np.all(np.isfinite(arr)):
            raise DomainError("operator coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)


def bs_coefficient(n1: int, n2: int, k1: int, k2: int, bs: BeamSplitter) -> float:
    """Fock-basis beam-splitter matrix element.

    Amplitude with which the input ``|n1, n2>`` contributes to the output
    ``|k1 + k2, n1 + n2 - k1 - k2>``, where ``k1`` photons of the first
    input are transmitted and ``k2`` photons of the second are reflected.
    Factorials are accumulated through log-gamma so indices up to the
    truncation cap evaluate without overflow.
    """
    if min(n1, n2, k1, k2) < 0:
        raise DomainError("photon numbers must be nonnegative")
    if k1 > n1 or k2 > n2:
        raise DomainError(f"require k1 <= n1 and k2 <= n2, got {(n1, n2, k1, k2)}")
    t = bs.t
    r = bs.r_amp
    p_t = n2 + k1 - k2
    p_r = n1 - k1 + k2
    if t == 0.0 and p_t > 0:
        return 0.0
    if r == 0.0 and p_r > 0:
        return 0.0
    log_mag = 0.5 * (
        math.lgamma(k1 + k2 + 1)
        + math.lgamma(n1 + n2 - k1 - k2 + 1)
        - math.lgamma(n1 + 1)
        - math.lgamma(n2 + 1)
    )
    log_mag += math.log(math.comb(n1, k1)) + math.log(math.comb(n2, k2))
    if p_t:
        log_mag += p_t * math.log(t)
    if p_r:
        log_mag += p_r * math.log(r)
    sign = -1.0 if (n1 - k1) % 2 else 1.0
    return sign * math.exp(log_mag)


def pr_coefficient(n: int, t: float) -> float:
    """Photon-replacement diagonal coefficient ``t**(n+1) - n (1-t^2) t**(n-1)``.

    The ``n = 0`` case is evaluated directly as ``t`` so no negative power
    of ``t`` is ever formed (in particular at ``t = 0``).
    """
    if n < 0:
        raise DomainError("Fock index must be nonnegative")
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"amplitude transmissivity must lie in [0, 1], got {t}")
    if n == 0:
        return t
    return t ** (n + 1) - n * (1.0 - t * t) * t ** (n - 1)


def build_heralded_operator(
    ancilla_in: int, detected: int, bs: BeamSplitter, n_max: int
) -> DiagonalShiftOperator:
    """Construct the diagonal operator for one heralded beam-splitter event.

    For system input ``|n>`` mixed with ``|ancilla_in>``, the coefficient
    ``d_n`` sums the beam-splitter paths that leave exactly ``detected``
    photons at the spare port; the surviving mode carries
    ``n + ancilla_in - detected`` photons.  ``(1, 1)`` reproduces photon
    replacement, ``(1, 0)`` photon addition, ``(0, 1)`` photon subtraction.
    """
    if ancilla_in < 0 or detected < 0:
        raise DomainError("herald photon numbers must be nonnegative")
    if n_max < 0:
        raise DomainError("n_max must be nonnegative")
    shift = ancilla_in - detected
    coeffs = np.zeros(n_max + 1)
    for n in range(n_max + 1):
        out = n + shift
        if out < 0:
            continue  # amplitude into negative Fock index: annihilated
        total = 0.0
        for k2 in range(ancilla_in + 1):
            k1 = out - k2
            if 0 <= k1 <= n:
                total += bs_coefficient(n, ancilla_in, k1, k2, bs)
        coeffs[n] = total
    return DiagonalShiftOperator(shift, coeffs, (ancilla_in, detected), bs)


def tmsv(params: TmsvParams, policy: TruncationPolicy = DEFAULT_POLICY) -> SchmidtDiagonalState:
    """Two-mode squeezed vacuum truncated per ``policy`` and renormalized.

    Coefficients are ``sqrt(1 - lam^2) * lam**n`` with offsets ``(0, 0)``.
    """
    lam = params.lam
    prefactor = math.sqrt(1.0 - lam * lam)
    coeffs = [prefactor]
    running = prefactor * prefactor
    n = 0
    while n < policy.n_cap:
        n += 1
        c = prefactor * lam**n
        coeffs.append(c)
        if c * c < policy.tail_tolerance * running:
            break
        running += c * c
    arr = np.asarray(coeffs)
    arr /= math.sqrt(float(np.dot(arr, arr)))
    return SchmidtDiagonalState(0, 0, arr)


def apply_operator(
    state: SchmidtDiagonalState, op: DiagonalShiftOperator, mode: int
) -> tuple[SchmidtDiagonalState, float]:
    """Apply a diagonal shift operator to one mode of a Schmidt-diagonal state.

    Returns the renormalized output state and the success probability (the
    squared norm of the un-normalized result).  Amplitudes that would land
    on negative Fock indices are dropped; a physically built herald puts
    zero amplitude there in the first place.

    Raises :class:`ImpossibleOutcomeError` when the herald can never fire.
    """
    if mode not in (1, 2):
        raise DomainError("mode must be 1 or 2")
    offset = state.offset_a if mode == 1 else state.offset_b
    top = state.n_max + offset
    if op.coeffs.size <= top:
        raise DomainError(
            f"operator covers Fock indices up to {op.coeffs.size - 1} "
            f"but the state requires {top}"
        )
    scaled = op.coeffs[offset : top + 1] * state.coeffs
    new_a, new_b = state.offset_a, state.offset_b
    if mode == 1:
        new_a += op.shift
    else:
        new_b += op.shift
    drop = -min(new_a if mode == 1 else new_b, 0)
    if drop:
        # Re-base the Schmidt index after annihilating the lowest slots: the
        # opposite mode's offset absorbs the shift.
        scaled = scaled[drop:]
        if mode == 1:
            new_a = 0
            new_b += drop
        else:
            new_b = 0
            new_a += drop
    probability = float(np.dot(scaled, scaled))
    if probability < MIN_EVENT_PROBABILITY:
        raise ImpossibleOutcomeError(
            f"herald {op.herald} on mode {mode} can never fire for this state"
        )
    new_state = SchmidtDiagonalState(new_a, new_b, scaled / math.sqrt(probability))
    return new_state, probability
