"""Cascaded heralded protocols on Schmidt-diagonal states.

An arrangement is an ordered sequence of ``(mode, kind)`` steps.  All steps
share one beam splitter unless a per-step override is supplied.  Step order
is preserved exactly as declared (even though the diagonal operators
commute) so the per-step probability log reflects the experiment as stated.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError
from .fock import (
    BeamSplitter,
    SchmidtDiagonalState,
    apply_operator,
    build_heralded_operator,
    pr_coefficient,
)

__all__ = [
    "ProtocolKind",
    "Step",
    "Arrangement",
    "CascadeResult",
    "cascade",
    "symmetric_arrangement",
    "asymmetric_arrangement",
    "cpr_coefficients",
]


class ProtocolKind(enum.Enum):
    """Heralded operation flavors: replacement, addition, subtraction."""

    PR = "pr"
    PA = "pa"
    PS = "ps"

    @property
    def herald(self) -> tuple[int, int]:
        """(ancilla_in, detected) photon numbers for this protocol."""
        return _HERALDS[self]


_HERALDS = {
    ProtocolKind.PR: (1, 1),
    ProtocolKind.PA: (1, 0),
    ProtocolKind.PS: (0, 1),
}

Step = tuple[int, ProtocolKind]
Arrangement = tuple[Step, ...]


@dataclass(frozen=True, eq=False)
class CascadeResult:
    """Output state plus per-step and cumulative success probabilities."""

    state: SchmidtDiagonalState
    step_probabilities: tuple[float, ...]
    total_probability: float


def symmetric_arrangement(k: int, kind: ProtocolKind) -> Arrangement:
    """``k`` steps alternating between the two modes; requires even ``k``."""
    if k < 2 or k % 2:
        raise DomainError("symmetric arrangements require an even step count >= 2")
    return tuple((1 if i % 2 == 0 else 2, kind) for i in range(k))


def asymmetric_arrangement(k: int, kind: ProtocolKind, mode: int = 1) -> Arrangement:
    """``k`` identical steps applied to a single mode."""
    if k < 1:
        raise DomainError("asymmetric arrangements require at least one step")
    if mode not in (1, 2):
        raise DomainError("mode must be 1 or 2")
    return tuple((mode, kind) for _ in range(k))


def cascade(
    initial: SchmidtDiagonalState,
    arrangement: Sequence[Step],
    bs: BeamSplitter,
    *,
    step_bs: Optional[Sequence[BeamSplitter]] = None,
) -> CascadeResult:
    """Apply each step of ``arrangement`` in order and track probabilities.

    ``step_bs`` optionally overrides the shared beam splitter per step.
    Propagates :class:`~cprsim.errors.ImpossibleOutcomeError` from any step.
    """
    steps = tuple(arrangement)
    if not steps:
        raise DomainError("arrangement must contain at least one step")
    if step_bs is not None and len(step_bs) != len(steps):
        raise DomainError("step_bs must supply one beam splitter per step")
    state = initial
    probabilities: list[float] = []
    for i, (mode, kind) in enumerate(steps):
        if mode not in (1, 2):
            raise DomainError(f"step {i}: mode must be 1 or 2")
        if not isinstance(kind, ProtocolKind):
            raise DomainError(f"step {i}: unknown protocol kind {kind!r}")
        splitter = step_bs[i] if step_bs is not None else bs
        ancilla_in, detected = kind.herald
        offset = state.offset_a if mode == 1 else state.offset_b
        op = build_heralded_operator(ancilla_in, detected, splitter, state.n_max + offset)
        state, p = apply_operator(state, op, mode)
        probabilities.append(p)
    return CascadeResult(state, tuple(probabilities), math.prod(probabilities))


def cpr_coefficients(k: int, lam: float, t: float, n_max: int) -> np.ndarray:
    """Un-normalized coefficients of a ``k``-fold replacement cascade.

    Direct evaluation of
    ``sqrt(1 - lam^2) * lam**n * [t**(n-1) (t^2 - n (1 - t^2))]**k``,
    independently of the step-by-step composition in :func:`cascade`.
    ``k = 0`` reduces to the two-mode squeezed vacuum coefficients.
    """
    if k < 0:
        raise DomainError("k must be nonnegative")
    if not 0.0 < lam < 1.0:
        raise DomainError("lambda must lie in (0, 1)")
    if not 0.0 <= t <= 1.0:
        raise DomainError("amplitude transmissivity must lie in [0, 1]")
    if n_max < 0:
        raise DomainError("n_max must be nonnegative")
    prefactor = math.sqrt(1.0 - lam * lam)
    return np.asarray(
        [prefactor * lam**n * pr_coefficient(n, t) ** k for n in range(n_max + 1)]
    )
