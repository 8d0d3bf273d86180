"""Closed-form probability bounds reported next to the simulations.

All evaluators return the raw formula value; values above 1 are flagged as
vacuous rather than clamped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DobrushinViolationError
from .potential import PairwisePotential, dobrushin_coefficient, tail_sum


@dataclass(frozen=True)
class BoundReport:
    """One evaluated bound together with the inputs it was computed from."""

    theorem: str
    value: float
    inputs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("a probability bound cannot be negative")

    @property
    def vacuous(self) -> bool:
        return self.value > 1.0


def bernstein(n: int, epsilon: float, v: float, b: float) -> float:
    """Two-sided deviation bound 2 exp(-n eps^2 / (2 (v + b eps / 3)))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if epsilon <= 0 or v <= 0 or b <= 0:
        raise ValueError("epsilon, v and b must be positive")
    return 2.0 * math.exp(-n * epsilon**2 / (2.0 * (v + b * epsilon / 3.0)))


def misid_bound_finite(n: int, epsilon: float, v: float, L: int, d: int) -> BoundReport:
    """Misidentification bound for finite-range potentials.

    value = 4 exp(-n eps^2 / (8v + 4 eps / 3) + 2 (2L)^d).
    """
    if n < 1 or L < 1 or d < 1:
        raise ValueError("n, L and d must be positive integers")
    if epsilon <= 0 or v <= 0:
        raise ValueError("epsilon and v must be positive")
    exponent = -n * epsilon**2 / (8.0 * v + 4.0 * epsilon / 3.0) + 2.0 * (2 * L) ** d
    value = 4.0 * math.exp(exponent)
    return BoundReport(
        "finite-range-misid",
        value,
        {"n": n, "epsilon": epsilon, "v": v, "L": L, "d": d},
    )


def misid_bound_infinite(
    n: int, epsilon: float, v: float, L: int, d: int, r: float, tail: float
) -> BoundReport:
    """Finite-range bound plus the truncation penalty n (2L)^d tail / (1 - r)."""
    if tail < 0:
        raise ValueError("tail must be >= 0")
    if not 0 <= r < 1:
        raise DobrushinViolationError(f"requires r < 1, got r = {r}")
    finite = misid_bound_finite(n, epsilon, v, L, d)
    value = finite.value + n * (2 * L) ** d * tail / (1.0 - r)
    inputs = dict(finite.inputs, r=r, tail=tail)
    return BoundReport("infinite-range-misid", value, inputs)


def coupling_bound(J: PairwisePotential, L: int) -> float:
    """Stationary per-site discrepancy bound tail_sum(J, L) / (1 - r)."""
    r = dobrushin_coefficient(J).value
    if r >= 1:
        raise DobrushinViolationError(f"requires r < 1, got r = {r}")
    return tail_sum(J, L) / (1.0 - r)


def v_analytic_bounds(r: float, L: int, d: int) -> tuple[float, float]:
    """Closed-form envelope for the variance proxy v.

    lower = (2 / (1 + e^(2r))) 2^(-(2L)^d);
    upper = ((1 + e^(2r)) / e^(2r))^(-(2L)^d).
    """
    if not 0 <= r < 1:
        raise DobrushinViolationError(f"requires r < 1, got r = {r}")
    if L < 1 or d < 1:
        raise ValueError("L and d must be >= 1")
    m = (2 * L) ** d
    e2r = math.exp(2.0 * r)
    lower = (2.0 / (1.0 + e2r)) * 2.0 ** (-m)
    upper = ((1.0 + e2r) / e2r) ** (-m)
    return lower, upper
