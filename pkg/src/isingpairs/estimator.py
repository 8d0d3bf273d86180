"""Empirical measures and the neighborhood estimator.

Pattern counting packs the restriction of every draw to the observation
ball into an integer code, so all counts needed for the weighted
conditional distance come from one pass over the sample.  The max over
ball configurations is taken over observed patterns only; unobserved
patterns contribute a distance of exactly zero by the empirical-conditional
convention, so this equals the exhaustive max (which is also implemented,
for verification).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .potential import Site, ball_sites
from .sampler import Sample


@dataclass(frozen=True)
class NeighborhoodEstimate:
    """Selected neighbors of a center site plus the per-candidate scores."""

    center: Site
    radius: int
    threshold: float
    selected: frozenset[Site]
    scores: dict[Site, float]


@dataclass(frozen=True)
class ThresholdSchedule:
    """Threshold as a function of the ball radius and the sample size.

    kind "theoretical": C * sqrt(((2L)^d / n) * ((1+e^2)/e^2)^(-(2L)^d)).
    kind "simple":      C / sqrt(n).
    """

    kind: str
    C: float
    d: int = 2

    def __post_init__(self):
        if self.kind not in ("theoretical", "simple"):
            raise ValueError(f"unknown schedule kind: {self.kind!r}")
        if self.C <= 0:
            raise ValueError("C must be positive")
        if self.d < 1:
            raise ValueError("d must be >= 1")


def threshold(schedule: ThresholdSchedule, L: int, n: int) -> float:
    """Evaluate a threshold schedule."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if schedule.kind == "simple":
        return schedule.C / math.sqrt(n)
    if L < 1:
        raise ValueError("L must be >= 1 for the theoretical schedule")
    m = (2 * L) ** schedule.d
    ratio = (1.0 + math.exp(2.0)) / math.exp(2.0)
    return schedule.C * math.sqrt((m / n) * ratio ** (-m))


def scale_L(n: int, d: int) -> int:
    """Ball radius schedule floor((0.79 ln n)^(1/d) / 2), at least 1."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if d < 1:
        raise ValueError("d must be >= 1")
    return max(1, math.floor(0.5 * (0.79 * math.log(n)) ** (1.0 / d)))


def _pattern_dict(pattern) -> dict[Site, int]:
    if hasattr(pattern, "as_dict"):
        return pattern.as_dict()
    return dict(pattern)


def _columns(sample: Sample, sites) -> list[int]:
    index = {s: k for k, s in enumerate(sample.sites)}
    missing = [s for s in sites if s not in index]
    if missing:
        raise ValueError(f"sites not observed by the sample: {missing}")
    return [index[s] for s in sites]


def empirical_prob(sample: Sample, pattern) -> float:
    """Fraction of draws matching the pattern on its sites."""
    pat = _pattern_dict(pattern)
    if not pat:
        return 1.0
    cols = _columns(sample, list(pat))
    want = np.array([pat[s] for s in pat], dtype=np.int8)
    hits = np.all(sample.spins[:, cols] == want, axis=1)
    return float(np.count_nonzero(hits)) / sample.n


def empirical_conditional(sample: Sample, i: Site, s: int, pattern) -> float:
    """Empirical conditional of spin s at i given the pattern; 0 when unseen."""
    pat = _pattern_dict(pattern)
    if i in pat:
        raise ValueError(f"conditioned site {i} appears in the pattern")
    den = empirical_prob(sample, pat)
    if den == 0.0:
        return 0.0
    joint = dict(pat)
    joint[i] = s
    return empirical_prob(sample, joint) / den


def empirical_D(sample: Sample, i: Site, j: Site, L: int, x) -> float:
    """Empirical weighted conditional distance at one ball configuration."""
    ball = ball_sites(i, L)
    if j == i or j not in ball:
        raise ValueError(f"candidate {j} must lie in the ball around {i}, excluding {i}")
    pat = _pattern_dict(x)
    missing = [s for s in ball if s not in pat]
    if missing:
        raise ValueError(f"x must assign every ball site; missing {missing}")
    _columns(sample, ball)
    rest = {s: pat[s] for s in ball if s != i}
    rest_no_j = {s: v for s, v in rest.items() if s != j}
    weight = empirical_prob(sample, rest)
    if weight == 0.0:
        return 0.0
    with_j = empirical_conditional(sample, i, pat[i], rest)
    without_j = empirical_conditional(sample, i, pat[i], rest_no_j)
    return abs(with_j - without_j) * weight


def _drop_bit(codes: np.ndarray, pos: int) -> np.ndarray:
    low = codes & ((1 << pos) - 1)
    return ((codes >> (pos + 1)) << pos) | low


def _insert_bit(codes: np.ndarray, pos: int, bit: int) -> np.ndarray:
    low = codes & ((1 << pos) - 1)
    return ((codes >> pos) << (pos + 1)) | (bit << pos) | low


def _aggregate(codes: np.ndarray, counts: np.ndarray):
    uniq, inverse = np.unique(codes, return_inverse=True)
    return uniq, np.bincount(inverse, weights=counts).astype(np.int64)


def _count_of(query: np.ndarray, uniq: np.ndarray, counts: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(uniq, query)
    idx = np.minimum(idx, len(uniq) - 1)
    out = counts[idx]
    return np.where(uniq[idx] == query, out, 0)


def estimate_neighborhood(
    sample: Sample,
    i: Site,
    L: int,
    epsilon: float,
    exhaustive: bool = False,
) -> NeighborhoodEstimate:
    """Score every candidate in the ball around i and threshold at epsilon.

    The score of candidate j is the max of the empirical weighted
    conditional distance over ball configurations; selection uses the
    strict inequality score > epsilon.  With `exhaustive` the max runs
    over all 2^|ball| configurations instead of observed ones (slower,
    identical by construction; kept as a cross-check).
    """
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    if L < 1:
        raise ValueError("L must be >= 1")
    ball = ball_sites(i, L)
    cols = _columns(sample, ball)
    m = len(ball)
    pos_i = ball.index(i)
    n = sample.n

    bits = ((sample.spins[:, cols] + 1) >> 1).astype(np.int64)
    codes = bits @ (np.int64(1) << np.arange(m, dtype=np.int64))
    full_uniq, full_counts = np.unique(codes, return_counts=True)

    # patterns over ball \ {i}
    noi_uniq, noi_counts = _aggregate(_drop_bit(full_uniq, pos_i), full_counts)
    if exhaustive:
        if m - 1 > 22:
            raise ValueError("exhaustive scoring is limited to small balls")
        all_noi = np.arange(1 << (m - 1), dtype=np.int64)
        c1 = _count_of(all_noi, noi_uniq, noi_counts)
        noi_codes = all_noi
    else:
        noi_codes, c1 = noi_uniq, noi_counts

    # full-pattern counts for both center spins
    full_s = [_insert_bit(noi_codes, pos_i, b) for b in (0, 1)]
    num1 = [_count_of(f, full_uniq, full_counts) for f in full_s]

    scores: dict[Site, float] = {}
    weight = c1 / n
    safe_c1 = np.where(c1 > 0, c1, 1)
    for j in ball:
        if j == i:
            continue
        pos_j = ball.index(j)
        noj_uniq, noj_counts = _aggregate(_drop_bit(full_uniq, pos_j), full_counts)
        pos_j_in_noi = pos_j if pos_j < pos_i else pos_j - 1
        noij_codes = _drop_bit(noi_codes, pos_j_in_noi)
        noij_uniq, noij_counts = _aggregate(_drop_bit(noi_uniq, pos_j_in_noi), noi_counts)
        den2 = _count_of(noij_codes, noij_uniq, noij_counts)
        safe_den2 = np.where(den2 > 0, den2, 1)
        best = 0.0
        pos_i_in_noj = pos_i if pos_i < pos_j else pos_i - 1
        for b in (0, 1):
            cond1 = np.where(c1 > 0, num1[b] / safe_c1, 0.0)
            noj_query = _insert_bit(noij_codes, pos_i_in_noj, b)
            num2 = _count_of(noj_query, noj_uniq, noj_counts)
            cond2 = np.where(den2 > 0, num2 / safe_den2, 0.0)
            d = np.abs(cond1 - cond2) * weight
            if d.size:
                best = max(best, float(d.max()))
        scores[j] = best
    selected = frozenset(j for j, sc in scores.items() if sc > epsilon)
    return NeighborhoodEstimate(i, L, float(epsilon), selected, scores)


def estimate_report(estimate: NeighborhoodEstimate) -> str:
    """Structured text report: center, radius, threshold, scores, selection."""
    lines = [
        f"center {' '.join(map(str, estimate.center))}",
        f"radius {estimate.radius}",
        f"threshold {estimate.threshold!r}",
        f"candidates {len(estimate.scores)}",
    ]
    for j in sorted(estimate.scores):
        mark = "selected" if j in estimate.selected else "rejected"
        lines.append(f"{' '.join(map(str, j))} {estimate.scores[j]!r} {mark}")
    return "\n".join(lines) + "\n"
