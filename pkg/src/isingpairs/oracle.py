"""Brute-force exact computations on small volumes.

An ExactModel enumerates all 2^|volume| configurations of the Gibbs measure
with weights proportional to exp(sum_{pairs} J(i,j) x(i) x(j)), which is the
unique finite-volume measure whose single-site conditionals have the
logistic form used by the sampler.  Everything else — marginals,
conditionals, the weighted conditional distance, the population
neighborhood, and the variance proxies — is derived from the weight table.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import CapacityError
from .potential import PairwisePotential, Site, ball_sites

DEFAULT_SITE_CAP = 20

Pattern = Mapping[Site, int]


@dataclass(frozen=True)
class ExactModel:
    """Fully enumerated Gibbs distribution on a small volume.

    `probs` is indexed by configuration code; bit k (big-endian: volume[0]
    is the most significant bit) is 1 when volume[k] carries spin +1.
    """

    potential: PairwisePotential
    volume: tuple[Site, ...]
    probs: np.ndarray
    log_partition: float

    @property
    def n_sites(self) -> int:
        return len(self.volume)

    def tensor(self) -> np.ndarray:
        """Probability tensor with one length-2 axis per volume site."""
        return self.probs.reshape((2,) * self.n_sites)

    def table(self, sites: Iterable[Site]) -> np.ndarray:
        """Marginal probability tensor over `sites`, axes in that order."""
        order = list(sites)
        if len(set(order)) != len(order):
            raise ValueError("duplicate sites in the requested marginal")
        index = {s: k for k, s in enumerate(self.volume)}
        missing = [s for s in order if s not in index]
        if missing:
            raise ValueError(f"sites outside the model volume: {missing}")
        keep = [index[s] for s in order]
        drop = tuple(k for k in range(self.n_sites) if k not in set(keep))
        t = self.tensor().sum(axis=drop) if drop else self.tensor()
        kept_sorted = sorted(keep)  # axis order after the sum
        return np.transpose(t, axes=[kept_sorted.index(k) for k in keep])


def _spin_bit(spin: int) -> int:
    if spin not in (-1, 1):
        raise ValueError("spins must be -1 or +1")
    return 1 if spin == 1 else 0


def _as_pattern(pattern) -> dict[Site, int]:
    if hasattr(pattern, "as_dict"):
        return pattern.as_dict()
    return dict(pattern)


def exact_distribution(
    J: PairwisePotential,
    volume: Iterable[Site] | None = None,
    cap: int = DEFAULT_SITE_CAP,
) -> ExactModel:
    """Enumerate the Gibbs distribution of J restricted to `volume`."""
    sites = tuple(sorted(set(volume))) if volume is not None else J.volume
    V = len(sites)
    if V > cap:
        raise CapacityError(f"{V} sites exceed the enumeration cap of {cap}")
    index = {s: k for k, s in enumerate(sites)}
    codes = np.arange(2**V, dtype=np.int64)
    log_w = np.zeros(2**V)
    for (a, b), value in J.couplings.items():
        ia, ib = index.get(a), index.get(b)
        if ia is None or ib is None:
            continue
        xa = ((codes >> (V - 1 - ia)) & 1) * 2 - 1
        xb = ((codes >> (V - 1 - ib)) & 1) * 2 - 1
        log_w += value * (xa * xb)
    shift = log_w.max()
    w = np.exp(log_w - shift)
    total = w.sum()
    return ExactModel(J, sites, w / total, float(shift + np.log(total)))


def exact_marginal(model: ExactModel, pattern) -> float:
    """Probability that the configuration extends `pattern`."""
    pat = _as_pattern(pattern)
    vset = set(model.volume)
    outside = [s for s in pat if s not in vset]
    if outside:
        raise ValueError(f"pattern mentions sites outside the volume: {outside}")
    idx = tuple(
        _spin_bit(pat[s]) if s in pat else slice(None) for s in model.volume
    )
    return float(np.sum(model.tensor()[idx]))


def exact_conditional(model: ExactModel, i: Site, s: int, pattern) -> float:
    """P(X(i) = s | pattern), always well defined (all weights positive)."""
    pat = _as_pattern(pattern)
    if i in pat:
        raise ValueError(f"conditioned site {i} appears in the pattern")
    joint = dict(pat)
    joint[i] = s
    return exact_marginal(model, joint) / exact_marginal(model, pat)


def _ball_in_volume(model: ExactModel, i: Site, L: int) -> list[Site]:
    ball = ball_sites(i, L)
    vset = set(model.volume)
    missing = [s for s in ball if s not in vset]
    if missing:
        raise ValueError(f"ball of radius {L} around {i} leaves the volume: {missing}")
    return ball


def _distance_tensor(model: ExactModel, i: Site, j: Site, L: int) -> np.ndarray:
    """Weighted conditional distance for candidate j, indexed by x(ball)."""
    ball = _ball_in_volume(model, i, L)
    if j == i or j not in ball:
        raise ValueError(f"candidate {j} must lie in the ball around {i}, excluding {i}")
    t = model.table(ball)
    a_i, a_j = ball.index(i), ball.index(j)
    p_noi = t.sum(axis=a_i, keepdims=True)
    cond_with_j = t / p_noi
    p_noj = t.sum(axis=a_j, keepdims=True)
    p_noij = t.sum(axis=(a_i, a_j), keepdims=True)
    cond_without_j = p_noj / p_noij
    return np.abs(cond_with_j - cond_without_j) * p_noi


def exact_D(model: ExactModel, i: Site, j: Site, L: int, x) -> float:
    """Population weighted conditional distance at the configuration x(ball)."""
    ball = _ball_in_volume(model, i, L)
    pat = _as_pattern(x)
    missing = [s for s in ball if s not in pat]
    if missing:
        raise ValueError(f"x must assign every ball site; missing {missing}")
    idx = tuple(_spin_bit(pat[s]) for s in ball)
    return float(_distance_tensor(model, i, j, L)[idx])


def exact_D_max(model: ExactModel, i: Site, j: Site, L: int) -> float:
    """Max of the weighted conditional distance over all ball configurations."""
    return float(_distance_tensor(model, i, j, L).max())


def exact_V(model: ExactModel, i: Site, L: int, epsilon: float) -> set[Site]:
    """Population neighborhood: candidates whose max distance exceeds 2*epsilon."""
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    ball = _ball_in_volume(model, i, L)
    return {j for j in ball if j != i and exact_D_max(model, i, j, L) > 2 * epsilon}


def exact_v(model: ExactModel, i: Site, L: int) -> tuple[float, float]:
    """The two variance proxies of the concentration bounds.

    v uses the marginal over ball \\ {j}; v1 uses the full-ball marginal.
    Both are suprema over ball configurations and candidates j.
    """
    ball = _ball_in_volume(model, i, L)
    t = model.table(ball)
    a_i = ball.index(i)
    v = 0.0
    v1 = 0.0
    for j in ball:
        if j == i:
            continue
        a_j = ball.index(j)
        p_noj = t.sum(axis=a_j, keepdims=True)
        p_noij = t.sum(axis=(a_i, a_j), keepdims=True)
        cond = p_noj / p_noij
        v = max(v, float((1.0 - cond * p_noj).max()))
        v1 = max(v1, float((1.0 - cond * t).max()))
    return v, v1
