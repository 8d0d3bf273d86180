"""Pairwise coupling potentials on finite volumes of Z^d.

Sites are d-tuples of ints, distances are measured in the maximum norm,
and couplings are stored sparsely (one entry per unordered pair with a
nonzero value).  Potentials are treated as immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, NamedTuple

import numpy as np

Site = tuple[int, ...]


def max_norm(a: Site, b: Site) -> int:
    """L-infinity distance between two lattice sites."""
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {a} vs {b}")
    return max(abs(x - y) for x, y in zip(a, b))


@dataclass(frozen=True)
class Box:
    """Max-norm ball of a given radius around a center site.

    Sites are enumerated lexicographically, so the order is deterministic
    and shared by every structure built on top of a box.
    """

    center: Site
    radius: int
    dimension: int

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.radius < 0:
            raise ValueError("radius must be >= 0")
        if len(self.center) != self.dimension:
            raise ValueError("center does not match dimension")

    def __contains__(self, site: Site) -> bool:
        return max_norm(site, self.center) <= self.radius

    def __len__(self) -> int:
        return (2 * self.radius + 1) ** self.dimension

    def sites(self) -> list[Site]:
        """All sites of the box in lexicographic order."""
        ranges = [range(c - self.radius, c + self.radius + 1) for c in self.center]
        return [tuple(p) for p in product(*ranges)]


def ball_sites(center: Site, radius: int) -> list[Site]:
    """Sites of the max-norm ball around `center`, lexicographic order."""
    return Box(center, radius, len(center)).sites()


def _pair_key(a: Site, b: Site) -> tuple[Site, Site]:
    return (a, b) if a <= b else (b, a)


class DobrushinCoefficient(NamedTuple):
    value: float
    satisfied: bool  # value < 1


@dataclass(frozen=True)
class PairwisePotential:
    """Symmetric coupling map J(i, j) over a finite volume.

    Pairs that are not stored have coupling zero, as do all pairs touching
    sites outside the volume.  The diagonal is identically zero.
    """

    volume: tuple[Site, ...]
    couplings: dict[tuple[Site, Site], float] = field(default_factory=dict)

    def __post_init__(self):
        vol = tuple(sorted(set(self.volume)))
        object.__setattr__(self, "volume", vol)
        if not vol:
            raise ValueError("volume must be nonempty")
        d = len(vol[0])
        if any(len(s) != d for s in vol):
            raise ValueError("all volume sites must share the same dimension")
        vset = set(vol)
        clean: dict[tuple[Site, Site], float] = {}
        for (a, b), value in self.couplings.items():
            if a == b:
                raise ValueError(f"diagonal coupling at {a} must be zero")
            if a not in vset or b not in vset:
                raise ValueError(f"pair ({a}, {b}) not inside the volume")
            if not math.isfinite(value):
                raise ValueError(f"coupling for ({a}, {b}) is not finite")
            key = _pair_key(a, b)
            if key in clean and clean[key] != value:
                raise ValueError(f"conflicting values for pair {key}")
            if value != 0.0:
                clean[key] = float(value)
        object.__setattr__(self, "couplings", clean)

    @property
    def dimension(self) -> int:
        return len(self.volume[0])

    def coupling(self, a: Site, b: Site) -> float:
        if a == b:
            return 0.0
        return self.couplings.get(_pair_key(a, b), 0.0)

    def range(self) -> int:
        """Largest max-norm distance carrying a nonzero coupling."""
        if not self.couplings:
            return 0
        return max(max_norm(a, b) for a, b in self.couplings)

    def site_index(self) -> dict[Site, int]:
        return {s: k for k, s in enumerate(self.volume)}

    def to_dense(self, sites: Iterable[Site] | None = None) -> np.ndarray:
        """Dense symmetric coupling matrix over `sites` (default: the volume)."""
        order = list(self.volume if sites is None else sites)
        index = {s: k for k, s in enumerate(order)}
        J = np.zeros((len(order), len(order)))
        for (a, b), value in self.couplings.items():
            ia, ib = index.get(a), index.get(b)
            if ia is not None and ib is not None:
                J[ia, ib] = J[ib, ia] = value
        return J


def dobrushin_coefficient(J: PairwisePotential) -> DobrushinCoefficient:
    """Maximum absolute coupling row sum, with a uniqueness flag.

    Values >= 1 are legal inputs (the finite-range misidentification bound
    does not need the contraction condition), so no error is raised.
    """
    rows: dict[Site, float] = {}
    for (a, b), value in J.couplings.items():
        rows[a] = rows.get(a, 0.0) + abs(value)
        rows[b] = rows.get(b, 0.0) + abs(value)
    r = max(rows.values(), default=0.0)
    return DobrushinCoefficient(r, r < 1.0)


def truncate(J: PairwisePotential, L: int) -> PairwisePotential:
    """Drop every coupling between sites farther apart than L."""
    if L < 1:
        raise ValueError("truncation radius L must be >= 1")
    kept = {pair: v for pair, v in J.couplings.items() if max_norm(*pair) <= L}
    return PairwisePotential(J.volume, kept)


def tail_sum(J: PairwisePotential, L: int) -> float:
    """Worst site's total absolute coupling to sites beyond distance L."""
    if L < 1:
        raise ValueError("L must be >= 1")
    rows: dict[Site, float] = {}
    for (a, b), value in J.couplings.items():
        if max_norm(a, b) > L:
            rows[a] = rows.get(a, 0.0) + abs(value)
            rows[b] = rows.get(b, 0.0) + abs(value)
    return max(rows.values(), default=0.0)


def interaction_neighborhood(J: PairwisePotential, i: Site) -> set[Site]:
    """All sites with a nonzero coupling to `i`."""
    if i not in set(J.volume):
        raise ValueError(f"site {i} is outside the volume")
    out = set()
    for (a, b) in J.couplings:
        if a == i:
            out.add(b)
        elif b == i:
            out.add(a)
    return out


def random_interaction_graph(
    box: Box,
    edge_prob: float,
    degree_cap: int,
    coupling: float,
    seed: int,
) -> PairwisePotential:
    """Random interaction graph over a box with a hard per-site degree cap.

    Unordered pairs are visited in lexicographic order and each is admitted
    with probability `edge_prob`, unless one of its endpoints already has
    `degree_cap` edges.  One uniform variate is consumed per pair whether or
    not the cap blocks it, so the admission pattern of later pairs does not
    depend on earlier cap rejections.  Rejected pairs are not retried.
    """
    if not 0.0 <= edge_prob <= 1.0:
        raise ValueError("edge_prob must lie in [0, 1]")
    if degree_cap < 0:
        raise ValueError("degree_cap must be >= 0")
    rng = np.random.default_rng(seed)
    sites = box.sites()
    degree: dict[Site, int] = {s: 0 for s in sites}
    couplings: dict[tuple[Site, Site], float] = {}
    for a, b in combinations(sites, 2):
        u = rng.random()
        if u < edge_prob and degree[a] < degree_cap and degree[b] < degree_cap:
            couplings[(a, b)] = coupling
            degree[a] += 1
            degree[b] += 1
    return PairwisePotential(tuple(sites), couplings)


def save_potential(J: PairwisePotential, path) -> None:
    """Write a potential as structured text; floats round-trip exactly."""
    lo = [min(s[k] for s in J.volume) for k in range(J.dimension)]
    hi = [max(s[k] for s in J.volume) for k in range(J.dimension)]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"dimension {J.dimension}\n")
        fh.write("bounds " + " ".join(map(str, lo + hi)) + "\n")
        fh.write(f"sites {len(J.volume)}\n")
        for s in J.volume:
            fh.write(" ".join(map(str, s)) + "\n")
        fh.write(f"edges {len(J.couplings)}\n")
        for (a, b), value in sorted(J.couplings.items()):
            coords = " ".join(map(str, a)) + " " + " ".join(map(str, b))
            fh.write(f"{coords} {value!r}\n")


def load_potential(path) -> PairwisePotential:
    with open(path, encoding="utf-8") as fh:
        tokens = fh.read().split("\n")
    lines = [ln for ln in tokens if ln.strip()]
    pos = 0

    def expect(keyword: str) -> list[str]:
        nonlocal pos
        parts = lines[pos].split()
        if parts[0] != keyword:
            raise ValueError(f"expected '{keyword}' at line {pos + 1} of {path}")
        pos += 1
        return parts[1:]

    d = int(expect("dimension")[0])
    expect("bounds")
    n_sites = int(expect("sites")[0])
    volume = []
    for _ in range(n_sites):
        volume.append(tuple(int(t) for t in lines[pos].split()))
        pos += 1
    n_edges = int(expect("edges")[0])
    couplings = {}
    for _ in range(n_edges):
        parts = lines[pos].split()
        pos += 1
        a = tuple(int(t) for t in parts[:d])
        b = tuple(int(t) for t in parts[d : 2 * d])
        couplings[(a, b)] = float(parts[2 * d])
    return PairwisePotential(tuple(volume), couplings)
