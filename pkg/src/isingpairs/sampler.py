"""Exact-coalescence Gibbs sampling and the full-vs-truncated chain pair.

Every draw runs two chains from the all-plus and all-minus configurations
under a shared single-site update coupling, and returns the common state at
the first step where the chains agree.  Draw k of a sample owns the RNG
stream derived from (seed, k), so samples are reproducible and draws can be
generated in any order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import _kernels
from .errors import CoalescenceTimeoutError
from .potential import PairwisePotential, Site, truncate

DEFAULT_STEP_CAP = 10**8


@dataclass(frozen=True)
class SpinConfiguration:
    """One assignment site -> {-1, +1} over an ordered site list."""

    sites: tuple[Site, ...]
    spins: np.ndarray  # int8, values in {-1, +1}

    def __post_init__(self):
        spins = np.asarray(self.spins, dtype=np.int8)
        object.__setattr__(self, "spins", spins)
        if spins.shape != (len(self.sites),):
            raise ValueError("spins must have one entry per site")
        if not np.all(np.abs(spins) == 1):
            raise ValueError("spins must be -1 or +1")

    def spin(self, site: Site) -> int:
        return int(self.spins[self.sites.index(site)])

    def as_dict(self) -> dict[Site, int]:
        return {s: int(v) for s, v in zip(self.sites, self.spins)}


@dataclass(frozen=True)
class Sample:
    """n independent draws over a common ordered site set."""

    sites: tuple[Site, ...]
    spins: np.ndarray  # (n, n_sites) int8
    seed: int
    step_cap: int
    coalescence_steps: np.ndarray  # (n,) int64

    def __post_init__(self):
        spins = np.asarray(self.spins, dtype=np.int8)
        object.__setattr__(self, "spins", spins)
        steps = np.asarray(self.coalescence_steps, dtype=np.int64)
        object.__setattr__(self, "coalescence_steps", steps)
        if spins.ndim != 2 or spins.shape[1] != len(self.sites):
            raise ValueError("spin matrix shape does not match the site list")
        if spins.shape[0] < 1:
            raise ValueError("a sample holds at least one draw")
        if steps.shape != (spins.shape[0],):
            raise ValueError("one coalescence step count per draw is required")

    @property
    def n(self) -> int:
        return self.spins.shape[0]

    def configuration(self, k: int) -> SpinConfiguration:
        return SpinConfiguration(self.sites, self.spins[k])


@dataclass(frozen=True)
class CouplingTrace:
    """Per-site discrepancy statistics of the full-vs-truncated chain pair."""

    sites: tuple[Site, ...]
    discrepancy_counts: np.ndarray  # int64 per site
    recorded_sweeps: int
    burn_in_sweeps: int

    @property
    def rates(self) -> np.ndarray:
        return self.discrepancy_counts / self.recorded_sweeps


def local_spec(J: PairwisePotential, j: Site, s: int, neighbors: SpinConfiguration) -> float:
    """Single-site conditional probability of spin `s` at site `j`.

    Computes 1 / (1 + exp(-2 s sum_k J(j, k) y(k))) over the sites carried
    by `neighbors`; the entry at j itself, if present, is ignored.
    """
    if s not in (-1, 1):
        raise ValueError("spin must be -1 or +1")
    field = 0.0
    for site, y in zip(neighbors.sites, neighbors.spins):
        if site != j:
            field += J.coupling(j, site) * float(y)
    return 1.0 / (1.0 + math.exp(-2.0 * s * field))


def coupling_masses(p_first: float, p_second: float) -> np.ndarray:
    """Joint single-site update law on {-1,+1}^2.

    `p_first` and `p_second` are the probabilities of +1 under the two
    chains' conditionals.  Returns masses for the outcomes
    (+,+), (-,-), (+,-), (-,+) — the cumulative order the kernels use to
    resolve a single uniform variate.
    """
    m_pp = min(p_first, p_second)
    m_mm = min(1.0 - p_first, 1.0 - p_second)
    m_pm = max(p_first - p_second, 0.0)
    m_mp = max(p_second - p_first, 0.0)
    return np.array([m_pp, m_mm, m_pm, m_mp])


def _resolve_volume(J: PairwisePotential, volume: Iterable[Site] | None) -> tuple[Site, ...]:
    if volume is None:
        return J.volume
    vol = tuple(sorted(set(volume)))
    if not vol:
        raise ValueError("volume must be nonempty")
    return vol


def _csr(J: PairwisePotential, sites: tuple[Site, ...]):
    """CSR adjacency of J restricted to `sites`, in that site order."""
    index = {s: k for k, s in enumerate(sites)}
    rows: list[list[tuple[int, float]]] = [[] for _ in sites]
    for (a, b), value in J.couplings.items():
        ia, ib = index.get(a), index.get(b)
        if ia is not None and ib is not None:
            rows[ia].append((ib, value))
            rows[ib].append((ia, value))
    indptr = np.zeros(len(sites) + 1, np.int64)
    indices = []
    values = []
    for k, row in enumerate(rows):
        row.sort()
        indptr[k + 1] = indptr[k] + len(row)
        indices.extend(idx for idx, _ in row)
        values.extend(v for _, v in row)
    return indptr, np.array(indices, np.int64), np.array(values, np.float64)


def _stream(seed: int, k: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, k))))


def _check_seed(seed: int) -> None:
    if not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ValueError("seed must be a nonnegative integer")


def coupled_gibbs_sample(
    J: PairwisePotential,
    volume: Iterable[Site] | None = None,
    seed: int = 0,
    step_cap: int = DEFAULT_STEP_CAP,
) -> SpinConfiguration:
    """One draw via the two-chain coalescence sampler."""
    config, _ = _coupled_draw(J, _resolve_volume(J, volume), seed, step_cap, 0)
    return config


def _coupled_draw(J, sites, seed, step_cap, k):
    _check_seed(seed)
    if step_cap < 1:
        raise ValueError("step_cap must be >= 1")
    indptr, indices, values = _csr(J, sites)
    spins, steps, ok = _kernels.run_coalescing_pair(
        indptr, indices, values, len(sites), step_cap, _stream(seed, k)
    )
    if not ok:
        raise CoalescenceTimeoutError(int(steps))
    return SpinConfiguration(sites, spins), int(steps)


def generate_sample(
    J: PairwisePotential,
    volume: Iterable[Site] | None = None,
    n: int = 1,
    seed: int = 0,
    step_cap: int = DEFAULT_STEP_CAP,
) -> Sample:
    """n independent coalescence draws; draw k uses RNG stream (seed, k)."""
    _check_seed(seed)
    if n < 1:
        raise ValueError("n must be >= 1")
    if step_cap < 1:
        raise ValueError("step_cap must be >= 1")
    sites = _resolve_volume(J, volume)
    indptr, indices, values = _csr(J, sites)
    spins = np.empty((n, len(sites)), np.int8)
    steps = np.empty(n, np.int64)
    for k in range(n):
        row, t, ok = _kernels.run_coalescing_pair(
            indptr, indices, values, len(sites), step_cap, _stream(seed, k)
        )
        if not ok:
            raise CoalescenceTimeoutError(int(t))
        spins[k] = row
        steps[k] = t
    return Sample(sites, spins, int(seed), int(step_cap), steps)


def coupled_truncation_chains(
    J: PairwisePotential,
    L: int,
    volume: Iterable[Site] | None = None,
    burn_in: int = 0,
    sweeps: int = 1,
    seed: int = 0,
) -> CouplingTrace:
    """Shared-randomness chains under J and its truncation at radius L.

    Runs one chain under J and one under the truncated potential with the
    same site choices and uniforms, and records the per-site discrepancy
    indicator once per sweep after burn-in.
    """
    _check_seed(seed)
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")
    if sweeps < 1:
        raise ValueError("sweeps must be >= 1")
    sites = _resolve_volume(J, volume)
    full = _csr(J, sites)
    trunc = _csr(truncate(J, L), sites)
    counts = _kernels.run_truncation_pair(
        *full, *trunc, len(sites), burn_in, sweeps, _stream(seed, 0)
    )
    return CouplingTrace(sites, counts, sweeps, burn_in)


def save_sample(sample: Sample, path) -> None:
    """Text matrix, one draw per row, columns in the deterministic site order."""
    d = len(sample.sites[0])
    lo = [min(s[k] for s in sample.sites) for k in range(d)]
    hi = [max(s[k] for s in sample.sites) for k in range(d)]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"dimension {d}\n")
        fh.write("bounds " + " ".join(map(str, lo + hi)) + "\n")
        fh.write(f"seed {sample.seed}\n")
        fh.write(f"step_cap {sample.step_cap}\n")
        fh.write(f"sites {len(sample.sites)}\n")
        for s in sample.sites:
            fh.write(" ".join(map(str, s)) + "\n")
        fh.write(f"draws {sample.n}\n")
        for k in range(sample.n):
            row = " ".join("+1" if v > 0 else "-1" for v in sample.spins[k])
            fh.write(f"{row} {sample.coalescence_steps[k]}\n")


def load_sample(path) -> Sample:
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().split("\n") if ln.strip()]
    pos = 0

    def expect(keyword: str) -> list[str]:
        nonlocal pos
        parts = lines[pos].split()
        if parts[0] != keyword:
            raise ValueError(f"expected '{keyword}' at line {pos + 1} of {path}")
        pos += 1
        return parts[1:]

    expect("dimension")
    expect("bounds")
    seed = int(expect("seed")[0])
    step_cap = int(expect("step_cap")[0])
    n_sites = int(expect("sites")[0])
    sites = []
    for _ in range(n_sites):
        sites.append(tuple(int(t) for t in lines[pos].split()))
        pos += 1
    n = int(expect("draws")[0])
    spins = np.empty((n, n_sites), np.int8)
    steps = np.empty(n, np.int64)
    for k in range(n):
        parts = lines[pos].split()
        pos += 1
        spins[k] = [int(t) for t in parts[:n_sites]]
        steps[k] = int(parts[n_sites])
    return Sample(tuple(sites), spins, seed, step_cap, steps)
