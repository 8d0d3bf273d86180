"""Structure-recovery experiment harness.

Builds a random interaction graph, draws fresh samples per replication,
runs the neighborhood estimator over a grid of sample sizes and threshold
constants, and aggregates false-positive / false-negative rates with
Wilson intervals plus the matching misidentification bounds.  Trials are
independent work units; each owns the RNG stream derived from
(master seed, n index, C index, replication index), so results do not
depend on the worker-pool width.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bounds as bounds_mod
from .errors import CapacityError
from .estimator import ThresholdSchedule, estimate_neighborhood, threshold
from .oracle import exact_distribution, exact_v, exact_V
from .potential import (
    Box,
    PairwisePotential,
    Site,
    ball_sites,
    dobrushin_coefficient,
    interaction_neighborhood,
    random_interaction_graph,
    tail_sum,
    truncate,
)
from .sampler import generate_sample, DEFAULT_STEP_CAP

WORKER_ENV_VAR = "ISINGPAIRS_WORKERS"

CSV_HEADER = "n,C,fp_rate,fp_lo,fp_hi,fn_rate,fn_lo,fn_hi,bound_finite,bound_infinite"


@dataclass(frozen=True)
class ExperimentConfig:
    dimension: int = 2
    graph_radius: int = 3
    center: Site = (0, 0)
    observe_radius: int = 1
    edge_prob: float = 0.1
    degree_cap: int = 4
    coupling: float = 0.2
    n_start: int = 500
    n_step: int = 250
    n_count: int = 39
    n_values: tuple[int, ...] | None = None  # explicit grid, overrides start/step/count
    schedule: str = "simple"
    c_values: tuple[float, ...] = (0.06, 0.07, 0.08, 0.09)
    replications: int = 2000
    seed: int = 0
    workers: int = 1
    truth_mode: str = "graph"  # or "population"
    resample_graph: bool = False
    step_cap: int = DEFAULT_STEP_CAP
    oracle_cap: int = 20

    def __post_init__(self):
        if self.n_values is not None:
            grid = tuple(self.n_values)
            if not grid or any(n < 1 for n in grid) or list(grid) != sorted(set(grid)):
                raise ValueError("n_values must be positive and strictly increasing")
            object.__setattr__(self, "n_values", grid)
        elif self.n_start < 1 or self.n_step < 1 or self.n_count < 1:
            raise ValueError("sample-size grid must be positive and increasing")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.truth_mode not in ("graph", "population"):
            raise ValueError(f"unknown truth mode: {self.truth_mode!r}")
        if len(self.center) != self.dimension:
            raise ValueError("center does not match dimension")
        if not self.c_values:
            raise ValueError("at least one C value is required")

    @property
    def n_grid(self) -> tuple[int, ...]:
        if self.n_values is not None:
            return self.n_values
        return tuple(self.n_start + self.n_step * k for k in range(self.n_count))


_CONFIG_PARSERS = {
    "dimension": int,
    "graph_radius": int,
    "center": lambda s: tuple(int(t) for t in s.replace(",", " ").split()),
    "observe_radius": int,
    "edge_prob": float,
    "degree_cap": int,
    "coupling": float,
    "n_start": int,
    "n_step": int,
    "n_count": int,
    "n_values": lambda s: tuple(int(t) for t in s.replace(",", " ").split()),
    "schedule": str,
    "c_values": lambda s: tuple(float(t) for t in s.replace(",", " ").split()),
    "replications": int,
    "seed": int,
    "workers": int,
    "truth_mode": str,
    "resample_graph": lambda s: s.lower() in ("1", "true", "yes"),
    "step_cap": int,
    "oracle_cap": int,
}


def load_config(path) -> ExperimentConfig:
    """Read a key = value config file ('#' starts a comment)."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in _CONFIG_PARSERS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _CONFIG_PARSERS[key](val)
    return ExperimentConfig(**values)


@dataclass(frozen=True)
class CellResult:
    n: int
    C: float
    fp_rate: float
    fp_lo: float
    fp_hi: float
    fn_rate: float
    fn_lo: float
    fn_hi: float
    replications: int
    mean_coalescence_steps: float
    bound_finite: float
    bound_infinite: float


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    graph: PairwisePotential
    cells: tuple[CellResult, ...]


def classify_trial(estimate, truth: set[Site]) -> tuple[bool, bool]:
    """False positive: selected a non-member; false negative: missed a member."""
    selected = set(estimate.selected)
    fp = bool(selected - truth)
    fn = bool(truth - selected)
    return fp, fn


def truth_set(
    J: PairwisePotential,
    i: Site,
    L: int,
    mode: str = "graph",
    epsilon: float | None = None,
    cap: int = 20,
) -> set[Site]:
    """Ground truth inside the observation ball.

    "graph" mode returns the interacting sites restricted to the ball;
    "population" mode returns the exact population neighborhood of the
    truncated model at threshold 2*epsilon (small volumes only).
    """
    ball = set(ball_sites(i, L))
    if mode == "graph":
        return interaction_neighborhood(J, i) & ball
    if mode == "population":
        if epsilon is None:
            raise ValueError("population mode requires epsilon")
        model = exact_distribution(truncate(J, L), J.volume, cap=cap)
        return exact_V(model, i, L, epsilon)
    raise ValueError(f"unknown truth mode: {mode!r}")


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054):
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = successes / trials
    denom = 1.0 + z**2 / trials
    center = (p + z**2 / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / trials + z**2 / (4 * trials**2))
    return max(0.0, center - half), min(1.0, center + half)


def _trial_seed(master: int, n_idx: int, c_idx: int, rep: int) -> int:
    ss = np.random.SeedSequence((master, n_idx, c_idx, rep))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _graph_seed(master: int) -> int:
    return int(np.random.SeedSequence((master, 0)).generate_state(1, dtype=np.uint64)[0])


def _run_trial(payload):
    (J, center, L, n, eps, truth, seed, step_cap) = payload
    sample = generate_sample(J, None, n, seed, step_cap)
    estimate = estimate_neighborhood(sample, center, L, eps)
    fp, fn = classify_trial(estimate, truth)
    return fp, fn, float(sample.coalescence_steps.mean())


def _cell_v(config: ExperimentConfig, J: PairwisePotential, r: float) -> float:
    """Variance proxy for the bound reports: exact under the oracle cap,
    otherwise the conservative analytic upper bound."""
    L = config.observe_radius
    if len(J.volume) <= config.oracle_cap:
        model = exact_distribution(truncate(J, L), J.volume, cap=config.oracle_cap)
        return exact_v(model, config.center, L)[0]
    if r < 1:
        return bounds_mod.v_analytic_bounds(r, L, config.dimension)[1]
    return float("nan")


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run every (n, C) cell of the configured grid."""
    box = Box(config.center, config.graph_radius, config.dimension)
    graph = random_interaction_graph(
        box, config.edge_prob, config.degree_cap, config.coupling, _graph_seed(config.seed)
    )
    L = config.observe_radius
    r = dobrushin_coefficient(graph).value
    tail = tail_sum(graph, L) if graph.couplings else 0.0
    v = _cell_v(config, graph, r)

    # one payload per trial, in deterministic order
    payloads = []
    coords = []
    for n_idx, n in enumerate(config.n_grid):
        for c_idx, C in enumerate(config.c_values):
            sched = ThresholdSchedule(config.schedule, C, config.dimension)
            eps = threshold(sched, L, n)
            for rep in range(config.replications):
                if config.resample_graph:
                    gseed = _trial_seed(config.seed, n_idx, c_idx, rep) ^ 1
                    J = random_interaction_graph(
                        box, config.edge_prob, config.degree_cap, config.coupling, gseed
                    )
                else:
                    J = graph
                truth = truth_set(
                    J, config.center, L, config.truth_mode, eps, config.oracle_cap
                )
                seed = _trial_seed(config.seed, n_idx, c_idx, rep)
                payloads.append((J, config.center, L, n, eps, truth, seed, config.step_cap))
                coords.append((n, C, rep))

    workers = config.workers
    env_cap = os.environ.get(WORKER_ENV_VAR)
    if env_cap:
        workers = min(workers, max(1, int(env_cap)))
    outcomes = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            iterator = pool.map(_run_trial, payloads, chunksize=8)
            while True:
                try:
                    outcomes.append(next(iterator))
                except StopIteration:
                    break
                except Exception as exc:
                    n, C, rep = coords[len(outcomes)]
                    raise RuntimeError(
                        f"trial failed at (n={n}, C={C}, rep={rep}): {exc}"
                    ) from exc
    else:
        for coord, payload in zip(coords, payloads):
            try:
                outcomes.append(_run_trial(payload))
            except Exception as exc:
                raise RuntimeError(f"trial failed at (n={coord[0]}, C={coord[1]}, "
                                   f"rep={coord[2]}): {exc}") from exc

    cells = []
    pos = 0
    for n_idx, n in enumerate(config.n_grid):
        for c_idx, C in enumerate(config.c_values):
            chunk = outcomes[pos : pos + config.replications]
            pos += config.replications
            fp_count = sum(1 for fp, _, _ in chunk if fp)
            fn_count = sum(1 for _, fn, _ in chunk if fn)
            mean_steps = sum(s for _, _, s in chunk) / len(chunk)
            sched = ThresholdSchedule(config.schedule, C, config.dimension)
            eps = threshold(sched, L, n)
            if v > 0 and math.isfinite(v):
                bound_f = bounds_mod.misid_bound_finite(
                    n, eps, v, L, config.dimension
                ).value
                bound_i = (
                    bounds_mod.misid_bound_infinite(
                        n, eps, v, L, config.dimension, r, tail
                    ).value
                    if r < 1
                    else float("nan")
                )
            else:
                bound_f = bound_i = float("nan")
            fp_lo, fp_hi = wilson_interval(fp_count, config.replications)
            fn_lo, fn_hi = wilson_interval(fn_count, config.replications)
            cells.append(
                CellResult(
                    n=n,
                    C=C,
                    fp_rate=fp_count / config.replications,
                    fp_lo=fp_lo,
                    fp_hi=fp_hi,
                    fn_rate=fn_count / config.replications,
                    fn_lo=fn_lo,
                    fn_hi=fn_hi,
                    replications=config.replications,
                    mean_coalescence_steps=mean_steps,
                    bound_finite=bound_f,
                    bound_infinite=bound_i,
                )
            )
    return ExperimentResult(config, graph, tuple(cells))


def result_csv(result: ExperimentResult) -> str:
    """Serialize cell results; UTF-8, LF, 6-decimal fixed rates."""
    lines = ["# intervals: wilson-95", CSV_HEADER]
    for cell in result.cells:
        lines.append(
            f"{cell.n},{cell.C:.6f},"
            f"{cell.fp_rate:.6f},{cell.fp_lo:.6f},{cell.fp_hi:.6f},"
            f"{cell.fn_rate:.6f},{cell.fn_lo:.6f},{cell.fn_hi:.6f},"
            f"{cell.bound_finite:.6g},{cell.bound_infinite:.6g}"
        )
    return "\n".join(lines) + "\n"


def write_csv(result: ExperimentResult, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(result_csv(result))


def mann_kendall(values) -> tuple[int, float, float]:
    """Mann-Kendall trend statistic.

    Returns (S, p_increasing, p_decreasing): one-sided normal-approximation
    p-values against the null of no trend, with tie correction and
    continuity correction.
    """
    x = list(values)
    n = len(x)
    if n < 3:
        raise ValueError("need at least 3 points for a trend test")
    s = 0
    for a in range(n):
        for b in range(a + 1, n):
            s += (x[b] > x[a]) - (x[b] < x[a])
    counts: dict[float, int] = {}
    for val in x:
        counts[val] = counts.get(val, 0) + 1
    var = n * (n - 1) * (2 * n + 5) / 18.0
    var -= sum(t * (t - 1) * (2 * t + 5) for t in counts.values() if t > 1) / 18.0
    if var <= 0:
        return s, 0.5, 0.5
    sd = math.sqrt(var)
    z_up = (s - 1) / sd if s > 0 else s / sd
    z_down = (s + 1) / sd if s < 0 else s / sd
    p_increasing = 0.5 * math.erfc(z_up / math.sqrt(2.0))
    p_decreasing = 1.0 - 0.5 * math.erfc(z_down / math.sqrt(2.0))
    return s, p_increasing, p_decreasing
