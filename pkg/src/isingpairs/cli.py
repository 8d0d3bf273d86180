"""Command line entry point.

Subcommands: graph, sample, estimate, bounds, coupling, experiment.
Exit codes: 0 success, 1 runtime failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys

from . import bounds as bounds_mod
from . import experiment as experiment_mod
from .errors import CapacityError, CoalescenceTimeoutError, DobrushinViolationError
from .estimator import ThresholdSchedule, estimate_neighborhood, estimate_report, threshold
from .potential import Box, load_potential, random_interaction_graph, save_potential
from .sampler import (
    DEFAULT_STEP_CAP,
    coupled_truncation_chains,
    generate_sample,
    load_sample,
    save_sample,
)


class ConfigError(Exception):
    pass


def _parse_site(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"bad site coordinates: {text!r}") from exc


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _cmd_graph(args) -> int:
    box = Box(tuple([0] * args.dimension), args.radius, args.dimension)
    J = random_interaction_graph(box, args.edge_prob, args.degree_cap, args.coupling, args.seed)
    if args.out is None:
        raise ConfigError("graph requires --out (potential file destination)")
    save_potential(J, args.out)
    return 0


def _cmd_sample(args) -> int:
    J = load_potential(args.potential)
    sample = generate_sample(J, None, args.n, args.seed, args.step_cap)
    if args.out is None:
        raise ConfigError("sample requires --out (sample file destination)")
    save_sample(sample, args.out)
    return 0


def _cmd_estimate(args) -> int:
    sample = load_sample(args.sample)
    center = _parse_site(args.center)
    if args.epsilon is not None:
        eps = args.epsilon
    else:
        sched = ThresholdSchedule(args.schedule, args.C, len(center))
        eps = threshold(sched, args.radius, sample.n)
    estimate = estimate_neighborhood(sample, center, args.radius, eps)
    _emit(estimate_report(estimate), args.out)
    return 0


def _cmd_bounds(args) -> int:
    kind = args.theorem
    if kind == "bernstein":
        value = bounds_mod.bernstein(args.n, args.eps, args.v, args.b)
    elif kind in ("3", "finite"):
        value = bounds_mod.misid_bound_finite(args.n, args.eps, args.v, args.L, args.d).value
    elif kind in ("2", "infinite"):
        value = bounds_mod.misid_bound_infinite(
            args.n, args.eps, args.v, args.L, args.d, args.r, args.tail
        ).value
    elif kind in ("5", "coupling"):
        if args.potential is None:
            raise ConfigError("coupling bound requires --potential")
        value = bounds_mod.coupling_bound(load_potential(args.potential), args.L)
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"unknown bound identifier: {kind}")
    _emit(f"{value!r}\n", args.out)
    return 0


def _cmd_coupling(args) -> int:
    J = load_potential(args.potential)
    trace = coupled_truncation_chains(J, args.L, None, args.burn_in, args.sweeps, args.seed)
    lines = [f"burn_in {trace.burn_in_sweeps}", f"sweeps {trace.recorded_sweeps}"]
    for site, rate in zip(trace.sites, trace.rates):
        lines.append(f"rate {' '.join(map(str, site))} {float(rate)!r}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_experiment(args) -> int:
    config = experiment_mod.load_config(args.config)
    if args.seed is not None:
        config = experiment_mod.ExperimentConfig(
            **{**config.__dict__, "seed": args.seed}
        )
    result = experiment_mod.run_experiment(config)
    _emit(experiment_mod.result_csv(result), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isingpairs",
        description="Simulate lattice Ising models and recover interacting site pairs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("graph", help="emit a random interaction graph")
    p.add_argument("--dimension", type=int, default=2)
    p.add_argument("--radius", type=int, default=3)
    p.add_argument("--edge-prob", type=float, default=0.1)
    p.add_argument("--degree-cap", type=int, default=4)
    p.add_argument("--coupling", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_graph)

    p = sub.add_parser("sample", help="draw i.i.d. configurations from a potential")
    p.add_argument("--potential", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--step-cap", type=int, default=DEFAULT_STEP_CAP)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("estimate", help="run the neighborhood estimator on a sample file")
    p.add_argument("--sample", required=True)
    p.add_argument("--center", required=True, help="site coordinates, e.g. '0 0'")
    p.add_argument("--radius", type=int, default=1)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--schedule", choices=("simple", "theoretical"), default="simple")
    p.add_argument("--C", type=float, default=0.075)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("bounds", help="evaluate a closed-form bound")
    p.add_argument(
        "--theorem",
        required=True,
        choices=("bernstein", "2", "3", "5", "finite", "infinite", "coupling"),
        help="bound family identifier",
    )
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--v", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--L", type=int, default=1)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--r", type=float, default=0.0)
    p.add_argument("--tail", type=float, default=0.0)
    p.add_argument("--potential")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("coupling", help="discrepancy rates of the full-vs-truncated chains")
    p.add_argument("--potential", required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--sweeps", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_coupling)

    p = sub.add_parser("experiment", help="run the full recovery experiment grid")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (CoalescenceTimeoutError, CapacityError, DobrushinViolationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
