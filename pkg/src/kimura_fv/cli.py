"""Command-line front end.

Subcommands:

    run          one simulation, emitting CSV and SVG artifacts
    suite        the full validation suite with a machine-readable report
    equilibrium  closed-form stationary quantities for given eps, delta
    wf           Wright-Fisher oracle queries (row, absorption, sample)
    converge     time-stepping order study

Exit codes: 0 success, 1 invalid configuration, 2 solver divergence or
linear-solve failure, 3 validation-check failure, 4 I/O error.  The
KIMURA_FV_OUTDIR environment variable overrides the default output
directory; an explicit --outdir flag beats the environment.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, fields, replace

import numpy as np

from . import experiments
from .equilibrium import boundary_equilibrium_mass, equilibrium_profile
from .grid import Gaussian, InitialCondition, Step, Uniform, WithBoundaryMass, build_grid
from .integrator import (
    DivergenceError,
    LinearSolveError,
    SolverConfig,
    simulate,
    temporal_convergence,
)
from .io import (
    _atomic_write_text,
    write_snapshot_csv,
    write_snapshot_svg,
    write_timeseries_csv,
    write_timeseries_svg,
)
from .wright_fisher import WFModel, absorption_probabilities, sample_path, transition_row

__all__ = ["RunConfig", "ConfigError", "parse_config", "main"]

OUTDIR_ENV = "KIMURA_FV_OUTDIR"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DIVERGED = 2
EXIT_CHECK_FAILED = 3
EXIT_IO = 4


class ConfigError(ValueError):
    """Invalid or unparseable run configuration."""


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved parameters of one `run` invocation.

    Defaults are the reference profile: delta = eps = 1e-3 on 10^4 cells
    with tau = 1e-4 up to t = 10, uniform initial condition.
    """

    delta: float = 1e-3
    epsilon: float = 1e-3
    n_cells: int = 10_000
    tau: float = 1e-4
    t_final: float = 10.0
    output_every: int = 100
    ic: str = "uniform"
    x0: float = 0.4
    sigma: float = 0.1
    left: float | None = None
    right: float | None = None
    split: float = 0.5
    bulk: float | None = None
    a0: float = 0.0
    b0: float = 0.0
    snapshot_times: tuple[float, ...] = ()
    seed: int | None = None
    output_dir: str | None = None
    timestamp: bool = True

    def resolved_output_dir(self) -> str:
        if self.output_dir is not None:
            return self.output_dir
        return os.environ.get(OUTDIR_ENV, "out")

    def initial_condition(self) -> InitialCondition:
        scale = 1.0 / (1.0 - 2.0 * self.delta)
        if self.ic == "uniform":
            return Uniform()
        if self.ic == "step":
            left = 0.5 * scale if self.left is None else self.left
            right = 1.5 * scale if self.right is None else self.right
            return Step(left_value=left, right_value=right, split_point=self.split)
        if self.ic == "gaussian":
            return Gaussian(x0=self.x0, sigma=self.sigma)
        if self.ic == "boundary-mass":
            bulk = 0.02 * scale if self.bulk is None else self.bulk
            return WithBoundaryMass(bulk_value=bulk, a0=self.a0, b0=self.b0)
        raise ConfigError(f"unknown initial condition {self.ic!r}")


_IC_NAMES = ("uniform", "step", "gaussian", "boundary-mass")


def _parse_snapshot_times(text: str) -> tuple[float, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad snapshot_times value {text!r}: {exc}") from exc


_CONFIG_PARSERS = {
    "delta": float,
    "epsilon": float,
    "n_cells": int,
    "tau": float,
    "t_final": float,
    "output_every": int,
    "ic": str,
    "x0": float,
    "sigma": float,
    "left": float,
    "right": float,
    "split": float,
    "bulk": float,
    "a0": float,
    "b0": float,
    "snapshot_times": _parse_snapshot_times,
    "seed": int,
    "output_dir": str,
}


def _read_config_file(path: str) -> dict:
    """Parse a flat key=value config file; '#' starts a comment."""
    try:
        with open(path, "r") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_PARSERS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            values[key] = _CONFIG_PARSERS[key](value)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return values


def _validate(config: RunConfig) -> RunConfig:
    if not 0.0 < config.delta < 0.5:
        raise ConfigError(f"delta must lie in (0, 1/2), got {config.delta}")
    if config.epsilon < 0.0:
        raise ConfigError(f"epsilon must be nonnegative, got {config.epsilon}")
    if config.n_cells < 2:
        raise ConfigError(f"n_cells must be >= 2, got {config.n_cells}")
    if not config.tau > 0.0:
        raise ConfigError(f"tau must be positive, got {config.tau}")
    if config.t_final < config.tau:
        raise ConfigError(f"t_final = {config.t_final} is smaller than tau = {config.tau}")
    if config.output_every < 1:
        raise ConfigError(f"output_every must be >= 1, got {config.output_every}")
    if config.ic not in _IC_NAMES:
        raise ConfigError(f"ic must be one of {', '.join(_IC_NAMES)}, got {config.ic!r}")
    if config.ic == "gaussian" and not config.sigma > 0.0:
        raise ConfigError(f"sigma must be positive, got {config.sigma}")
    for t in config.snapshot_times:
        if not 0.0 <= t <= config.t_final:
            raise ConfigError(f"snapshot time {t} outside [0, t_final = {config.t_final}]")
    return config


def parse_config(path: str | None = None, overrides: dict | None = None) -> RunConfig:
    """Resolve a run configuration from a file and/or explicit overrides.

    Override values (from command-line flags) win over file values, which
    win over the built-in defaults.  Unknown keys are rejected.
    """
    values: dict = {}
    if path is not None:
        values.update(_read_config_file(path))
    for key, value in (overrides or {}).items():
        if key not in _CONFIG_PARSERS and key != "timestamp":
            raise ConfigError(f"unknown config key {key!r}")
        if value is not None:
            values[key] = value
    known = {f.name for f in fields(RunConfig)}
    assert set(values) <= known
    try:
        config = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return _validate(config)


def _print_summary(trajectory, out) -> None:
    mass = trajectory.series("mass")
    moment = trajectory.series("first_moment")
    final = trajectory.records[-1]
    print(f"final a = {final.a!r}", file=out)
    print(f"final b = {final.b!r}", file=out)
    print(f"max |mass - 1| = {np.abs(mass - 1.0).max():.3e}", file=out)
    print(f"max |moment1 - moment1(0)| = {np.abs(moment - moment[0]).max():.3e}", file=out)
    energy = trajectory.series("energy")
    if np.isnan(energy).all():
        print("energy: n/a (epsilon = 0)", file=out)
    else:
        monotone = bool(np.all(np.diff(energy) <= 1e-10))
        print(f"energy non-increasing (1e-10 slack): {monotone}", file=out)
    print(f"min entry over run = {trajectory.series('min_entry').min():.3e}", file=out)


def cmd_run(args: argparse.Namespace) -> int:
    overrides = {
        key: getattr(args, key)
        for key in _CONFIG_PARSERS
        if hasattr(args, key) and getattr(args, key) is not None
    }
    if args.snapshot_times is not None:
        overrides["snapshot_times"] = _parse_snapshot_times(args.snapshot_times)
    config = parse_config(args.config, overrides)
    if args.no_timestamp:
        config = replace(config, timestamp=False)

    grid = build_grid(config.delta, config.n_cells)
    solver = SolverConfig(tau=config.tau, t_final=config.t_final, output_every=config.output_every)
    trajectory = simulate(grid, config.epsilon, config.initial_condition(), solver,
                          config.snapshot_times)

    outdir = config.resolved_output_dir()
    os.makedirs(outdir, exist_ok=True)
    write_timeseries_csv(os.path.join(outdir, "timeseries.csv"), trajectory, config.timestamp)
    for t, state in trajectory.snapshots:
        write_snapshot_csv(
            os.path.join(outdir, f"snapshot_{t:g}.csv"), grid, state, config.timestamp
        )
    write_timeseries_svg(os.path.join(outdir, "timeseries.svg"), trajectory)
    write_snapshot_svg(os.path.join(outdir, "snapshot.svg"), grid, trajectory.final_state)
    _print_summary(trajectory, sys.stdout)
    return EXIT_OK


def cmd_suite(args: argparse.Namespace) -> int:
    n_cells, tau = experiments.FULL_PROFILE if args.full else experiments.DESK_PROFILE
    if args.n_cells is not None:
        n_cells = args.n_cells
    if args.tau is not None:
        tau = args.tau
    if n_cells < 2 or tau <= 0.0:
        raise ConfigError(f"bad suite profile: n_cells = {n_cells}, tau = {tau}")

    log = None if args.quiet else (lambda msg: print(msg, file=sys.stderr))
    report = experiments.run_suite(n_cells, tau, log=log)

    outdir = args.outdir or os.environ.get(OUTDIR_ENV, "out")
    os.makedirs(outdir, exist_ok=True)
    report_path = os.path.join(outdir, "report.json")
    _atomic_write_text(report_path, json.dumps(report.to_dict(), indent=2) + "\n")
    for line in report.summary_lines():
        print(line)
    print(f"report written to {report_path}")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_equilibrium(args: argparse.Namespace) -> int:
    if (args.a_inf is None) != (args.b_inf is None):
        raise ConfigError("provide both --a-inf and --b-inf, or neither")
    total = boundary_equilibrium_mass(args.epsilon, args.delta)
    print(f"a_inf + b_inf = {total!r}")
    if args.a_inf is None:
        a_inf = b_inf = 0.5 * total
        print(f"symmetric split: a_inf = b_inf = {a_inf!r}")
    else:
        a_inf, b_inf = args.a_inf, args.b_inf
    profile = equilibrium_profile(a_inf, b_inf, args.epsilon, args.delta)
    print(f"A = {profile.A!r}")
    print(f"B = {profile.B!r}")
    for x in (args.delta, 0.5, 1.0 - args.delta):
        rho = (profile.A * x + profile.B) / (x * (1.0 - x))
        print(f"rho({x:g}) = {rho!r}")
    return EXIT_OK


def cmd_wf(args: argparse.Namespace) -> int:
    model = WFModel(two_n=args.two_n, u=args.u, v=args.v)
    if args.row is not None:
        for j, p in enumerate(transition_row(model, args.row)):
            print(f"{j},{float(p)!r}")
        return EXIT_OK
    if args.absorption:
        for i, p in enumerate(absorption_probabilities(model)):
            print(f"{i},{float(p)!r}")
        return EXIT_OK
    if args.sample is not None:
        i0, k, seed = args.sample
        for step, state in enumerate(sample_path(model, i0, k, seed)):
            print(f"{step},{state}")
        return EXIT_OK
    raise ConfigError("wf needs one of --row, --absorption, --sample")


def cmd_converge(args: argparse.Namespace) -> int:
    taus = tuple(float(t) for t in args.taus.split(","))
    grid = build_grid(args.delta, args.n_cells)
    estimate = temporal_convergence(
        grid,
        args.epsilon,
        Gaussian(x0=0.4, sigma=0.1),
        taus=taus,
        t_probe=args.t_probe,
        tau_ref=args.tau_ref,
    )
    print("tau,error")
    for tau, err in zip(estimate.levels, estimate.errors):
        print(f"{float(tau)!r},{float(err)!r}")
    print(f"pairwise orders: {np.round(estimate.pairwise_orders, 4).tolist()}")
    print(f"observed order: {estimate.order:.4f}")
    if args.check and not 1.7 <= estimate.order <= 2.2:
        print("order outside [1.7, 2.2]", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kimura-fv",
        description="Finite-volume solver for drift diffusion with dynamical boundary masses.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one simulation and write CSV/SVG artifacts")
    run.add_argument("--config", help="flat key=value config file")
    run.add_argument("--delta", type=float)
    run.add_argument("--epsilon", type=float)
    run.add_argument("--n-cells", dest="n_cells", type=int)
    run.add_argument("--tau", type=float)
    run.add_argument("--t-final", dest="t_final", type=float)
    run.add_argument("--output-every", dest="output_every", type=int)
    run.add_argument("--ic", choices=_IC_NAMES)
    run.add_argument("--x0", type=float, help="gaussian center")
    run.add_argument("--sigma", type=float, help="gaussian width")
    run.add_argument("--left", type=float, help="step value left of the split")
    run.add_argument("--right", type=float, help="step value right of the split")
    run.add_argument("--split", type=float, help="step split point")
    run.add_argument("--bulk", type=float, help="bulk level for ic=boundary-mass")
    run.add_argument("--a0", type=float, help="initial left boundary mass")
    run.add_argument("--b0", type=float, help="initial right boundary mass")
    run.add_argument("--snapshot-times", dest="snapshot_times",
                     help="comma-separated times for profile snapshots")
    run.add_argument("--outdir", dest="output_dir")
    run.add_argument("--no-timestamp", action="store_true",
                     help="omit the generated-at header for byte-reproducible output")
    run.set_defaults(func=cmd_run)

    suite = sub.add_parser("suite", help="run the validation suite and write report.json")
    suite.add_argument("--full", action="store_true",
                       help=f"full profile (N = {experiments.FULL_PROFILE[0]}, "
                            f"tau = {experiments.FULL_PROFILE[1]:g}) instead of the desk profile")
    suite.add_argument("--n-cells", dest="n_cells", type=int, help="override profile resolution")
    suite.add_argument("--tau", type=float, help="override profile time step")
    suite.add_argument("--outdir")
    suite.add_argument("--quiet", action="store_true", help="suppress progress messages")
    suite.set_defaults(func=cmd_suite)

    eq = sub.add_parser("equilibrium", help="print closed-form stationary quantities")
    eq.add_argument("--epsilon", type=float, required=True)
    eq.add_argument("--delta", type=float, required=True)
    eq.add_argument("--a-inf", dest="a_inf", type=float)
    eq.add_argument("--b-inf", dest="b_inf", type=float)
    eq.set_defaults(func=cmd_equilibrium)

    wf = sub.add_parser("wf", help="Wright-Fisher oracle queries")
    wf.add_argument("--two-n", dest="two_n", type=int, required=True)
    wf.add_argument("--u", type=float, default=0.0)
    wf.add_argument("--v", type=float, default=0.0)
    wf.add_argument("--row", type=int, help="print transition row of state i")
    wf.add_argument("--absorption", action="store_true",
                    help="print fixation probabilities (pure drift)")
    wf.add_argument("--sample", nargs=3, type=int, metavar=("I0", "K", "SEED"),
                    help="print one sampled path")
    wf.set_defaults(func=cmd_wf)

    conv = sub.add_parser("converge", help="time-stepping order study")
    conv.add_argument("--n-cells", dest="n_cells", type=int, default=200)
    conv.add_argument("--delta", type=float, default=1e-3)
    conv.add_argument("--epsilon", type=float, default=1e-3)
    conv.add_argument("--taus", default="4e-3,2e-3,1e-3")
    conv.add_argument("--tau-ref", dest="tau_ref", type=float)
    conv.add_argument("--t-probe", dest="t_probe", type=float, default=1.0)
    conv.add_argument("--check", action="store_true",
                      help="exit 3 unless the observed order lies in [1.7, 2.2]")
    conv.set_defaults(func=cmd_converge)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DivergenceError, LinearSolveError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
