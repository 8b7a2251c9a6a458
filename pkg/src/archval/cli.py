"""Command-line interface.

Exit codes: 0 success, 1 invalid scenario or configuration, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from archval.architecture import deployment_cost, stage_of
from archval.environment import heterogeneity_score, state_table
from archval.errors import ArchvalError
from archval.mplus import decide, transition_kind, value_trajectory
from archval.renewal import cost_trajectory
from archval.reporting import fmt, sweep_csv, trajectory_csv, value_csv, write_atomic
from archval.scenario import Scenario, load_environment, load_scenario
from archval.sensitivity import Axis, sweep


class _UsageError(Exception):
    pass


def parse_values(text: str) -> list[float]:
    """``"5,10,20"`` or an inclusive range ``"5:100:5"``."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            n = int(round((stop - start) / step))
            return [start + i * step for i in range(n + 1) if start + i * step <= stop + 1e-9 * step]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise _UsageError(f"cannot parse value list {text!r}") from None


def _grid(lifetime: float, step: float) -> tuple[float, ...]:
    if step <= 0:
        raise _UsageError("--grid-years must be positive")
    n = int(lifetime // step + 1e-9)
    grid = [step * k for k in range(1, n + 1)]
    if not grid or grid[-1] < lifetime - 1e-9:
        grid.append(float(lifetime))
    return tuple(grid)


def _prepare(args: argparse.Namespace) -> Scenario:
    scenario = load_scenario(args.scenario)
    if getattr(args, "variant", None):
        scenario = scenario.variant(args.variant)
    changes = {}
    if getattr(args, "runs", None) is not None:
        changes["runs"] = args.runs
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "coupling", None) is not None:
        changes["coupling"] = args.coupling
    if getattr(args, "grid_years", None) is not None:
        changes["trajectory_grid"] = _grid(scenario.config.lifetime, args.grid_years)
    return scenario.with_config(**changes) if changes else scenario


def cmd_validate(args) -> int:
    scenario = load_scenario(args.scenario)
    cfg = scenario.config
    print(f"OK: {scenario.name} ({len(scenario.architectures)} architectures)")
    for arch in scenario.architectures.values():
        costs = [deployment_cost(f, scenario.catalog, cfg.launch_rate) for f in arch.fractions]
        parts = " + ".join(fmt(c) for c in costs)
        print(f"  {arch.name}: stage {stage_of(arch).name}, {len(costs)} fraction(s), deployment {parts} = {fmt(sum(costs))} k$")
    return 0


def cmd_simulate(args) -> int:
    scenario = _prepare(args)
    names = args.architecture or list(scenario.architectures)
    trajectories = {}
    for name in names:
        arch = scenario.architecture(name)
        trajectories[name] = cost_trajectory(arch, scenario.catalog, scenario.config, args.threads)
    path = write_atomic(Path(args.output) / "trajectory.csv", trajectory_csv(trajectories))
    for name, traj in trajectories.items():
        last = traj[-1]
        print(f"{name}: cost at year {fmt(last.time)} mean {fmt(last.distribution.mean)} k$, sd {fmt(last.distribution.sd)}")
    print(f"wrote {path}")
    return 0


def cmd_value(args) -> int:
    scenario = _prepare(args)
    source = scenario.architecture(args.source)
    target = scenario.architecture(args.target)
    points = value_trajectory(source, target, scenario.catalog, scenario.config, args.threads)
    final = points[-1].distribution
    decision = decide(final, args.risk_quantile, args.threshold)
    kind = transition_kind(stage_of(source), stage_of(target))
    out = Path(args.output)
    write_atomic(out / "value.csv", value_csv(points))
    report = (
        f"transition: {source.name} ({stage_of(source).name}) -> {target.name} ({stage_of(target).name})\n"
        f"operator: {kind.name.lower() if kind else 'none (stages not adjacent)'}\n"
        f"runs: {scenario.config.runs}\n"
        f"seed: {scenario.config.seed}\n"
        f"horizon: {fmt(points[-1].time)} years\n"
        f"mean value: {fmt(final.mean)} k$\n"
        + decision.report()
    )
    write_atomic(out / "decision.txt", report)
    sys.stdout.write(report)
    print(f"wrote {out / 'value.csv'} and {out / 'decision.txt'}")
    return 0


def cmd_sweep(args) -> int:
    scenario = _prepare(args)
    named = scenario.sweep(args.name) if args.name else (scenario.sweeps[0] if scenario.sweeps else None)
    if args.name:
        param, values = named.param, list(named.values)
        param2, values2 = named.param2, list(named.values2) if named.values2 else None
    else:
        if not args.param or args.values is None:
            raise _UsageError("sweep needs --param and --values (or --name)")
        param, values = args.param, parse_values(args.values)
        param2 = args.param2
        values2 = parse_values(args.values2) if args.values2 is not None else None
    if (param2 is None) != (values2 is None):
        raise _UsageError("--param2 and --values2 go together")
    if named is not None:
        source, target = named.source, named.target
    else:
        first_two = list(scenario.architectures)[:2]
        if len(first_two) < 2:
            raise _UsageError("scenario needs two architectures to sweep a transition")
        source, target = first_two
    source = args.source or source
    target = args.target or target
    runs = args.runs if args.runs is not None else (named.runs if args.name and named.runs else None)
    table = sweep(
        scenario,
        source,
        target,
        Axis(param, tuple(values)),
        Axis(param2, tuple(values2)) if param2 else None,
        runs=runs,
        threads=args.threads,
    )
    text = sweep_csv(table, args.statistic)
    path = write_atomic(Path(args.output) / "sweep.csv", text)
    for line in text.splitlines():
        if line.startswith("#"):
            print(line[2:])
    print(f"wrote {path}")
    return 0


def cmd_env_states(args) -> int:
    model = load_environment(args.scenario)
    names = [p.name for p in model.parameters]
    print("state\t" + "\t".join(names) + "\trequired\tfirst_period")
    for label, state, required, period in state_table(model):
        levels = "\t".join(state.level(n) for n in names)
        print(f"{label}\t{levels}\t{'yes' if required else 'no'}\t{'' if period is None else period}")
    n_req = sum(1 for row in state_table(model) if row[2])
    print(f"required states: {n_req}")
    print(f"heterogeneity score: {heterogeneity_score(model):.6g} (discount {model.discount:g})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="archval", description="Value of modularity-stage transitions.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, sim=True):
        p.add_argument("-s", "--scenario", required=True, help="scenario JSON file or bundled name (f6_demo)")
        if sim:
            p.add_argument("--runs", type=int)
            p.add_argument("--seed", type=int)
            p.add_argument("--variant", help="apply a named override set from the scenario")
            p.add_argument("--coupling", choices=["common", "independent"])
            p.add_argument("--threads", type=int, help="worker threads (results do not depend on it)")
            p.add_argument("-o", "--output", required=True, help="output directory")

    p = sub.add_parser("validate", help="check a scenario file")
    common(p, sim=False)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("simulate", help="cost trajectories of architectures")
    common(p)
    p.add_argument("-a", "--architecture", action="append", help="architecture name (repeatable; default all)")
    p.add_argument("--grid-years", type=float, help="trajectory grid spacing in years")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("value", help="value distribution of a transition and a decision")
    common(p)
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--to", dest="target", required=True)
    p.add_argument("--risk-quantile", type=float, default=0.5)
    p.add_argument("--threshold", type=float, default=0.0, help="k$")
    p.add_argument("--grid-years", type=float)
    p.set_defaults(func=cmd_value)

    p = sub.add_parser("sweep", help="transition value over a parameter grid")
    common(p)
    p.add_argument("--name", help="use a sweep defined in the scenario")
    p.add_argument("--param")
    p.add_argument("--values", help="comma list or start:stop:step")
    p.add_argument("--param2")
    p.add_argument("--values2")
    p.add_argument("--from", dest="source")
    p.add_argument("--to", dest="target")
    p.add_argument("--statistic", default="mean", help="summary field for the zero crossing (mean, q05, ...)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("env-states", help="environment state table and heterogeneity score")
    common(p, sim=False)
    p.set_defaults(func=cmd_env_states)
    return ap


def run_cli(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "risk_quantile", None) is not None and not 0 < args.risk_quantile < 1:
        parser.print_usage(sys.stderr)
        print("archval: error: --risk-quantile must lie in (0, 1)", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"archval: error: {exc}", file=sys.stderr)
        return 2
    except ArchvalError as exc:
        print(f"archval: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    raise SystemExit(run_cli())


if __name__ == "__main__":
    main()
