"""Monte Carlo renewal simulation of architecture running costs.

Each fraction is an independent renewal process: it is deployed at time 0 and
redeployed every time its replacement clock (minimum of its constituents'
failure and obsolescence times) runs out, for as long as the cumulative time
stays below the project lifetime. The running cost of one run is

    C = sum_j C_Fj * sum_i exp(-r * t_ij)

with ``t_ij`` the i-th deployment time of fraction j.

Randomness is addressed, not consumed: the uniform driving clock ``c`` at
renewal ``i`` of run ``k`` lives at row ``k``, column ``i % BLOCK`` of the
stream ``(seed, "clock", name, mode, occurrence, i // BLOCK)``. Clocks are
keyed by the component they belong to rather than by architecture, which
makes two architectures built from the same catalog share random numbers.
"""

from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from archval.architecture import ArchitectureSpec, Catalog, deployment_cost, validate
from archval.errors import ConfigError, ParameterError
from archval.replacement import fraction_clocks
from archval.stats import CostDistribution
from archval.stochastic import LifetimeDistribution
from archval.streams import RngStream

BLOCK = 64
CHUNK = 2048
MAX_RENEWALS = 5_000_000
THREADS_ENV = "ARCHVAL_THREADS"

COMMON = "common"
INDEPENDENT = "independent"


@dataclass(frozen=True)
class SimulationConfig:
    lifetime: float = 20.0
    discount_rate: float = 0.02
    launch_rate: float = 30.0
    runs: int = 10_000
    seed: int = 42
    trajectory_grid: tuple[float, ...] | None = None
    coupling: str = COMMON

    def __post_init__(self):
        if not self.lifetime > 0:
            raise ConfigError(f"lifetime must be > 0, got {self.lifetime}")
        if self.discount_rate < 0:
            raise ConfigError(f"discount_rate must be >= 0, got {self.discount_rate}")
        if self.launch_rate < 0:
            raise ConfigError(f"launch_rate must be >= 0, got {self.launch_rate}")
        if int(self.runs) != self.runs or self.runs < 1:
            raise ConfigError(f"runs must be a positive integer, got {self.runs}")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.coupling not in (COMMON, INDEPENDENT):
            raise ConfigError(f"coupling must be {COMMON!r} or {INDEPENDENT!r}, got {self.coupling!r}")
        object.__setattr__(self, "runs", int(self.runs))
        object.__setattr__(self, "seed", int(self.seed))
        if self.trajectory_grid is not None:
            object.__setattr__(self, "trajectory_grid", tuple(float(g) for g in self.trajectory_grid))

    def grid(self) -> tuple[float, ...]:
        """The trajectory grid; yearly up to the lifetime when none is set."""
        if self.trajectory_grid is not None:
            grid = self.trajectory_grid
            if not grid:
                raise ConfigError("trajectory grid is empty")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ConfigError("trajectory grid must be strictly increasing")
            if grid[0] <= 0 or grid[-1] > self.lifetime:
                raise ConfigError(f"trajectory grid must lie in (0, {self.lifetime}]")
            return grid
        years = [float(y) for y in range(1, int(np.floor(self.lifetime)) + 1)]
        if not years or years[-1] < self.lifetime:
            years.append(float(self.lifetime))
        return tuple(years)


@dataclass(frozen=True)
class RunResult:
    deployments: tuple[tuple[float, ...], ...]
    discounted_cost: float


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit value, else ``$ARCHVAL_THREADS``, else CPU count."""
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        if env:
            try:
                threads = int(env)
            except ValueError:
                raise ConfigError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
        else:
            threads = min(os.cpu_count() or 1, 8)
    return max(1, int(threads))


def _present_value(local_runs: np.ndarray, times: np.ndarray, rate: float, n: int) -> np.ndarray:
    # bincount adds weights in array order, i.e. in deployment order for each run.
    return np.bincount(local_runs, weights=np.exp(-rate * times), minlength=n)


def discounted_cost(
    deployments: Sequence[Sequence[float]],
    fraction_costs: Sequence[float],
    rate: float,
) -> float:
    """Discounted cost of one run from its per-fraction deployment times."""
    if rate < 0:
        raise ParameterError(f"discount rate must be >= 0, got {rate}")
    if len(deployments) != len(fraction_costs):
        raise ParameterError("need one cost per fraction")
    total = np.zeros(1)
    for times, cost in zip(deployments, fraction_costs):
        t = np.asarray(times, dtype=float)
        if t.size == 0 or t[0] != 0 or np.any(np.diff(t) <= 0):
            raise ParameterError("deployment times must start at 0 and increase strictly")
        total = total + cost * _present_value(np.zeros(t.size, dtype=np.intp), t, rate, 1)
    return float(total[0])


@dataclass(frozen=True)
class _FractionPlan:
    cost: float
    streams: tuple[RngStream, ...]
    clocks: tuple[LifetimeDistribution, ...]


def _plan(arch: ArchitectureSpec, catalog: Catalog, config: SimulationConfig) -> list[_FractionPlan]:
    issues = validate(arch, catalog)
    if issues:
        raise ConfigError("invalid architecture:\n" + "\n".join(issues))
    root = RngStream(config.seed, ("clock",))
    if config.coupling == INDEPENDENT:
        root = RngStream(config.seed, ("architecture", arch.name, "clock"))
    seen: Counter[tuple[str, str]] = Counter()
    plans = []
    for fraction in arch.fractions:
        streams, clocks = [], []
        for clock in fraction_clocks(fraction, catalog):
            role = (clock.name, clock.mode)
            streams.append(root.child(clock.name, clock.mode, seen[role]))
            seen[role] += 1
            clocks.append(clock.distribution)
        plans.append(
            _FractionPlan(deployment_cost(fraction, catalog, config.launch_rate), tuple(streams), tuple(clocks))
        )
    return plans


def _renewals(plan: _FractionPlan, lifetime: float, first: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Deployment events of one fraction for runs ``first .. first + n - 1``.

    Returns (local run index, time) arrays, each run's events in time order.
    """
    run_parts = [np.arange(n, dtype=np.intp)]
    time_parts = [np.zeros(n)]
    clock_time = np.zeros(n)
    active = np.arange(n, dtype=np.intp)
    uniforms: list[np.ndarray] = []
    i = 0
    while active.size:
        block, col = divmod(i, BLOCK)
        if col == 0:
            uniforms = [s.child(block).block(first, n, BLOCK) for s in plan.streams]
        step = plan.clocks[0]._ppf(uniforms[0][active, col])
        for dist, u in zip(plan.clocks[1:], uniforms[1:]):
            step = np.minimum(step, dist._ppf(u[active, col]))
        prev = clock_time[active]
        # Keep deployment times strictly increasing even if a draw underflows to 0.
        nxt = np.maximum(prev + step, np.nextafter(prev, np.inf))
        alive = nxt < lifetime
        active = active[alive]
        clock_time[active] = nxt[alive]
        run_parts.append(active)
        time_parts.append(nxt[alive])
        i += 1
        if i > MAX_RENEWALS:
            raise RuntimeError("renewal count exploded; check lifetime parameters")
    return np.concatenate(run_parts), np.concatenate(time_parts)


@dataclass(frozen=True, eq=False)
class EventSet:
    """Deployment events of a block of consecutive runs of one architecture."""

    first_run: int
    n_runs: int
    fraction_costs: tuple[float, ...]
    event_runs: tuple[np.ndarray, ...]
    event_times: tuple[np.ndarray, ...]

    def costs(self, rate: float, horizon: float | None = None) -> np.ndarray:
        """Discounted cost per run of all deployments strictly before ``horizon``."""
        total = np.zeros(self.n_runs)
        for cost, runs, times in zip(self.fraction_costs, self.event_runs, self.event_times):
            if horizon is not None:
                keep = times < horizon
                runs, times = runs[keep], times[keep]
            total = total + cost * _present_value(runs, times, rate, self.n_runs)
        return total

    def deployment_counts(self) -> np.ndarray:
        """Array (runs, fractions) of deployment counts."""
        return np.stack(
            [np.bincount(r, minlength=self.n_runs) for r in self.event_runs], axis=1
        )

    def deployments(self, run_index: int) -> tuple[tuple[float, ...], ...]:
        local = run_index - self.first_run
        if not 0 <= local < self.n_runs:
            raise IndexError(run_index)
        return tuple(tuple(float(x) for x in t[r == local]) for r, t in zip(self.event_runs, self.event_times))

    @classmethod
    def concat(cls, parts: Sequence[EventSet]) -> EventSet:
        parts = sorted(parts, key=lambda p: p.first_run)
        m = len(parts[0].fraction_costs)
        runs, times = [], []
        for j in range(m):
            runs.append(np.concatenate([p.event_runs[j] + (p.first_run - parts[0].first_run) for p in parts]))
            times.append(np.concatenate([p.event_times[j] for p in parts]))
        return cls(parts[0].first_run, sum(p.n_runs for p in parts), parts[0].fraction_costs, tuple(runs), tuple(times))


def _simulate_block(plans: list[_FractionPlan], lifetime: float, first: int, n: int) -> EventSet:
    runs, times = zip(*(_renewals(p, lifetime, first, n) for p in plans))
    return EventSet(first, n, tuple(p.cost for p in plans), tuple(runs), tuple(times))


def simulate_events(
    arch: ArchitectureSpec,
    catalog: Catalog,
    config: SimulationConfig,
    threads: int | None = None,
    first_run: int = 0,
    n_runs: int | None = None,
) -> EventSet:
    """Simulate runs ``first_run .. first_run + n_runs - 1`` (default: all runs).

    Work is split in fixed, run-aligned chunks, so the result does not depend
    on the number of worker threads.
    """
    plans = _plan(arch, catalog, config)
    n_runs = config.runs - first_run if n_runs is None else n_runs
    if first_run < 0 or n_runs < 1 or first_run + n_runs > config.runs:
        raise ConfigError(f"run range [{first_run}, {first_run + n_runs}) outside [0, {config.runs})")
    stop = first_run + n_runs
    edges = sorted({first_run, stop, *range((first_run // CHUNK + 1) * CHUNK, stop, CHUNK)})
    spans = list(zip(edges, edges[1:]))
    workers = min(resolve_threads(threads), len(spans))
    if workers == 1:
        parts = [_simulate_block(plans, config.lifetime, a, b - a) for a, b in spans]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda s: _simulate_block(plans, config.lifetime, s[0], s[1] - s[0]), spans))
    return EventSet.concat(parts)


def simulate_run(arch: ArchitectureSpec, catalog: Catalog, config: SimulationConfig, run_index: int) -> RunResult:
    if not 0 <= run_index < config.runs:
        raise ConfigError(f"run_index {run_index} outside [0, {config.runs})")
    events = simulate_events(arch, catalog, config, threads=1, first_run=run_index, n_runs=1)
    return RunResult(events.deployments(run_index), float(events.costs(config.discount_rate)[0]))


def simulate_many(
    arch: ArchitectureSpec, catalog: Catalog, config: SimulationConfig, threads: int | None = None
) -> CostDistribution:
    events = simulate_events(arch, catalog, config, threads)
    return CostDistribution(events.costs(config.discount_rate))


@dataclass(frozen=True)
class TrajectoryPoint:
    time: float
    distribution: CostDistribution


def cost_trajectory(
    arch: ArchitectureSpec, catalog: Catalog, config: SimulationConfig, threads: int | None = None
) -> list[TrajectoryPoint]:
    """Cumulative discounted cost distribution at each grid time.

    All grid points are read off the same simulated event sequences.
    """
    grid = config.grid()
    events = simulate_events(arch, catalog, config, threads)
    return [TrajectoryPoint(t, CostDistribution(events.costs(config.discount_rate, t))) for t in grid]
