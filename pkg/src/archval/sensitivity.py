"""Parameter sweeps of transition value and break-even detection.

Every grid point is evaluated with its own master seed, derived from the
scenario seed and the axis *values* (not their positions), so refining a
grid never changes the points that were already there.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from archval.errors import ConfigError, ParameterError
from archval.mplus import ValueDistribution, mplus_value
from archval.scenario import Scenario
from archval.stats import Summary
from archval.streams import derive_seed


@dataclass(frozen=True)
class Axis:
    path: str
    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ConfigError(f"axis {self.path!r} has no values")
        if len(set(vals)) != len(vals):
            raise ConfigError(f"axis {self.path!r} repeats a value")
        object.__setattr__(self, "values", tuple(sorted(vals)))


@dataclass(frozen=True)
class SweepRow:
    point: tuple[float, ...]
    seed: int
    value: ValueDistribution

    @property
    def summary(self) -> Summary:
        return self.value.summary


@dataclass(frozen=True)
class SweepTable:
    """Rows ordered by secondary axis value, then primary axis value."""

    axes: tuple[str, ...]
    rows: tuple[SweepRow, ...]

    def groups(self) -> dict[float | None, SweepTable]:
        """One single-axis table per secondary value (key None without one)."""
        if len(self.axes) == 1:
            return {None: self}
        out: dict[float | None, list[SweepRow]] = {}
        for row in self.rows:
            out.setdefault(row.point[1], []).append(row)
        return {k: SweepTable(self.axes[:1], tuple(v)) for k, v in out.items()}


def _point_seed(seed: int, coords: Sequence[tuple[str, float]]) -> int:
    labels: list[str | float] = ["sweep"]
    for path, value in coords:
        labels += [path, float(value)]
    return derive_seed(seed, *labels)


def sweep(
    scenario: Scenario,
    source: str,
    target: str,
    axis: Axis,
    secondary: Axis | None = None,
    runs: int | None = None,
    threads: int | None = None,
) -> SweepTable:
    """Transition value from ``source`` to ``target`` at every grid point."""
    scenario.architecture(source)
    scenario.architecture(target)
    base = scenario if runs is None else scenario.with_config(runs=runs)
    outer = secondary.values if secondary is not None else (None,)
    rows = []
    for v2 in outer:
        for v in axis.values:
            coords = [(axis.path, v)]
            if secondary is not None:
                coords.append((secondary.path, v2))
            seed = _point_seed(base.config.seed, coords)
            point = base.with_overrides(dict(coords)).with_config(seed=seed)
            value = mplus_value(
                point.architecture(source), point.architecture(target), point.catalog, point.config, threads
            )
            rows.append(SweepRow(tuple(c[1] for c in coords), seed, value))
    axes = (axis.path,) if secondary is None else (axis.path, secondary.path)
    return SweepTable(axes, tuple(rows))


def _statistic(row: SweepRow, statistic: str) -> float:
    try:
        return float(getattr(row.summary, statistic))
    except AttributeError:
        raise ConfigError(f"unknown statistic {statistic!r}") from None


def find_zero_crossing(
    table: SweepTable | Sequence[tuple[float, float]], statistic: str = "mean"
) -> float | None:
    """Axis value of the first sign change, linearly interpolated.

    ``table`` is a single-axis sweep (sorted by axis) or a list of
    ``(axis value, statistic)`` pairs. A statistic of exactly zero counts as
    a crossing at that grid point. Returns None when the sign never changes.
    """
    if isinstance(table, SweepTable):
        if len(table.axes) != 1:
            raise ParameterError("find_zero_crossing needs a single-axis table; use groups()")
        pairs = [(row.point[0], _statistic(row, statistic)) for row in table.rows]
    else:
        pairs = [(float(x), float(y)) for x, y in table]
    if len(pairs) < 2:
        raise ParameterError("need at least two rows to locate a crossing")
    if any(b[0] <= a[0] for a, b in zip(pairs, pairs[1:])):
        raise ParameterError("rows must be sorted by strictly increasing axis value")
    for (x0, y0), (x1, y1) in zip(pairs, pairs[1:]):
        if y0 == 0:
            return x0
        if (y0 < 0) != (y1 < 0) and y1 != 0:
            frac = min(max(y0 / (y0 - y1), 0.0), 1.0)
            return min(max(x0 + frac * (x1 - x0), x0), x1)
        if y1 == 0:
            return x1
    return None
