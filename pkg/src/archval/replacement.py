"""Replacement-time distribution of a fraction.

A fraction is replaced as soon as any constituent fails or any declared
obsolescence clock runs out, so its replacement time is the minimum of all
those independent lifetimes.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple

from archval.architecture import Catalog, FractionSpec, fraction_members
from archval.errors import ParameterError
from archval.stochastic import ComposedMin, LifetimeDistribution

FAILURE = "failure"
OBSOLESCENCE = "obsolescence"


class Clock(NamedTuple):
    """One independent lifetime clock inside a fraction."""

    name: str
    mode: str
    distribution: LifetimeDistribution


def min_of(constituents: Iterable[LifetimeDistribution]) -> ComposedMin:
    parts = tuple(constituents)
    if not parts:
        raise ParameterError("min_of needs at least one constituent")
    return ComposedMin(parts)


def fraction_clocks(fraction: FractionSpec, catalog: Catalog) -> list[Clock]:
    """Every failure clock, then every declared obsolescence clock."""
    members = fraction_members(fraction, catalog)
    clocks = [Clock(m.name, FAILURE, m.failure) for m in members]
    clocks += [Clock(m.name, OBSOLESCENCE, m.obsolescence) for m in members if m.obsolescence is not None]
    return clocks


def replacement_distribution(fraction: FractionSpec, catalog: Catalog) -> ComposedMin:
    return min_of(c.distribution for c in fraction_clocks(fraction, catalog))
