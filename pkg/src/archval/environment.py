"""Space-time environment model.

The environment is a finite set of states, one per combination of parameter
levels. Stakeholders require some of those states in each period; the union
of required states (over stakeholders: spatial, over periods: temporal) is
what the system has to answer. The heterogeneity score is advisory metadata
and does not feed the cost valuation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from archval.errors import ParameterError


@dataclass(frozen=True)
class Parameter:
    name: str
    levels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        if not self.levels:
            raise ParameterError(f"parameter {self.name!r} has an empty level domain")
        if len(set(self.levels)) != len(self.levels):
            raise ParameterError(f"parameter {self.name!r} repeats a level")


@dataclass(frozen=True, order=True)
class EnvironmentState:
    """One level per parameter, stored as ``((name, level), ...)`` in parameter order."""

    assignment: tuple[tuple[str, str], ...]

    def level(self, name: str) -> str:
        return dict(self.assignment)[name]

    def label(self) -> str:
        return "(" + ",".join(level for _, level in self.assignment) + ")"


@dataclass(frozen=True)
class Stakeholder:
    """``requirements[p]`` is the set of assignments required in period ``p``."""

    requirements: tuple[tuple[Mapping[str, str], ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "requirements", tuple(tuple(dict(a) for a in period) for period in self.requirements)
        )


@dataclass(frozen=True)
class EnvironmentModel:
    parameters: tuple[Parameter, ...]
    stakeholders: tuple[Stakeholder, ...] = ()
    discount: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "parameters", tuple(self.parameters))
        object.__setattr__(self, "stakeholders", tuple(self.stakeholders))
        problems = self.issues()
        if problems:
            raise ParameterError("invalid environment model: " + "; ".join(problems))

    @property
    def periods(self) -> int:
        return max((len(s.requirements) for s in self.stakeholders), default=0)

    def issues(self) -> list[str]:
        out = []
        if not self.parameters:
            out.append("no parameters declared")
        if not 0 < self.discount <= 1:
            out.append(f"discount must lie in (0, 1], got {self.discount}")
        domains = {p.name: p.levels for p in self.parameters}
        if len(domains) != len(self.parameters):
            out.append("parameter names must be unique")
        for s_idx, stakeholder in enumerate(self.stakeholders, start=1):
            if not stakeholder.requirements:
                out.append(f"stakeholder {s_idx} has no periods")
            for p_idx, period in enumerate(stakeholder.requirements):
                for req in period:
                    where = f"stakeholder {s_idx}, period {p_idx}"
                    if set(req) != set(domains):
                        out.append(f"{where}: requirement must assign exactly {sorted(domains)}, got {sorted(req)}")
                        continue
                    for name, level in req.items():
                        if level not in domains[name]:
                            out.append(f"{where}: level {level!r} not in domain of {name!r}")
        return out

    def state(self, assignment: Mapping[str, str]) -> EnvironmentState:
        return EnvironmentState(tuple((p.name, assignment[p.name]) for p in self.parameters))

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> EnvironmentModel:
        params = [Parameter(p["name"], p["levels"]) for p in data["parameters"]]
        holders = [Stakeholder(s["requirements"]) for s in data.get("stakeholders", [])]
        return cls(tuple(params), tuple(holders), float(data.get("discount", 1.0)))

    def to_dict(self) -> dict[str, Any]:
        return {
            "parameters": [{"name": p.name, "levels": list(p.levels)} for p in self.parameters],
            "stakeholders": [
                {"requirements": [[dict(a) for a in period] for period in s.requirements]}
                for s in self.stakeholders
            ],
            "discount": self.discount,
        }


def enumerate_states(model: EnvironmentModel) -> list[EnvironmentState]:
    """Cross product of parameter levels in declaration (lexicographic) order."""
    names = [p.name for p in model.parameters]
    return [EnvironmentState(tuple(zip(names, combo))) for combo in itertools.product(*(p.levels for p in model.parameters))]


def required_states(model: EnvironmentModel) -> dict[EnvironmentState, int]:
    """Required states mapped to the earliest period (0-based) that names them.

    Iteration order follows :func:`enumerate_states`.
    """
    first: dict[EnvironmentState, int] = {}
    for stakeholder in model.stakeholders:
        for period, reqs in enumerate(stakeholder.requirements):
            for req in reqs:
                state = model.state(req)
                if state not in first or period < first[state]:
                    first[state] = period
    return {s: first[s] for s in enumerate_states(model) if s in first}


def heterogeneity_score(model: EnvironmentModel) -> float:
    """Sum over required states of ``discount ** first_period``."""
    return float(sum(model.discount**p for p in required_states(model).values()))


def state_table(model: EnvironmentModel) -> list[tuple[str, EnvironmentState, bool, int | None]]:
    """Rows ``(S_i, state, required, first period)`` for display."""
    req = required_states(model)
    return [(f"S{i}", s, s in req, req.get(s)) for i, s in enumerate(enumerate_states(model), start=1)]


def panel(states: Sequence[Sequence[str]], parameters: Sequence[Parameter]) -> Stakeholder:
    """Stakeholder whose period ``p`` requires the level tuples in ``states[p]``.

    Accepts each period either as one level tuple or as a list of them.
    """
    names = [p.name for p in parameters]
    periods = []
    for period in states:
        items = [period] if period and isinstance(period[0], str) else period
        periods.append(tuple(dict(zip(names, levels)) for levels in items))
    return Stakeholder(tuple(periods))
