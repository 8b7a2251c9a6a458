"""Value of moving a system from one modularity stage to the next.

The value of a transition is, run by run, what the source architecture costs
minus what the target costs (positive favours the target). Both architectures
are simulated from the same addressed random numbers, so components they
share see identical lifetimes until their renewal histories diverge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from archval.architecture import ArchitectureSpec, Catalog, ModularityStage, stage_of
from archval.errors import ParameterError
from archval.renewal import EventSet, SimulationConfig, simulate_events
from archval.stats import SampleSet


class TransitionKind(Enum):
    SPLITTING = (ModularityStage.M1, ModularityStage.M2)
    FRACTIONATION = (ModularityStage.M2, ModularityStage.M3)
    DECENTRALIZATION = (ModularityStage.M3, ModularityStage.M4)


def transition_kind(source: ModularityStage, target: ModularityStage) -> TransitionKind | None:
    """The named operator for an adjacent-stage move, if there is one."""
    for kind in TransitionKind:
        if kind.value == (source, target):
            return kind
    return None


class ValueDistribution(SampleSet):
    """Per-run value of a transition in k$ (source cost minus target cost)."""


@dataclass(frozen=True)
class TransitionDecision:
    recommend: bool
    criterion: str
    statistic: float
    risk_quantile: float
    threshold: float

    def report(self) -> str:
        verdict = "RECOMMEND" if self.recommend else "DO NOT RECOMMEND"
        return (
            f"criterion: {self.criterion}\n"
            f"statistic: {self.statistic:.6g} k$\n"
            f"recommendation: {verdict}\n"
        )


def benefit_value(arch: ArchitectureSpec, rate: float, horizon: float) -> float:
    """Present value of a constant benefit stream over ``[0, horizon]``."""
    if arch.benefit_rate == 0:
        return 0.0
    if rate == 0:
        return arch.benefit_rate * horizon
    return arch.benefit_rate * -math.expm1(-rate * horizon) / rate


def _check_supported(*archs: ArchitectureSpec) -> None:
    for arch in archs:
        if stage_of(arch) is ModularityStage.M4:
            raise NotImplementedError(
                f"architecture {arch.name!r} is at stage M4; dynamic resource sharing needs an "
                "agent-based valuation engine, which is not provided"
            )


def _pair(source, target, catalog, config, threads) -> tuple[EventSet, EventSet]:
    _check_supported(source, target)
    return (
        simulate_events(source, catalog, config, threads),
        simulate_events(target, catalog, config, threads),
    )


def _value(src: EventSet, tgt: EventSet, source, target, config, horizon=None) -> ValueDistribution:
    r = config.discount_rate
    h = config.lifetime if horizon is None else horizon
    saving = src.costs(r, horizon) - tgt.costs(r, horizon)
    extra = benefit_value(target, r, h) - benefit_value(source, r, h)
    return ValueDistribution(saving + extra)


def mplus_value(
    source: ArchitectureSpec,
    target: ArchitectureSpec,
    catalog: Catalog,
    config: SimulationConfig,
    threads: int | None = None,
) -> ValueDistribution:
    src, tgt = _pair(source, target, catalog, config, threads)
    return _value(src, tgt, source, target, config)


@dataclass(frozen=True)
class ValuePoint:
    time: float
    distribution: ValueDistribution


def value_trajectory(
    source: ArchitectureSpec,
    target: ArchitectureSpec,
    catalog: Catalog,
    config: SimulationConfig,
    threads: int | None = None,
) -> list[ValuePoint]:
    grid = config.grid()
    src, tgt = _pair(source, target, catalog, config, threads)
    return [ValuePoint(t, _value(src, tgt, source, target, config, t)) for t in grid]


def decide(v: ValueDistribution | SampleSet | np.ndarray, risk_quantile: float = 0.5, threshold: float = 0.0) -> TransitionDecision:
    """Recommend the transition iff the ``risk_quantile`` quantile of value exceeds ``threshold``.

    0.5 judges on the median; smaller quantiles encode risk aversion.
    """
    if not 0 < risk_quantile < 1:
        raise ParameterError(f"risk_quantile must lie in (0, 1), got {risk_quantile}")
    samples = v.samples if isinstance(v, SampleSet) else np.asarray(v, dtype=float)
    stat = float(np.quantile(samples, risk_quantile))
    return TransitionDecision(
        recommend=stat > threshold,
        criterion=f"quantile {risk_quantile:g} of value > {threshold:g} k$",
        statistic=stat,
        risk_quantile=risk_quantile,
        threshold=threshold,
    )
