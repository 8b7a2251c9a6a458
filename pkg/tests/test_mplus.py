import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from archval.architecture import ArchitectureSpec, ModularityStage
from archval.errors import ParameterError
from archval.mplus import (
    TransitionKind,
    ValueDistribution,
    benefit_value,
    decide,
    mplus_value,
    transition_kind,
    value_trajectory,
)
from archval.renewal import SimulationConfig
from archval.stochastic import point_mass
from conftest import with_all_lifetimes

CFG = SimulationConfig(runs=3000, seed=42)


@pytest.mark.parametrize("coupling", ["common", "independent"])
def test_zero_identity(f6, coupling):
    cfg = dataclasses.replace(CFG, coupling=coupling)
    for arch in f6.architectures.values():
        v = mplus_value(arch, arch, f6.catalog, cfg)
        assert len(v) == cfg.runs
        assert np.all(v.samples == 0.0)


def test_antisymmetry(f6):
    mono, frac = f6.architecture("monolithic"), f6.architecture("fractionated")
    forward = mplus_value(mono, frac, f6.catalog, CFG).samples
    backward = mplus_value(frac, mono, f6.catalog, CFG).samples
    assert np.array_equal(forward, -backward)


def test_initial_cost_regime(f6):
    s = with_all_lifetimes(f6, point_mass(50))
    cfg = SimulationConfig(lifetime=1, runs=100, seed=3)
    v = mplus_value(s.architecture("monolithic"), s.architecture("fractionated"), s.catalog, cfg)
    assert np.all(v.samples == 178_300 - 273_800)


def test_common_numbers_shrink_value_variance(f6):
    mono, frac = f6.architecture("monolithic"), f6.architecture("fractionated")
    crn = mplus_value(mono, frac, f6.catalog, CFG)
    ind = mplus_value(mono, frac, f6.catalog, dataclasses.replace(CFG, coupling="independent"))
    assert crn.sd < ind.sd


@pytest.mark.parametrize("extra", [1.0, 250.0, 12_345.0])
def test_translation_by_source_only_cost(f6, extra):
    s = with_all_lifetimes(f6, point_mass(7))
    cfg = SimulationConfig(lifetime=20, discount_rate=0.02, runs=20, seed=1)
    mono, frac = s.architecture("monolithic"), s.architecture("fractionated")
    base = mplus_value(mono, frac, s.catalog, cfg).samples
    bumped = s.with_overrides({"buses.bus_monolithic.cost": 34_000 + extra})
    shifted = mplus_value(mono, frac, bumped.catalog, cfg).samples
    weight = 1 + math.exp(-0.14) + math.exp(-0.28)
    assert np.allclose(shifted - base, extra * weight, rtol=1e-9, atol=1e-6)


def test_value_trajectory_of_identical_architectures_is_zero(f6):
    arch = f6.architecture("fractionated")
    for point in value_trajectory(arch, arch, f6.catalog, CFG):
        assert np.all(point.distribution.samples == 0.0)


def test_value_trajectory_baseline_and_growth(f6):
    cfg = dataclasses.replace(CFG, trajectory_grid=(1e-6, *map(float, range(1, 21))))
    traj = value_trajectory(f6.architecture("monolithic"), f6.architecture("fractionated"), f6.catalog, cfg)
    assert np.all(traj[0].distribution.samples == -95_500)
    means = np.array([p.distribution.mean for p in traj[1:]])
    ses = np.array([p.distribution.stderr for p in traj[1:]])
    # paired per run, increments are large compared with the noise
    assert np.all(np.diff(means) > -2 * np.hypot(ses[1:], ses[:-1]))
    assert means[-1] > means[0]


def test_final_trajectory_point_matches_mplus_value(f6):
    mono, frac = f6.architecture("monolithic"), f6.architecture("fractionated")
    traj = value_trajectory(mono, frac, f6.catalog, CFG)
    assert np.array_equal(traj[-1].distribution.samples, mplus_value(mono, frac, f6.catalog, CFG).samples)


def test_benefit_hook(f6):
    s = with_all_lifetimes(f6, point_mass(50))
    cfg = SimulationConfig(lifetime=10, discount_rate=0.02, runs=5, seed=0)
    mono = s.architecture("monolithic")
    frac = dataclasses.replace(s.architecture("fractionated"), benefit_rate=1000.0)
    v = mplus_value(mono, frac, s.catalog, cfg)
    pv = 1000.0 * (1 - math.exp(-0.2)) / 0.02
    assert np.allclose(v.samples, -95_500 + pv, rtol=1e-12)
    assert benefit_value(frac, 0.0, 10) == 10_000.0


def test_m4_is_not_implemented(f6):
    m4 = dataclasses.replace(f6.architecture("fractionated"), stage=ModularityStage.M4, name="dyn")
    with pytest.raises(NotImplementedError):
        mplus_value(f6.architecture("fractionated"), m4, f6.catalog, CFG)


def test_transition_kinds():
    assert transition_kind(ModularityStage.M2, ModularityStage.M3) is TransitionKind.FRACTIONATION
    assert transition_kind(ModularityStage.M1, ModularityStage.M2) is TransitionKind.SPLITTING
    assert transition_kind(ModularityStage.M3, ModularityStage.M4) is TransitionKind.DECENTRALIZATION
    assert transition_kind(ModularityStage.M0, ModularityStage.M3) is None


def test_decide_examples():
    assert not decide(ValueDistribution(np.full(10, -95_500.0)), 0.3, 0).recommend
    two = ValueDistribution([-1.0, 1.0])
    assert decide(two, 0.75, 0).recommend
    assert not decide(two, 0.25, 0).recommend
    zero = decide(ValueDistribution(np.zeros(7)), 0.5, 0)
    assert not zero.recommend and zero.statistic == 0.0


def test_decide_rejects_bad_quantile():
    for q in (0, 1, -0.2, 1.5):
        with pytest.raises(ParameterError):
            decide(ValueDistribution([1.0]), q, 0)


@given(
    samples=st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=30),
    q=st.floats(0.01, 0.99),
    lo=st.floats(-2e6, 2e6),
    step=st.floats(0, 1e6),
)
def test_decide_monotone_in_threshold(samples, q, lo, step):
    v = ValueDistribution(samples)
    d_lo, d_hi = decide(v, q, lo), decide(v, q, lo + step)
    assert d_lo.recommend == (d_lo.statistic > lo)
    assert not (d_hi.recommend and not d_lo.recommend)
