import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from archval.errors import ParameterError
from archval.replacement import min_of
from archval.stochastic import (
    ComposedMin,
    LognormalMoments,
    PointMass,
    Weibull,
    cdf,
    distribution_from_dict,
    lognormal_from_moments,
    mean,
    pdf,
    point_mass,
    sample,
    weibull,
    weibull_scale_from_mean,
)
from archval.streams import RngStream

KS_99 = 1.6276  # asymptotic Kolmogorov critical value at 99%


def ks_bound(n):
    return KS_99 / math.sqrt(n)


def test_weibull_cdf_at_origin_and_scale():
    d = weibull(15, 1.7)
    assert cdf(d, 0.0) == 0.0
    assert cdf(d, 15.0) == pytest.approx(0.632120558828558, abs=1e-12)


def test_weibull_mean_matches_quadrature_oracle():
    # mpmath quadrature of t * pdf(t) at 30 digits
    assert mean(weibull(600, 1.7)) == pytest.approx(535.346701499594, rel=1e-9)


def test_weibull_mean_against_trapezoid_of_t_pdf():
    d = weibull(600, 1.7)
    t = np.linspace(0, 6000, 600_001)
    assert np.trapezoid(t * d.pdf(t), t) == pytest.approx(d.mean(), rel=1e-6)


def test_lognormal_underlying_parameters():
    d = lognormal_from_moments(1, 3)
    assert d.sigma2 == pytest.approx(2.302585092994046, abs=1e-12)
    assert d.mu == pytest.approx(-1.151292546497023, abs=1e-12)


@pytest.mark.parametrize("m, s", [(1, 3), (2, 2), (35, 0.5)])
def test_lognormal_moment_round_trip(m, s):
    d = lognormal_from_moments(m, s)
    assert d.mean() == pytest.approx(m, abs=1e-9)
    assert d.std() == pytest.approx(s, abs=1e-9)


def test_lognormal_monte_carlo_moments():
    d = lognormal_from_moments(1, 3)
    x = d.sample(RngStream(7, ("ln",)), 1_000_000)
    # the sd is huge-tailed, so check the mean loosely and the median tightly
    assert abs(x.mean() - 1.0) < 5 * 3 / math.sqrt(x.size)
    assert np.median(x) == pytest.approx(math.exp(d.mu), rel=0.01)


def test_weibull_scale_from_mean():
    assert weibull_scale_from_mean(35, 5) == pytest.approx(35 / math.gamma(1.2), rel=1e-12)
    assert weibull_scale_from_mean(35, 5) == pytest.approx(38.1193547370418, rel=1e-12)
    assert weibull_scale_from_mean(12.5, 1) == pytest.approx(12.5, rel=1e-12)
    assert weibull(weibull_scale_from_mean(35, 5), 5).mean() == pytest.approx(35, abs=1e-6)


@pytest.mark.parametrize(
    "factory, args",
    [
        (weibull, (0, 1.7)),
        (weibull, (15, -1)),
        (lognormal_from_moments, (0, 3)),
        (lognormal_from_moments, (1, 0)),
        (point_mass, (0,)),
        (weibull_scale_from_mean, (-1, 5)),
        (weibull_scale_from_mean, (35, 0)),
    ],
)
def test_parameter_domain_errors(factory, args):
    with pytest.raises(ParameterError):
        factory(*args)


def test_negative_time_is_domain_error():
    with pytest.raises(ParameterError):
        cdf(weibull(1, 1), -0.1)
    with pytest.raises(ParameterError):
        pdf(lognormal_from_moments(1, 1), [-1.0, 2.0])


def test_point_mass_cdf_steps():
    d = point_mass(7)
    assert cdf(d, 6.9) == 0.0
    assert cdf(d, 7.0) == 1.0


def test_pdf_matches_finite_difference():
    d = weibull(15, 1.7)
    h = 1e-5
    fd = (d.cdf(10 + h) - d.cdf(10 - h)) / (2 * h)
    assert pdf(d, 10.0) == pytest.approx(fd, abs=1e-6)


DISTS = [
    weibull(15, 1.7),
    weibull(1, 1),
    weibull(38.1, 5),
    lognormal_from_moments(1, 3),
    lognormal_from_moments(20, 4),
    min_of([weibull(15, 1.7), weibull(600, 1.7), weibull(108, 1.7), lognormal_from_moments(1, 3)]),
]


@pytest.mark.parametrize("d", DISTS + [point_mass(7)], ids=repr)
def test_cdf_monotone_with_limits(d):
    t = np.linspace(0, 10 * d.mean(), 1000)
    c = d.cdf(t)
    assert c[0] == 0.0
    assert np.all(np.diff(c) >= 0)
    assert d.cdf(1e12) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("d", DISTS, ids=repr)
def test_pdf_consistent_with_cdf_on_grid(d):
    t = np.linspace(0.05, 5 * d.mean(), 200)
    h = 1e-6
    fd = (d.cdf(t + h) - d.cdf(t - h)) / (2 * h)
    assert np.max(np.abs(d.pdf(t) - fd)) < 1e-6


@pytest.mark.parametrize("d", DISTS, ids=repr)
def test_pdf_integrates_to_one(d):
    from scipy import integrate

    total, _ = integrate.quad(lambda x: d.pdf(x), 0, np.inf, limit=500, points=None)
    assert total == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("d", DISTS + [point_mass(7)], ids=repr)
def test_mean_matches_integral_of_survival(d):
    from scipy import integrate

    upper = 7.0 if isinstance(d, PointMass) else np.inf
    oracle, _ = integrate.quad(lambda x: 1 - d.cdf(x), 0, upper, limit=500)
    assert d.mean() == pytest.approx(oracle, rel=1e-6)


def test_sampling_weibull_exponential_ks():
    x = sample(weibull(1, 1), RngStream(123, ("ks",)), 100_000)
    res = stats.kstest(x, lambda t: 1 - np.exp(-t))
    assert res.statistic < 0.006


@pytest.mark.parametrize("d", DISTS, ids=repr)
def test_sampling_ks_below_critical_value(d):
    x = d.sample(RngStream(2024, ("kind", d.kind)), 100_000)
    assert stats.kstest(x, d.cdf).statistic < ks_bound(x.size)


def test_point_mass_samples_are_constant():
    assert np.all(point_mass(7).sample(RngStream(1), 50) == 7.0)


def test_scalar_sample_is_float():
    assert isinstance(sample(weibull(2, 2), RngStream(5)), float)


def test_sampling_reproducible_from_stream():
    d = lognormal_from_moments(1, 3)
    s = RngStream(99, ("run", 3))
    assert np.array_equal(d.sample(s, 1000), d.sample(s, 1000))


def test_distribution_literals_round_trip():
    for d in [weibull(15, 1.7), lognormal_from_moments(1, 3), point_mass(7), min_of([point_mass(2), weibull(1, 1)])]:
        assert distribution_from_dict(d.to_dict()) == d
    assert weibull(15, 1.7).to_dict() == {"kind": "weibull", "scale": 15, "shape": 1.7}
    assert lognormal_from_moments(1, 3).to_dict() == {"kind": "lognormal_moments", "mean": 1, "sd": 3}


def test_immutable():
    d = weibull(1, 2)
    with pytest.raises(AttributeError):
        d.scale = 3


@settings(max_examples=60, deadline=None)
@given(scale=st.floats(0.1, 1000), shape=st.floats(0.3, 10), u=st.floats(1e-9, 1 - 1e-9))
def test_weibull_ppf_inverts_cdf(scale, shape, u):
    d = Weibull(scale, shape)
    assert d.cdf(d.ppf(u)) == pytest.approx(u, rel=1e-9, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(m=st.floats(0.1, 100), cv=st.floats(0.05, 5), u=st.floats(1e-6, 1 - 1e-6))
def test_lognormal_ppf_inverts_cdf(m, cv, u):
    d = LognormalMoments(m, m * cv)
    assert d.cdf(d.ppf(u)) == pytest.approx(u, rel=1e-7, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(u=st.floats(1e-6, 1 - 1e-6))
def test_composed_ppf_inverts_cdf(u):
    d = ComposedMin((weibull(15, 1.7), weibull(108, 1.7), lognormal_from_moments(1, 3)))
    assert d.cdf(d.ppf(u)) == pytest.approx(u, rel=1e-9, abs=1e-12)
