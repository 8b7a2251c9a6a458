"""Lifetime distributions used for failure and obsolescence times.

All times are in years. Every distribution is an immutable value exposing
``cdf``, ``sf``, ``pdf``, ``ppf`` (inverse CDF), ``mean`` and ``sample``.
Sampling is by inverse transform of stream uniforms, so a draw is fully
determined by the stream it is taken from.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, ClassVar, Mapping

import numpy as np
from scipy import integrate
from scipy.special import gamma, ndtr, ndtri

from archval.errors import ParameterError
from archval.streams import RngStream

ArrayLike = Any


def _times(t: ArrayLike) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ParameterError(f"lifetime functions are defined for t >= 0, got {t!r}")
    return arr


def _out(arr: np.ndarray, like: ArrayLike):
    return float(arr) if np.ndim(like) == 0 else arr


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise ParameterError(f"{name} must be a positive finite number, got {value!r}")
    return value


class LifetimeDistribution(ABC):
    """A nonnegative random lifetime."""

    kind: ClassVar[str]

    @abstractmethod
    def _sf(self, t: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _pdf(self, t: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _ppf(self, u: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def mean(self) -> float: ...

    @abstractmethod
    def to_dict(self) -> dict[str, Any]: ...

    def sf(self, t: ArrayLike):
        """Survival function ``P(T > t)``."""
        return _out(self._sf(_times(t)), t)

    def cdf(self, t: ArrayLike):
        return _out(1.0 - self._sf(_times(t)), t)

    def pdf(self, t: ArrayLike):
        return _out(self._pdf(_times(t)), t)

    def ppf(self, u: ArrayLike):
        arr = np.asarray(u, dtype=float)
        if np.any((arr <= 0) | (arr >= 1)):
            raise ParameterError("ppf is defined on the open interval (0, 1)")
        return _out(self._ppf(arr), u)

    def sample(self, stream: RngStream, size: int | None = None):
        """Inverse-transform draws from ``stream``; scalar when ``size`` is None."""
        n = 1 if size is None else int(size)
        x = self._ppf(stream.uniforms(n))
        return float(x[0]) if size is None else x

    def var(self) -> float:
        # E[T^2] = int 2 t S(t) dt
        upper = self._support_upper()
        second, _ = integrate.quad(lambda x: 2.0 * x * float(self._sf(np.asarray(x))), 0.0, upper, limit=200)
        return max(second - self.mean() ** 2, 0.0)

    def std(self) -> float:
        return math.sqrt(self.var())

    def _support_upper(self) -> float:
        return math.inf


@dataclass(frozen=True)
class Weibull(LifetimeDistribution):
    """``F(t) = 1 - exp(-(t / scale) ** shape)``."""

    scale: float
    shape: float
    kind: ClassVar[str] = "weibull"

    def __post_init__(self):
        object.__setattr__(self, "scale", _positive("Weibull scale", self.scale))
        object.__setattr__(self, "shape", _positive("Weibull shape", self.shape))

    def _sf(self, t):
        return np.exp(-((t / self.scale) ** self.shape))

    def _pdf(self, t):
        z = t / self.scale
        with np.errstate(divide="ignore"):
            return (self.shape / self.scale) * z ** (self.shape - 1.0) * np.exp(-(z**self.shape))

    def _ppf(self, u):
        return self.scale * (-np.log1p(-u)) ** (1.0 / self.shape)

    def mean(self) -> float:
        return float(self.scale * gamma(1.0 + 1.0 / self.shape))

    def var(self) -> float:
        g1 = gamma(1.0 + 1.0 / self.shape)
        g2 = gamma(1.0 + 2.0 / self.shape)
        return float(self.scale**2 * (g2 - g1**2))

    def to_dict(self):
        return {"kind": self.kind, "scale": self.scale, "shape": self.shape}


@dataclass(frozen=True)
class LognormalMoments(LifetimeDistribution):
    """Lognormal parameterised by its own mean and standard deviation (years)."""

    moment_mean: float
    moment_sd: float
    kind: ClassVar[str] = "lognormal_moments"

    def __post_init__(self):
        object.__setattr__(self, "moment_mean", _positive("lognormal mean", self.moment_mean))
        object.__setattr__(self, "moment_sd", _positive("lognormal sd", self.moment_sd))

    @property
    def sigma2(self) -> float:
        """Variance of the underlying normal."""
        return math.log1p((self.moment_sd / self.moment_mean) ** 2)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    @property
    def mu(self) -> float:
        return math.log(self.moment_mean) - self.sigma2 / 2.0

    def _sf(self, t):
        with np.errstate(divide="ignore"):
            z = (np.log(t) - self.mu) / self.sigma
        return ndtr(-z)

    def _pdf(self, t):
        out = np.zeros_like(t, dtype=float)
        pos = t > 0
        tp = t[pos]
        z = (np.log(tp) - self.mu) / self.sigma
        out[pos] = np.exp(-0.5 * z * z) / (tp * self.sigma * math.sqrt(2.0 * math.pi))
        return out

    def _ppf(self, u):
        return np.exp(self.mu + self.sigma * ndtri(u))

    def mean(self) -> float:
        return math.exp(self.mu + self.sigma2 / 2.0)

    def var(self) -> float:
        return math.expm1(self.sigma2) * math.exp(2.0 * self.mu + self.sigma2)

    def to_dict(self):
        return {"kind": self.kind, "mean": self.moment_mean, "sd": self.moment_sd}


@dataclass(frozen=True)
class PointMass(LifetimeDistribution):
    """A deterministic lifetime. Its density is reported as zero everywhere."""

    time: float
    kind: ClassVar[str] = "point_mass"

    def __post_init__(self):
        object.__setattr__(self, "time", _positive("point-mass time", self.time))

    def _sf(self, t):
        return np.where(t < self.time, 1.0, 0.0)

    def _pdf(self, t):
        return np.zeros_like(t, dtype=float)

    def _ppf(self, u):
        return np.full_like(u, self.time, dtype=float)

    def mean(self) -> float:
        return self.time

    def var(self) -> float:
        return 0.0

    def _support_upper(self) -> float:
        return self.time

    def to_dict(self):
        return {"kind": self.kind, "time": self.time}


@dataclass(frozen=True)
class ComposedMin(LifetimeDistribution):
    """Minimum of independent constituent lifetimes.

    ``S(t) = prod S_i(t)`` and ``f(t) = sum_i f_i(t) prod_{j != i} S_j(t)``.
    Sampling draws every constituent from its own child stream (index ``i``)
    and keeps the smallest value.
    """

    constituents: tuple[LifetimeDistribution, ...]
    kind: ClassVar[str] = "composed_min"

    def __post_init__(self):
        parts = tuple(self.constituents)
        if not parts:
            raise ParameterError("a composed minimum needs at least one constituent")
        if not all(isinstance(p, LifetimeDistribution) for p in parts):
            raise ParameterError("constituents must be lifetime distributions")
        object.__setattr__(self, "constituents", parts)

    def _sf(self, t):
        out = np.ones_like(t, dtype=float)
        for d in self.constituents:
            out = out * d._sf(t)
        return out

    def _pdf(self, t):
        survivals = [d._sf(t) for d in self.constituents]
        total = np.zeros_like(t, dtype=float)
        for i, d in enumerate(self.constituents):
            term = d._pdf(t)
            for j, s in enumerate(survivals):
                if j != i:
                    term = term * s
            total = total + term
        return total

    def _ppf(self, u):
        # Vectorised bisection on the CDF; the bracket grows until it covers u.
        target = 1.0 - u
        lo = np.zeros_like(u, dtype=float)
        hi = np.full_like(u, max(self._support_upper() if math.isfinite(self._support_upper()) else 1.0, 1e-300))
        for _ in range(2000):
            short = self._sf(hi) > target
            if not short.any():
                break
            hi = np.where(short, hi * 2.0, hi)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            right = self._sf(mid) <= target
            hi = np.where(right, mid, hi)
            lo = np.where(right, lo, mid)
            if np.all(hi - lo <= 4 * np.finfo(float).eps * hi):
                break
        return hi

    def sample(self, stream: RngStream, size: int | None = None):
        n = 1 if size is None else int(size)
        draws = [d.sample(stream.child(i), n) for i, d in enumerate(self.constituents)]
        x = np.minimum.reduce(draws)
        return float(x[0]) if size is None else x

    def _support_upper(self) -> float:
        return min(d._support_upper() for d in self.constituents)

    def mean(self) -> float:
        upper = self._support_upper()
        value, _ = integrate.quad(lambda x: float(self._sf(np.asarray(x))), 0.0, upper, limit=200)
        return float(value)

    def to_dict(self):
        return {"kind": self.kind, "constituents": [d.to_dict() for d in self.constituents]}


def weibull(scale: float, shape: float) -> Weibull:
    return Weibull(scale, shape)


def lognormal_from_moments(mean: float, sd: float) -> LognormalMoments:
    """Lognormal whose mean and standard deviation equal ``mean`` and ``sd``.

    The underlying normal has ``sigma^2 = ln(1 + (sd/mean)^2)`` and
    ``mu = ln(mean) - sigma^2 / 2``. A zero ``sd`` is rejected; use
    :func:`point_mass` for a deterministic lifetime.
    """
    return LognormalMoments(mean, sd)


def point_mass(time: float) -> PointMass:
    return PointMass(time)


def weibull_scale_from_mean(mean: float, shape: float) -> float:
    """Scale giving a Weibull of the requested ``mean`` at ``shape``."""
    mean = _positive("mean", mean)
    shape = _positive("shape", shape)
    return float(mean / gamma(1.0 + 1.0 / shape))


def cdf(d: LifetimeDistribution, t: ArrayLike):
    return d.cdf(t)


def pdf(d: LifetimeDistribution, t: ArrayLike):
    return d.pdf(t)


def mean(d: LifetimeDistribution) -> float:
    return d.mean()


def sample(d: LifetimeDistribution, stream: RngStream, size: int | None = None):
    return d.sample(stream, size)


def distribution_from_dict(data: Mapping[str, Any]) -> LifetimeDistribution:
    """Build a distribution from its scenario-file literal."""
    kind = data.get("kind")
    if kind == Weibull.kind:
        return Weibull(data["scale"], data["shape"])
    if kind == LognormalMoments.kind:
        return LognormalMoments(data["mean"], data["sd"])
    if kind == PointMass.kind:
        return PointMass(data["time"])
    if kind == ComposedMin.kind:
        return ComposedMin(tuple(distribution_from_dict(c) for c in data["constituents"]))
    raise ParameterError(f"unknown distribution kind {kind!r}")
