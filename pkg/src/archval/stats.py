"""Monte Carlo sample sets and their summary statistics."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

QUANTILE_LEVELS = (0.05, 0.25, 0.50, 0.75, 0.95)


@dataclass(frozen=True)
class Summary:
    mean: float
    sd: float
    q05: float
    q25: float
    q50: float
    q75: float
    q95: float

    @classmethod
    def of(cls, samples: np.ndarray) -> Summary:
        x = np.asarray(samples, dtype=float)
        if x.size == 0:
            raise ValueError("cannot summarise an empty sample set")
        sd = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
        qs = np.quantile(x, QUANTILE_LEVELS)
        return cls(float(np.mean(x)), sd, *(float(q) for q in qs))

    def as_row(self) -> list[float]:
        return [self.mean, self.sd, self.q05, self.q25, self.q50, self.q75, self.q95]


@dataclass(frozen=True, eq=False)
class SampleSet:
    """One value per Monte Carlo run, in run-index order."""

    samples: np.ndarray

    def __post_init__(self):
        arr = np.array(self.samples, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return self.samples.size

    @cached_property
    def summary(self) -> Summary:
        return Summary.of(self.samples)

    @property
    def mean(self) -> float:
        return self.summary.mean

    @property
    def sd(self) -> float:
        return self.summary.sd

    @property
    def stderr(self) -> float:
        """Standard error of the mean."""
        return self.summary.sd / np.sqrt(len(self))

    def quantile(self, q: float) -> float:
        return float(np.quantile(self.samples, q))


class CostDistribution(SampleSet):
    """Discounted total cost per run, k$."""
