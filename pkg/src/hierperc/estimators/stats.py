from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class EstimateRecord:
    """Running mean and centred second moment; shards merge associatively."""

    mean: float = 0.0
    count: int = 0
    m2: float = 0.0

    @classmethod
    def from_samples(cls, values) -> "EstimateRecord":
        x = np.asarray(values, dtype=np.float64)
        if x.size == 0:
            return cls()
        mu = float(x.mean())
        return cls(mu, int(x.size), float(((x - mu) ** 2).sum()))

    def add(self, value: float) -> None:
        self.count += 1
        delta = value - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (value - self.mean)

    def merge(self, other: "EstimateRecord") -> "EstimateRecord":
        n = self.count + other.count
        if n == 0:
            return EstimateRecord()
        if self.count == 0:
            return EstimateRecord(other.mean, other.count, other.m2)
        if other.count == 0:
            return EstimateRecord(self.mean, self.count, self.m2)
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / n
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        return EstimateRecord(mean, n, m2)

    __add__ = merge

    @property
    def variance(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else 0.0

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.count) if self.count > 0 else math.nan

    def scaled(self, factor: float) -> "EstimateRecord":
        return EstimateRecord(self.mean * factor, self.count, self.m2 * factor * factor)


def z_score(a: EstimateRecord, b: EstimateRecord) -> float:
    """Difference of two independent-or-not means in units of their pooled error."""
    pooled = math.hypot(a.stderr, b.stderr)
    if pooled == 0.0:
        return 0.0 if a.mean == b.mean else math.inf
    return (a.mean - b.mean) / pooled


def binomial_stderr(p: float, n: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / n) if n > 0 else math.nan
