"""Susceptibility, typical maximum cluster, phi and the critical-point lower bound."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import rng
from ..kernel import ModelParams, tail_sum
from ._runs import run_direct
from .stats import EstimateRecord, z_score

DISAGREE_SIGMAS = 4.0
INV_E = math.exp(-1.0)


@dataclass
class SusceptibilityEstimate:
    root: EstimateRecord  # mean of |K_n(0)|
    census: EstimateRecord  # mean of sum_C |C|^2 / |Lambda_n|
    n: int
    beta: float

    @property
    def z(self) -> float:
        return z_score(self.root, self.census)

    @property
    def disagreement(self) -> bool:
        return abs(self.z) > DISAGREE_SIGMAS

    @property
    def record(self) -> EstimateRecord:
        """The lower-variance census estimate."""
        return self.census


def estimate_susceptibility(params: ModelParams, n: int, replicates: int, seed: int, workers: int = 1) -> SusceptibilityEstimate:
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    kroot, _, sumsq, _ = run_direct(params, n, replicates, seed, f"susceptibility:{n}", workers)
    N = params.base**n
    return SusceptibilityEstimate(EstimateRecord.from_samples(kroot), EstimateRecord.from_samples(sumsq / N), n, params.beta)


def typical_max_from_samples(kmax: np.ndarray) -> int:
    """Smallest m >= 1 with empirical P(max >= m) <= 1/e."""
    counts = np.bincount(kmax)
    return _quantile_from_counts(counts, len(kmax))


def _quantile_from_counts(counts: np.ndarray, total: int) -> int:
    # survival[m] = #{max >= m}
    survival = np.cumsum(counts[::-1])[::-1]
    m = 1
    while m < len(survival) and survival[m] > INV_E * total:
        m += 1
    return m


@dataclass
class TypicalMax:
    value: int
    interval: tuple[int, int]
    survival: np.ndarray  # survival[m] = P_hat(|K^max| >= m), m = 0..max
    replicates: int
    n: int
    beta: float


def estimate_typical_max(params: ModelParams, n: int, replicates: int, seed: int, workers: int = 1, resamples: int = 200) -> TypicalMax:
    if replicates < 100:
        raise ValueError("replicates must be >= 100")
    _, kmax, _, _ = run_direct(params, n, replicates, seed, f"typical-max:{n}", workers)
    return typical_max_summary(kmax, params, n, seed, resamples)


def typical_max_summary(kmax: np.ndarray, params: ModelParams, n: int, seed: int, resamples: int = 200) -> TypicalMax:
    counts = np.bincount(kmax)
    total = len(kmax)
    value = _quantile_from_counts(counts, total)
    lo = hi = value
    if resamples > 0:
        gen = np.random.Generator(np.random.PCG64(rng.stream_key(seed, f"bootstrap:{n}")))
        boot = [_quantile_from_counts(c, total) for c in gen.multinomial(total, counts / total, size=resamples)]
        lo = int(np.percentile(boot, 2.5, method="lower"))
        hi = int(np.percentile(boot, 97.5, method="higher"))
    survival = np.cumsum(counts[::-1])[::-1] / total
    return TypicalMax(value, (lo, hi), survival, total, n, params.beta)


@dataclass
class PhiEstimate:
    value: float
    stderr: float
    tail: float  # T_n(beta)


def compute_phi(params: ModelParams, n: int, susceptibility) -> PhiEstimate:
    """phi_beta(Lambda_n) = E|K_n| * T_n(beta) from an estimate at the same (beta, n)."""
    rec = susceptibility.record if isinstance(susceptibility, SusceptibilityEstimate) else susceptibility
    if isinstance(susceptibility, SusceptibilityEstimate) and (susceptibility.n != n or susceptibility.beta != params.beta):
        raise ValueError("susceptibility was estimated at a different (beta, n)")
    t = tail_sum(n, params).value
    return PhiEstimate(rec.mean * t, rec.stderr * t, t)


def betac_lower_bound(params: ModelParams) -> float:
    """(L^alpha - 1) / C."""
    C = params.upper_constant
    if math.isinf(C):
        return 0.0
    return (params.L**params.alpha - 1.0) / C
