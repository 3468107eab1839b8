"""Empirical checks of the max-cluster inequalities and the annulus-sum diagnostic."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..kernel import ModelParams
from ._runs import run_levels
from .stats import EstimateRecord, binomial_stderr
from .susceptibility import typical_max_from_samples

SLACK = 4.0
LAMBDAS = (9.0, 18.0)
EPSILONS = (0.02, 0.05)


@dataclass
class InequalityCheck:
    name: str
    n: int
    beta: float
    lhs: float
    rhs: float
    sigma: float

    @property
    def ok(self) -> bool:
        return self.lhs <= self.rhs + SLACK * self.sigma


def max_cluster_checks(params: ModelParams, host: int, replicates: int, seed: int, levels=None, workers: int = 1) -> list[InequalityCheck]:
    """Checks at every n in levels (default 1..host) from one sample on Lambda_host."""
    levels = range(1, host + 1) if levels is None else levels
    _, sumsq, kmax0, _, _, _ = run_levels(params, host, replicates, seed, f"inequalities:{host}", workers=workers)
    N = params.base**host
    out = []
    for n in levels:
        mx = kmax0[:, n]
        M = typical_max_from_samples(mx)
        sus = EstimateRecord.from_samples(sumsq[:, n] / N)
        out.append(InequalityCheck("max_squared_vs_susceptibility", n, params.beta, M * M / (4 * math.e * params.base**n), sus.mean, sus.stderr))
        for lam in LAMBDAS:
            p = float(np.mean(mx >= lam * M))
            out.append(InequalityCheck(f"upper_tail_lambda_{lam:g}", n, params.beta, p, math.exp(-lam / 9), binomial_stderr(p, len(mx))))
        for eps in EPSILONS:
            p = float(np.mean(mx < eps * M))
            out.append(InequalityCheck(f"lower_tail_eps_{eps:g}", n, params.beta, p, 27 * eps, binomial_stderr(p, len(mx))))
    return out


@dataclass
class AnnulusDiagnostic:
    levels: list
    annulus_sum: np.ndarray  # sum over x in Lambda_{n+1} \ Lambda_n of P(0 <-> x inside Lambda_{n+1})
    susceptibility: np.ndarray  # E|K_n|
    constant: np.ndarray  # annulus_sum / (beta L^(-alpha n) E|K_n|^2)

    @property
    def spread(self) -> float:
        return float(self.constant.max() / self.constant.min())

    @property
    def stable(self) -> bool:
        return self.spread <= 2.0


def annulus_diagnostic(params: ModelParams, levels, replicates: int, seed: int, workers: int = 1) -> AnnulusDiagnostic:
    levels = list(levels)
    host = max(levels) + 1
    snaps = [n + 1 for n in levels]
    _, sumsq, _, _, pairs, _ = run_levels(params, host, replicates, seed, f"annulus:{host}", pair_snaps=snaps, workers=workers)
    N = params.base**host
    ann = np.array([pairs[:, n + 1, n + 1].mean() / N for n in levels])
    sus = np.array([sumsq[:, n].mean() / N for n in levels])
    scale = np.array([params.beta * params.L ** (-params.alpha * n) for n in levels])
    return AnnulusDiagnostic(levels, ann, sus, ann / (scale * sus**2))
