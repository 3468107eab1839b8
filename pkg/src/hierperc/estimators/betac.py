"""Crossing estimate of beta_c from R_n = L^(-alpha n) E|K_n|.

At beta_c, E|K_n| is of order L^(alpha n), so R_n stays bounded away from 0
and infinity, while it decays below beta_c and grows above it.  For each pair
of consecutive levels the crossing of R_n and R_{n+1} is located by
bisection.  Each probe draws one sample on Lambda_{n+1}: the level-n snapshot
of that sample gives R_n through the census over all level-n blocks, and the
full sample gives R_{n+1}, so the difference is estimated from paired values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..kernel import ModelParams
from ._runs import run_levels
from .report import row, to_csv
from .stats import EstimateRecord
from .susceptibility import betac_lower_bound, typical_max_summary

STOP_SIGMAS = 2.0


class CrossingError(RuntimeError):
    """No sign change of R_{n+1} - R_n inside the bracket."""


@dataclass
class Probe:
    beta: float
    diff: float
    stderr: float


@dataclass
class Crossing:
    n: int
    beta: float | None
    probes: list
    status: str  # "ok", "no-sign-change"


@dataclass
class ScalingRow:
    n: int
    beta: float
    susceptibility: EstimateRecord
    typical_max: int
    R: float
    R_se: float
    S: float


@dataclass
class ScalingReport:
    rows: list = field(default_factory=list)
    betas: list = field(default_factory=list)
    crossings: list = field(default_factory=list)
    replicates: int = 0
    seed: int = 0

    def at(self, beta: float) -> list:
        return [r for r in self.rows if r.beta == beta]

    def csv_rows(self) -> list:
        out = []
        for r in self.rows:
            rep, sd = self.replicates, self.seed
            out.append(row(r.n, r.beta, "susceptibility", r.susceptibility.mean, r.susceptibility.stderr, rep, sd))
            out.append(row(r.n, r.beta, "typical_max", r.typical_max, math.nan, rep, sd))
            out.append(row(r.n, r.beta, "R", r.R, r.R_se, rep, sd))
            out.append(row(r.n, r.beta, "S", r.S, math.nan, rep, sd))
        for c in self.crossings:
            if c.beta is not None:
                out.append(row(c.n, c.beta, "crossing", c.beta, math.nan, self.replicates, self.seed))
        return out

    def to_csv(self) -> str:
        return to_csv(self.csv_rows())


@dataclass
class BetacEstimate:
    value: float
    interval: tuple[float, float]
    report: ScalingReport
    lower_bound: float

    @property
    def width(self) -> float:
        return self.interval[1] - self.interval[0]


def _probe(params: ModelParams, n: int, beta: float, replicates: int, seed: int, workers: int) -> Probe:
    p = params.with_beta(beta)
    _, sumsq, _, _, _, _ = run_levels(p, n + 1, replicates, seed, f"betac:{n}:{beta!r}", workers=workers)
    N = params.base ** (n + 1)
    a = params.L ** (-params.alpha * n)
    b = params.L ** (-params.alpha * (n + 1))
    d = (b * sumsq[:, n + 1] - a * sumsq[:, n]) / N
    rec = EstimateRecord.from_samples(d)
    return Probe(beta, rec.mean, rec.stderr)


def locate_crossing(params: ModelParams, n: int, bracket, replicates: int, seed: int, workers: int = 1, max_probes: int = 40, tol: float = 1e-5) -> Crossing:
    lo, hi = map(float, bracket)
    probes = [_probe(params, n, lo, replicates, seed, workers), _probe(params, n, hi, replicates, seed, workers)]
    if not (probes[0].diff < 0 < probes[1].diff):
        return Crossing(n, None, probes, "no-sign-change")
    while len(probes) < max_probes and hi - lo > tol:
        mid = 0.5 * (lo + hi)
        pr = _probe(params, n, mid, replicates, seed, workers)
        probes.append(pr)
        if abs(pr.diff) < STOP_SIGMAS * pr.stderr:
            return Crossing(n, mid, probes, "ok")
        if pr.diff < 0:
            lo = mid
        else:
            hi = mid
    return Crossing(n, 0.5 * (lo + hi), probes, "ok")


def scaling_report(params: ModelParams, levels, betas, replicates: int, seed: int, workers: int = 1) -> ScalingReport:
    """E|K_n|, M_n, R_n and S_n for every n in levels and beta in betas."""
    levels = list(levels)
    host = max(levels)
    rep = ScalingReport(betas=list(betas), replicates=replicates, seed=seed)
    d, a = params.d, params.alpha
    for beta in betas:
        p = params.with_beta(beta)
        _, sumsq, kmax0, _, _, _ = run_levels(p, host, replicates, seed, f"scaling:{host}:{beta!r}", workers=workers)
        N = params.base**host
        for n in levels:
            sus = EstimateRecord.from_samples(sumsq[:, n] / N)
            M = typical_max_summary(kmax0[:, n], p, n, seed, resamples=0).value if replicates >= 1 else 0
            scale = params.L ** (-a * n)
            rep.rows.append(ScalingRow(n, float(beta), sus, M, sus.mean * scale, sus.stderr * scale, M * M * params.L ** (-(d + a) * n)))
    return rep


def estimate_betac(params: ModelParams, levels, bracket, replicates: int, seed: int, workers: int = 1, report_betas=None) -> BetacEstimate:
    """Median of the pairwise crossings over consecutive levels, with min-max spread."""
    levels = list(levels)
    if len(levels) < 2:
        raise ValueError("need at least two levels")
    crossings = [locate_crossing(params, n, bracket, replicates, seed, workers) for n in levels[:-1]]
    good = [c.beta for c in crossings if c.status == "ok"]
    if not good:
        raise CrossingError(f"R_n and R_(n+1) do not cross inside bracket {tuple(bracket)} for any level pair")
    value = float(np.median(good))
    betas = sorted(set(report_betas or []) | {value})
    report = scaling_report(params, levels, betas, replicates, seed, workers)
    report.crossings = crossings
    return BetacEstimate(value, (min(good), max(good)), report, betac_lower_bound(params))
