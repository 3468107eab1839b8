"""Cluster-volume tail P(|K| >= m) and the log-log fit for delta."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import rng
from ..kernel import ModelParams
from ..samplers.explorer import INFINITE
from ._runs import run_explorer
from .report import row, to_csv

MIN_POINTS = 4


@dataclass
class TailCurve:
    m: np.ndarray  # dyadic sizes 1, 2, 4, ..., cap
    survival: np.ndarray  # P_hat(|K| >= m)
    stderr: np.ndarray
    cap: int
    censored: float  # fraction of replicates stopped at the cap
    replicates: int
    counts: np.ndarray | None = None  # counts[s] = #{size == s}, s <= cap
    beta: float = math.nan
    seed: int = 0
    restriction: int = INFINITE

    def rows(self) -> list:
        lvl = self.restriction
        out = [row(lvl, self.beta, f"tail_{int(m)}", s, e, self.replicates, self.seed) for m, s, e in zip(self.m, self.survival, self.stderr)]
        out.append(row(lvl, self.beta, "censored", self.censored, math.sqrt(self.censored * (1 - self.censored) / self.replicates), self.replicates, self.seed))
        return out

    def to_csv(self) -> str:
        return to_csv(self.rows())


def dyadic_points(cap: int) -> np.ndarray:
    pts = []
    m = 1
    while m <= cap:
        pts.append(m)
        m *= 2
    return np.array(pts, dtype=np.int64)


def curve_from_sizes(sizes: np.ndarray, cap: int, censored_mask=None, **meta) -> TailCurve:
    counts = np.bincount(np.minimum(sizes, cap), minlength=cap + 1)
    R = len(sizes)
    m = dyadic_points(cap)
    surv = _survival(counts, m, R)
    se = np.sqrt(surv * (1 - surv) / R)
    cens = float(np.mean(censored_mask)) if censored_mask is not None else float(np.mean(sizes >= cap))
    return TailCurve(m, surv, se, cap, cens, R, counts, **meta)


def _survival(counts: np.ndarray, m: np.ndarray, total: int) -> np.ndarray:
    ge = np.cumsum(counts[::-1])[::-1]
    return ge[m] / total


def estimate_tail(params: ModelParams, cap: int, replicates: int, seed: int, restriction: int = INFINITE, workers: int = 1, divergence_guard=None) -> TailCurve:
    sizes, censored, _, _ = run_explorer(params, restriction, cap, replicates, seed, f"tail:{restriction}:{cap}", workers, divergence_guard)
    return curve_from_sizes(sizes, cap, censored, beta=params.beta, seed=seed, restriction=restriction)


@dataclass
class DeltaFit:
    delta: float
    stderr: float
    slope: float
    window: tuple[int, int]
    points: int


def _slope(logm: np.ndarray, logp: np.ndarray) -> float:
    return float(np.polyfit(logm, logp, 1)[0])


def fit_delta(curve: TailCurve, window=None, resamples: int = 200, seed: int = 0) -> DeltaFit:
    """delta_hat = -1/slope of log P_hat against log m over dyadic m in the window."""
    if window is None:
        window = (curve.cap ** (1 / 3), curve.cap / 4)
    lo, hi = window
    if lo > hi:
        raise ValueError("window must satisfy lo <= hi")
    if hi >= curve.cap:
        raise ValueError(f"window upper end {hi} touches the censored region (cap {curve.cap})")
    sel = (curve.m >= lo) & (curve.m <= hi)
    if sel.sum() < MIN_POINTS:
        raise ValueError(f"window {window} holds {int(sel.sum())} dyadic points, need {MIN_POINTS}")
    m = curve.m[sel]
    p = curve.survival[sel]
    if np.any(p <= 0):
        raise ValueError("tail estimate vanishes inside the window")
    logm = np.log(m)
    slope = _slope(logm, np.log(p))
    delta = -1.0 / slope
    stderr = math.nan
    if curve.counts is not None and resamples > 0:
        gen = np.random.Generator(np.random.PCG64(rng.stream_key(seed, "delta-bootstrap")))
        R = curve.replicates
        deltas = []
        for c in gen.multinomial(R, curve.counts / curve.counts.sum(), size=resamples):
            pb = _survival(c, m, R)
            if np.any(pb <= 0):
                continue
            deltas.append(-1.0 / _slope(logm, np.log(pb)))
        if len(deltas) > 1:
            stderr = float(np.std(deltas, ddof=1))
    return DeltaFit(float(delta), stderr, slope, (lo, hi), int(sel.sum()))
