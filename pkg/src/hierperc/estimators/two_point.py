"""Radial two-point function, restricted and embedded, and the triangle diagram.

Two estimators of t_k are offered.  ``representative`` follows one fixed
point x_k of the level-k annulus (by default the first one, L^(d(k-1)) in
packed order).  ``pairs`` averages the indicator over every ordered pair at
distance L^k in the sample; by translation invariance of the ball (a
subgroup) it has the same mean and far smaller variance, which matters for
the triangle sum at high levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..kernel import ModelParams
from ..lattice import annulus_size, triple_count
from ._runs import run_levels
from .report import row, to_csv

RESTRICTED = "restricted"
UNRESTRICTED = "unrestricted"
DEFAULT_EMBED = 3


@dataclass
class RadialTwoPoint:
    n: int
    beta: float
    replicates: int
    seed: int
    estimator: str
    restricted: np.ndarray
    restricted_se: np.ndarray
    delta: int = 0  # embedding levels; 0 when only restricted values exist
    unrestricted: np.ndarray | None = None
    unrestricted_se: np.ndarray | None = None
    shallower: np.ndarray | None = None  # embedded in Lambda_{n+delta-1}
    shallower_se: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def rows(self) -> list:
        out = []
        for k in range(self.n + 1):
            out.append(row(self.n, self.beta, f"t_restricted_{k}", self.restricted[k], self.restricted_se[k], self.replicates, self.seed))
        if self.unrestricted is not None:
            for k in range(self.n + 1):
                out.append(row(self.n, self.beta, f"t_embed{self.delta}_{k}", self.unrestricted[k], self.unrestricted_se[k], self.replicates, self.seed))
            for k in range(self.n + 1):
                out.append(row(self.n, self.beta, f"t_embed{self.delta - 1}_{k}", self.shallower[k], self.shallower_se[k], self.replicates, self.seed))
        return out

    def to_csv(self) -> str:
        return to_csv(self.rows())


def _rep_indices(params: ModelParams, host: int, representative) -> list[int]:
    """Packed index of the chosen level-k annulus point, k = 0..host."""
    B = params.base
    idx = [0]
    for k in range(1, host + 1):
        low = B ** (k - 1)
        if representative == "first":
            idx.append(low)
        elif representative == "last":
            idx.append(B**k - 1)
        else:
            # an integer offset into the annulus, wrapped
            idx.append(low + int(representative) % (B**k - low))
    return idx


def _indicator_means(x: np.ndarray):
    mean = x.mean(axis=0)
    se = np.sqrt(np.maximum(mean * (1.0 - mean), 0.0) / x.shape[0])
    return mean, se


def _pair_means(pairs: np.ndarray, N: int, params: ModelParams, upto: int):
    R = pairs.shape[0]
    mean = np.zeros(upto + 1)
    se = np.zeros(upto + 1)
    mean[0] = 1.0
    for k in range(1, upto + 1):
        vals = pairs[:, k] / (N * annulus_size(k, params.lattice))
        mean[k] = vals.mean()
        se[k] = vals.std(ddof=1) / math.sqrt(R) if R > 1 else math.nan
    return mean, se


def estimate_radial_two_point(
    params: ModelParams,
    n: int,
    replicates: int,
    seed: int,
    mode: str = RESTRICTED,
    delta: int = DEFAULT_EMBED,
    estimator: str = "representative",
    representative="first",
    workers: int = 1,
) -> RadialTwoPoint:
    """t_k = P(0 <-> x_k), ||x_k|| = L^k, for k = 0..n.

    Restricted values use the sample on Lambda_n.  In unrestricted mode the
    sample lives on Lambda_{n+delta} and the values embedded in
    Lambda_{n+delta-1} are reported alongside, from the same sample.
    """
    if mode not in (RESTRICTED, UNRESTRICTED):
        raise ValueError(f"unknown mode {mode!r}")
    if estimator not in ("representative", "pairs"):
        raise ValueError(f"unknown estimator {estimator!r}")
    if mode == UNRESTRICTED and delta < 1:
        raise ValueError("unrestricted mode needs delta >= 1 embedding levels")
    host = n + (delta if mode == UNRESTRICTED else 0)
    snaps = sorted({n, host - 1, host}) if mode == UNRESTRICTED else [n]
    idx = _rep_indices(params, host, representative)
    tag = f"two-point:{mode}:{host}:{estimator}:{representative}"
    _, _, _, rep, pairs, _ = run_levels(params, host, replicates, seed, tag, idx, snaps if estimator == "pairs" else (), workers)
    N = params.base**host

    def at(m):
        if estimator == "pairs":
            return _pair_means(pairs[:, m, :], N, params, n)
        return _indicator_means(rep[:, m, : n + 1].astype(np.float64))

    t, se = at(n)
    out = RadialTwoPoint(n, params.beta, replicates, seed, estimator, t, se)
    if mode == UNRESTRICTED:
        out.delta = delta
        out.unrestricted, out.unrestricted_se = at(host)
        out.shallower, out.shallower_se = at(host - 1)
    return out


@dataclass
class TriangleSum:
    value: float  # nabla_n
    partial: np.ndarray  # nabla_m for m = 0..n
    increments: np.ndarray  # nabla_m - nabla_{m-1}, m = 1..n (index m)

    def increment_ratios(self, lo: int, hi: int) -> np.ndarray:
        """increments[m+1] / increments[m] for m = lo..hi-1."""
        return np.array([self.increments[m + 1] / self.increments[m] for m in range(lo, hi)])


def triangle_sum(tau, n: int, params: ModelParams) -> TriangleSum:
    """sum_{x,y in Lambda_m} t(x) t(y-x) t(y), for every m <= n.

    ``tau`` is a RadialTwoPoint with embedded estimates, or a plain sequence
    t_0..t_n.
    """
    if isinstance(tau, RadialTwoPoint):
        if tau.unrestricted is None:
            raise ValueError("triangle sum needs unrestricted two-point estimates")
        t = np.asarray(tau.unrestricted, dtype=np.float64)
    else:
        t = np.asarray(tau, dtype=np.float64)
    if len(t) < n + 1:
        raise ValueError(f"two-point estimates cover levels 0..{len(t) - 1}, need 0..{n}")
    partial = np.zeros(n + 1)
    total = 0.0
    for top in range(n + 1):
        # triples whose largest level equals top
        for j in range(top + 1):
            for k in range(top + 1):
                for m in range(top + 1):
                    if max(j, k, m) != top:
                        continue
                    c = triple_count(j, k, m, n, params.lattice)
                    if c:
                        total += c * t[j] * t[k] * t[m]
        partial[top] = total
    inc = np.zeros(n + 1)
    inc[1:] = np.diff(partial)
    return TriangleSum(float(partial[n]), partial, inc)
