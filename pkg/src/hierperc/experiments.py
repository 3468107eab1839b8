"""Pinned experiment settings shared by the scripts and the acceptance suite."""

from __future__ import annotations

from functools import lru_cache

from .estimators import BetacEstimate, betac_lower_bound, estimate_betac
from .kernel import ModelParams
from .lattice import LatticeParams

SEED = 20240601
BETAC_LEVELS = (4, 5, 6, 7, 8)
BETAC_REPLICATES = 20_000


def model(alpha: float, beta: float = 0.0, d: int = 1, L: int = 2, n: int = 0) -> ModelParams:
    return ModelParams(LatticeParams(d, L, n), alpha, beta)


@lru_cache(maxsize=None)
def critical_point(alpha: float, d: int = 1, L: int = 2, seed: int = SEED, replicates: int = BETAC_REPLICATES) -> BetacEstimate:
    """Crossing estimate of beta_c over levels 4..8, computed once per process."""
    params = model(alpha, d=d, L=L)
    lb = betac_lower_bound(params)
    return estimate_betac(params, BETAC_LEVELS, (lb, 10 * lb), replicates, seed)
