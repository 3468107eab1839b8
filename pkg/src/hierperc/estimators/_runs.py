"""Picklable shard runners shared by the estimators."""

from __future__ import annotations

from functools import partial

import numpy as np

from .. import rng
from ..kernel import ModelParams, level_probs
from ..parallel import concat_shards, map_shards
from ..samplers.direct import check_budget, direct_batch, direct_levels_batch
from ..samplers.explorer import explore_batch


def _direct_shard(B, n, probs, base_key, start, stop):
    kroot, kmax, sumsq, nedges, _ = direct_batch(B, n, probs, np.uint64(base_key), start, stop, False)
    return kroot, kmax, sumsq, nedges


def run_direct(params: ModelParams, n: int, replicates: int, seed: int, tag: str, workers: int = 1):
    """(kroot, kmax, sumsq, open_edges) per replicate on Lambda_n."""
    check_budget(params, n)
    fn = partial(_direct_shard, params.base, n, level_probs(params, n), rng.stream_key(seed, tag))
    return concat_shards(map_shards(fn, replicates, workers))


def _levels_shard(B, H, probs, base_key, reps_idx, pair_snaps, start, stop):
    return direct_levels_batch(B, H, probs, np.uint64(base_key), start, stop, reps_idx, pair_snaps)


def run_levels(params: ModelParams, host: int, replicates: int, seed: int, tag: str, reps_idx=None, pair_snaps=(), workers: int = 1):
    """Per-snapshot statistics of samples on Lambda_host (see direct_levels_batch)."""
    check_budget(params, host)
    if reps_idx is None:
        reps_idx = [0] + [params.base ** (k - 1) for k in range(1, host + 1)]
    idx = np.asarray(reps_idx, dtype=np.int64)
    if len(idx) != host + 1:
        raise ValueError("need one representative per level 0..host")
    snaps = np.zeros(host + 1, dtype=np.bool_)
    for m in pair_snaps:
        snaps[m] = True
    fn = partial(_levels_shard, params.base, host, level_probs(params, host), rng.stream_key(seed, tag), idx, snaps)
    return concat_shards(map_shards(fn, replicates, workers))


def _explore_shard(params, restriction, cap, base_key, guard, start, stop):
    return explore_batch(params, restriction, cap, base_key, start, stop, guard)


def run_explorer(params: ModelParams, restriction: int, cap: int, replicates: int, seed: int, tag: str, workers: int = 1, divergence_guard=None):
    fn = partial(_explore_shard, params, restriction, cap, rng.stream_key(seed, tag), divergence_guard)
    return concat_shards(map_shards(fn, replicates, workers))
