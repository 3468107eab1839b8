"""Replicate sharding.

Replicates are cut into fixed-size shards [start, stop) independent of the
worker count, and shard results are returned in shard order.  Since every
replicate owns its RNG stream, the merged output does not depend on how many
processes ran the shards.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable

import numpy as np

SHARD_SIZE = 25_000


def shard_bounds(total: int, shard_size: int = SHARD_SIZE) -> list[tuple[int, int]]:
    if total < 0:
        raise ValueError("total must be >= 0")
    return [(s, min(s + shard_size, total)) for s in range(0, total, shard_size)]


def map_shards(fn: Callable, total: int, workers: int = 1, shard_size: int = SHARD_SIZE) -> list:
    """[fn(start, stop) for each shard], in shard order; fn must be picklable."""
    bounds = shard_bounds(total, shard_size)
    if workers <= 1 or len(bounds) <= 1:
        return [fn(a, b) for a, b in bounds]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, a, b) for a, b in bounds]
        return [f.result() for f in futures]


def concat_shards(parts: list) -> tuple:
    """Concatenate tuples of arrays shard-wise along axis 0."""
    if not parts:
        return ()
    return tuple(np.concatenate([p[i] for p in parts], axis=0) for i in range(len(parts[0])))
