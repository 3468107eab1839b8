"""Direct sampler: independent edges on the whole ball, merged by union-find.

For each level k the number of open pairs at distance L^k is drawn from its
binomial law and that many distinct pairs are placed uniformly (repeats are
rejected and redrawn).  Levels are processed in increasing order, so after
level m the forest holds the clusters restricted to every level-m sub-ball.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .. import rng
from ..kernel import ModelParams, level_probs
from ._uf import canonical_labels, uf_find, uf_init, uf_union

DEFAULT_EDGE_BUDGET = 50_000_000


@dataclass
class ClusterPartition:
    """Disjoint-set forest over Lambda_n, indexed by packed point index."""

    parent: np.ndarray
    size: np.ndarray
    open_edges: np.ndarray  # per level, entry 0 unused
    n: int
    base: int
    marks: list = field(default_factory=list)

    @property
    def num_points(self) -> int:
        return len(self.parent)

    def find(self, x: int) -> int:
        return int(uf_find(self.parent, x))

    def connected(self, x: int, y: int) -> bool:
        return self.find(x) == self.find(y)

    def labels(self) -> np.ndarray:
        out = np.empty(self.num_points, dtype=np.int64)
        canonical_labels(self.parent, self.num_points, out)
        return out

    def component_sizes(self) -> np.ndarray:
        """Sizes of all components, descending."""
        roots = np.array([self.find(x) for x in range(self.num_points)])
        return np.sort(np.bincount(roots)[np.unique(roots)])[::-1]

    def cluster_size(self, x: int) -> int:
        return int(self.size[self.find(x)])

    @property
    def max_size(self) -> int:
        return int(self.component_sizes()[0])

    def marked_sizes(self) -> list[int]:
        return [self.cluster_size(x) for x in self.marks]


@njit(cache=True)
def _sample_level(state, parent, size, B, N, k, p):
    # returns the number of open pairs placed at distance L^k
    low = np.int64(1)
    for _ in range(k - 1):
        low *= B
    npairs = float(N) * float(low * (B - 1)) / 2.0
    count = rng.binomial(state, npairs, p)
    if count == 0:
        return 0
    seen = {np.int64(0): True}
    seen.clear()
    placed = 0
    while placed < count:
        x = rng.randbelow(state, N)
        dk = (x // low) % B
        nd = (dk + 1 + rng.randbelow(state, B - 1)) % B
        y = x - (x % (low * B)) + nd * low + rng.randbelow(state, low)
        if x < y:
            code = x * N + y
        else:
            code = y * N + x
        if code in seen:
            continue
        seen[code] = True
        placed += 1
        uf_union(parent, size, x, y)
    return count


@njit(cache=True)
def _direct_fill(state, parent, size, edges, B, n, probs):
    N = np.int64(1)
    for _ in range(n):
        N *= B
    uf_init(parent, size, N)
    for k in range(1, n + 1):
        edges[k] = _sample_level(state, parent, size, B, N, k, probs[k])


def _ball_size(params: ModelParams, n: int) -> int:
    return params.base**n


def check_budget(params: ModelParams, n: int, edge_budget: int = DEFAULT_EDGE_BUDGET) -> float:
    """Expected open edges in Lambda_n; raises if above the memory budget."""
    N = _ball_size(params, n)
    probs = level_probs(params, n)
    B = params.base
    expected = sum(N * (B**k - B ** (k - 1)) / 2 * probs[k] for k in range(1, n + 1))
    if expected > edge_budget:
        raise MemoryError(f"expected {expected:.3g} open edges exceeds budget {edge_budget}")
    if N >= 2**31:
        raise MemoryError(f"ball of {N} points is not addressable")
    return expected


def direct_sample(params: ModelParams, n: int, key: int, marks=(), edge_budget: int = DEFAULT_EDGE_BUDGET) -> ClusterPartition:
    """One exact sample of the cluster partition of Lambda_n.

    ``key`` is a 64-bit replicate stream key (see :mod:`hierperc.rng`).
    """
    check_budget(params, n, edge_budget)
    N = _ball_size(params, n)
    parent = np.empty(N, dtype=np.int64)
    size = np.empty(N, dtype=np.int64)
    edges = np.zeros(n + 1, dtype=np.int64)
    state = rng.new_state(np.uint64(key))
    _direct_fill(state, parent, size, edges, params.base, n, level_probs(params, n))
    return ClusterPartition(parent, size, edges, n, params.base, list(marks))


@njit(cache=True)
def direct_batch(B, n, probs, base_key, start, stop, want_labels):
    """Replicates [start, stop): root size, max size, sum of squared sizes, open edges.

    With ``want_labels`` the canonical component labels of every point are
    returned too (only sensible for tiny balls).
    """
    N = np.int64(1)
    for _ in range(n):
        N *= B
    reps = stop - start
    kroot = np.empty(reps, dtype=np.int64)
    kmax = np.empty(reps, dtype=np.int64)
    sumsq = np.empty(reps, dtype=np.int64)
    nedges = np.empty(reps, dtype=np.int64)
    labels = np.empty((reps if want_labels else 0, N), dtype=np.int8)
    lab = np.empty(N, dtype=np.int64)
    parent = np.empty(N, dtype=np.int64)
    size = np.empty(N, dtype=np.int64)
    edges = np.zeros(n + 1, dtype=np.int64)
    state = np.empty(4, dtype=np.uint64)
    for r in range(reps):
        rng.seed_state(state, rng.replicate_key(base_key, start + r))
        _direct_fill(state, parent, size, edges, B, n, probs)
        kroot[r] = size[uf_find(parent, 0)]
        mx = 0
        sq = 0
        for x in range(N):
            if parent[x] == x:
                s = size[x]
                sq += s * s
                if s > mx:
                    mx = s
        kmax[r] = mx
        sumsq[r] = sq
        nedges[r] = edges.sum()
        if want_labels:
            canonical_labels(parent, N, lab)
            for x in range(N):
                labels[r, x] = lab[x]
    return kroot, kmax, sumsq, nedges, labels


@njit(cache=True)
def _pair_counts(roots, N, B, m, cnt, out):
    # out[k] = ordered pairs (x != y) at distance exactly L^k in the same cluster, k <= m
    prev = N  # level 0: every point with itself
    blk = np.int64(1)
    for k in range(1, m + 1):
        blk *= B
        total = 0
        for b0 in range(0, N, blk):
            for x in range(b0, b0 + blk):
                c = cnt[roots[x]]
                total += 2 * c + 1
                cnt[roots[x]] = c + 1
            for x in range(b0, b0 + blk):
                cnt[roots[x]] = 0
        out[k] = total - prev
        prev = total


@njit(cache=True)
def direct_levels_batch(B, n, probs, base_key, start, stop, reps_idx, pair_snaps):
    """Per replicate and per snapshot level m = 0..n (clusters restricted to level-m blocks).

    Returns
      kroot[r, m]   |K_m(0)|
      sumsq[r, m]   sum over all clusters of all level-m blocks of |C|^2
      kmax0[r, m]   largest cluster inside the block Lambda_m(0)
      rep[r, m, k]  1 if 0 and reps_idx[k] are connected inside Lambda_m (k <= m)
      pairs[r, m, k] connected ordered pairs at distance L^k (only where pair_snaps[m])
      edges[r, k]   open pairs placed at level k
    """
    N = np.int64(1)
    for _ in range(n):
        N *= B
    reps = stop - start
    kroot = np.zeros((reps, n + 1), dtype=np.int64)
    sumsq = np.zeros((reps, n + 1), dtype=np.int64)
    kmax0 = np.zeros((reps, n + 1), dtype=np.int64)
    rep = np.zeros((reps, n + 1, n + 1), dtype=np.int8)
    pairs = np.zeros((reps, n + 1, n + 1), dtype=np.int64)
    edges = np.zeros((reps, n + 1), dtype=np.int64)
    parent = np.empty(N, dtype=np.int64)
    size = np.empty(N, dtype=np.int64)
    roots = np.empty(N, dtype=np.int64)
    cnt = np.zeros(N, dtype=np.int64)
    state = np.empty(4, dtype=np.uint64)
    for r in range(reps):
        rng.seed_state(state, rng.replicate_key(base_key, start + r))
        uf_init(parent, size, N)
        blk = np.int64(1)
        for m in range(0, n + 1):
            if m > 0:
                blk *= B
                edges[r, m] = _sample_level(state, parent, size, B, N, m, probs[m])
            r0 = uf_find(parent, 0)
            kroot[r, m] = size[r0]
            sq = 0
            for x in range(N):
                if parent[x] == x:
                    sq += size[x] * size[x]
            sumsq[r, m] = sq
            mx = 0
            for x in range(blk):
                s = size[uf_find(parent, x)]
                if s > mx:
                    mx = s
            kmax0[r, m] = mx
            for k in range(0, m + 1):
                if uf_find(parent, reps_idx[k]) == r0:
                    rep[r, m, k] = 1
            if pair_snaps[m]:
                for x in range(N):
                    roots[x] = uf_find(parent, x)
                _pair_counts(roots, N, B, m, cnt, pairs[r, m])
    return kroot, sumsq, kmax0, rep, pairs, edges


@njit(cache=True)
def direct_records(B, n, probs, base_key, start, stop, marks):
    """Per replicate: root size, max size, marks connected to the origin, open edges per level."""
    N = np.int64(1)
    for _ in range(n):
        N *= B
    reps = stop - start
    kroot = np.empty(reps, dtype=np.int64)
    kmax = np.empty(reps, dtype=np.int64)
    conn = np.zeros((reps, len(marks)), dtype=np.bool_)
    edges = np.zeros((reps, n + 1), dtype=np.int64)
    parent = np.empty(N, dtype=np.int64)
    size = np.empty(N, dtype=np.int64)
    state = np.empty(4, dtype=np.uint64)
    for r in range(reps):
        rng.seed_state(state, rng.replicate_key(base_key, start + r))
        _direct_fill(state, parent, size, edges[r], B, n, probs)
        r0 = uf_find(parent, 0)
        kroot[r] = size[r0]
        mx = 0
        for x in range(N):
            if parent[x] == x and size[x] > mx:
                mx = size[x]
        kmax[r] = mx
        for i in range(len(marks)):
            conn[r, i] = uf_find(parent, marks[i]) == r0
    return kroot, kmax, conn, edges
