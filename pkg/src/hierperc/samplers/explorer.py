"""Breadth-first revelation of the origin's cluster, in a ball or in all of H^d_L.

Points are packed into W words of D base-B digits each (level 1 is the least
significant digit of word 0), which gives W*D addressable levels.

When vertex v is processed, its open edges into every annulus are drawn as if
all points of the annulus were candidates, and targets that were already
processed are discarded.  Restricting an i.i.d. Bernoulli field to a subset
leaves an i.i.d. field on that subset, so the kept targets are exactly a
Binomial(remaining, p) number of uniform picks among the remaining
candidates, and no pair is decided twice.  Levels are visited with
exponential clocks against suffix sums of the per-level hazards
beta J_k |annulus_k|, so only levels that carry an edge cost anything.
Processed vertices are exactly those discovered before v, because the queue
is the discovery order.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit

from .. import rng
from ..kernel import ModelParams, hazard_beyond, level_hazards, level_probs

WORDS = 4
INFINITE = -1

ERR_NONE = 0
ERR_LEVEL_OVERFLOW = 1


@dataclass
class ExplorationResult:
    size: int
    censored: bool  # True means the true size is >= size == cap
    visited: list  # packed indices (restricted) or digit tuples, discovery order
    edge_queries: int
    max_level: int


@dataclass(frozen=True)
class Layout:
    base: int
    digits_per_word: int
    kmax: int  # highest addressable level

    @classmethod
    def for_base(cls, base: int) -> "Layout":
        D = 1
        while base ** (D + 1) <= 2**62:
            D += 1
        return cls(base, D, WORDS * D)


# -- word-packed point helpers -------------------------------------------------


@njit(cache=True)
def _cmp(pts, i, j):
    for w in range(pts.shape[1] - 1, -1, -1):
        a = pts[i, w]
        b = pts[j, w]
        if a != b:
            return -1 if a < b else 1
    return 0


@njit(cache=True)
def _search(pts, order, cnt, i):
    # position of point i in sorted index list order[:cnt]; (pos, found)
    lo = 0
    hi = cnt
    while lo < hi:
        mid = (lo + hi) >> 1
        c = _cmp(pts, order[mid], i)
        if c < 0:
            lo = mid + 1
        elif c > 0:
            hi = mid
        else:
            return mid, True
    return lo, False


@njit(cache=True)
def _insert(order, cnt, pos, value):
    for k in range(cnt, pos, -1):
        order[k] = order[k - 1]
    order[pos] = value


@njit(cache=True)
def _set_target(pts, v, dst, k, B, D, powB, st):
    # dst := uniform point at distance exactly L^k from v
    W = pts.shape[1]
    q = (k - 1) // D
    r = k - 1 - q * D
    for w in range(W):
        if w > q:
            pts[dst, w] = pts[v, w]
        elif w < q:
            pts[dst, w] = rng.randbelow(st, powB[D])
    word = pts[v, q]
    pw = powB[r]
    dk = (word // pw) % B
    nd = (dk + 1 + rng.randbelow(st, B - 1)) % B
    high = word - word % (pw * B)
    pts[dst, q] = high + nd * pw + rng.randbelow(st, pw)


@njit(cache=True)
def _process(st, v, nv, B, D, powB, kmax, probs, suffix, cap, pts, visited, chosen, stats):
    """Reveal the edges of v towards unprocessed points; returns the new visited count.

    stats[0] accumulates decided pairs, stats[1] tracks the highest level used.
    """
    W = pts.shape[1]
    scratch = pts.shape[0] - 1
    s = 1
    while s <= kmax:
        e = rng.exponential(st)
        if e >= suffix[s]:
            break
        target = suffix[s] - e
        # smallest K >= s with suffix[K+1] <= target
        a = s
        b = kmax
        while a < b:
            mid = (a + b) >> 1
            if suffix[mid + 1] <= target:
                b = mid
            else:
                a = mid + 1
        K = a
        ann = float(B) ** K - float(B) ** (K - 1)
        c = rng.binomial_positive(st, ann, probs[K])
        nch = 0
        while nch < c:
            _set_target(pts, v, scratch, K, B, D, powB, st)
            dup = False
            for t in range(nch):
                if _cmp(pts, chosen[t], scratch) == 0:
                    dup = True
                    break
            if dup:
                continue
            pos, found = _search(pts, visited, nv, scratch)
            if found:
                chosen[nch] = visited[pos]
                nch += 1
                if visited[pos] < v:
                    continue  # pair decided when that vertex was processed
            else:
                for w in range(W):
                    pts[nv, w] = pts[scratch, w]
                _insert(visited, nv, pos, nv)
                chosen[nch] = nv
                nch += 1
                nv += 1
            stats[0] += 1
            if K > stats[1]:
                stats[1] = K
            if nv >= cap:
                return nv
        s = K + 1
    return nv


@njit(cache=True)
def _explore(st, B, D, powB, kmax, probs, suffix, tail, cap, pts, visited, chosen):
    """Explore K(0).  Returns (size, censored, queries, max_level, error)."""
    for w in range(pts.shape[1]):
        pts[0, w] = 0
    visited[0] = 0
    nv = 1
    v = 0
    stats = np.zeros(2, dtype=np.int64)
    while v < nv:
        nv = _process(st, v, nv, B, D, powB, kmax, probs, suffix, cap, pts, visited, chosen, stats)
        if nv >= cap:
            return nv, True, stats[0], stats[1], ERR_NONE
        if tail > 0.0 and rng.exponential(st) < tail:
            return nv, False, stats[0], stats[1], ERR_LEVEL_OVERFLOW
        v += 1
    return nv, False, stats[0], stats[1], ERR_NONE


@njit(cache=True)
def _explore_ball(st, B, D, powB, n, probs, suffix, pts, visited, chosen, labels):
    """Explore every cluster of Lambda_n (n <= D), seeding each at the smallest
    unvisited point.  labels[x] gets the cluster number of packed point x, in
    order of first occurrence.  Returns the number of decided pairs."""
    N = powB[n]
    scratch = pts.shape[0] - 1
    stats = np.zeros(2, dtype=np.int64)
    nv = 0
    seed = 0
    cluster = 0
    while nv < N:
        while True:
            pts[scratch, 0] = seed
            pos, found = _search(pts, visited, nv, scratch)
            if not found:
                break
            seed += 1
        pts[nv, 0] = seed
        _insert(visited, nv, pos, nv)
        first = nv
        nv += 1
        v = first
        while v < nv:
            nv = _process(st, v, nv, B, D, powB, n, probs, suffix, N + 1, pts, visited, chosen, stats)
            v += 1
        for i in range(first, nv):
            labels[pts[i, 0]] = cluster
        cluster += 1
    return stats[0]


def _tables(params: ModelParams, restriction: int):
    layout = Layout.for_base(params.base)
    if restriction == INFINITE:
        kmax = layout.kmax
        tail = hazard_beyond(params, kmax)
    else:
        if restriction > layout.kmax:
            raise ValueError(f"ball level {restriction} exceeds the {layout.kmax} addressable levels")
        kmax = restriction
        tail = 0.0
    hz = level_hazards(params, kmax)
    suffix = np.zeros(kmax + 2)
    for k in range(kmax, 0, -1):
        suffix[k] = suffix[k + 1] + hz[k]
    powB = np.array([params.base**p for p in range(layout.digits_per_word + 1)], dtype=np.int64)
    return layout, kmax, level_probs(params, kmax), suffix, tail, powB


def _workspace(cap: int):
    pts = np.zeros((cap + 1, WORDS), dtype=np.int64)
    visited = np.zeros(cap + 1, dtype=np.int64)
    chosen = np.zeros(cap + 1, dtype=np.int64)
    return pts, visited, chosen


def _check(params: ModelParams, restriction: int, cap: int, divergence_guard):
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if restriction == INFINITE and divergence_guard is not None and params.beta > divergence_guard:
        raise RuntimeError(f"beta={params.beta} exceeds the divergence guard {divergence_guard} for infinite-volume exploration")


def _unpack(row, layout: Layout) -> tuple[int, ...]:
    digits = []
    for word in row:
        for _ in range(layout.digits_per_word):
            digits.append(int(word % layout.base))
            word //= layout.base
    while digits and digits[-1] == 0:
        digits.pop()
    return tuple(digits)


def explore_root_cluster(params: ModelParams, restriction: int, cap: int, key: int, divergence_guard=None) -> ExplorationResult:
    """Reveal K(0) inside Lambda_restriction, or everywhere with restriction=INFINITE."""
    _check(params, restriction, cap, divergence_guard)
    layout, kmax, probs, suffix, tail, powB = _tables(params, restriction)
    ws = _workspace(cap)
    st = rng.new_state(np.uint64(key))
    size, censored, queries, maxlev, err = _explore(st, params.base, layout.digits_per_word, powB, kmax, probs, suffix, tail, cap, *ws)
    if err == ERR_LEVEL_OVERFLOW:
        raise OverflowError(f"an edge beyond the {layout.kmax} addressable levels was drawn")
    pts = ws[0]
    if restriction == INFINITE:
        visited = [_unpack(pts[i], layout) for i in range(size)]
    else:
        visited = [sum(int(pts[i, w]) * layout.base ** (w * layout.digits_per_word) for w in range(WORDS)) for i in range(size)]
    return ExplorationResult(int(size), bool(censored), visited, int(queries), int(maxlev))


@njit(cache=True)
def _explore_batch(B, D, powB, kmax, probs, suffix, tail, cap, base_key, start, stop, pts, visited, chosen):
    reps = stop - start
    sizes = np.empty(reps, dtype=np.int64)
    censored = np.empty(reps, dtype=np.bool_)
    queries = np.empty(reps, dtype=np.int64)
    maxlev = np.empty(reps, dtype=np.int64)
    errors = np.zeros(reps, dtype=np.int64)
    st = np.empty(4, dtype=np.uint64)
    for r in range(reps):
        rng.seed_state(st, rng.replicate_key(base_key, start + r))
        s, c, q, m, e = _explore(st, B, D, powB, kmax, probs, suffix, tail, cap, pts, visited, chosen)
        sizes[r] = s
        censored[r] = c
        queries[r] = q
        maxlev[r] = m
        errors[r] = e
    return sizes, censored, queries, maxlev, errors


def explore_batch(params: ModelParams, restriction: int, cap: int, base_key: int, start: int, stop: int, divergence_guard=None):
    """Cluster sizes of replicates [start, stop); raises on a level overflow."""
    _check(params, restriction, cap, divergence_guard)
    layout, kmax, probs, suffix, tail, powB = _tables(params, restriction)
    ws = _workspace(cap)
    sizes, censored, queries, maxlev, errors = _explore_batch(
        params.base, layout.digits_per_word, powB, kmax, probs, suffix, tail, cap,
        np.uint64(base_key), start, stop, *ws,
    )
    if errors.any():
        raise OverflowError(f"an edge beyond the {layout.kmax} addressable levels was drawn")
    if restriction == INFINITE and len(sizes) and sizes.mean() > cap / 10:
        warnings.warn(f"mean explored size {sizes.mean():.1f} exceeds cap/10; beta may be supercritical", RuntimeWarning, stacklevel=2)
    return sizes, censored, queries, maxlev



@njit(cache=True)
def _explore_ball_batch(B, D, powB, n, probs, suffix, base_key, start, stop, pts, visited, chosen):
    N = powB[n]
    reps = stop - start
    labels = np.zeros((reps, N), dtype=np.int8)
    lab = np.zeros(N, dtype=np.int64)
    queries = np.empty(reps, dtype=np.int64)
    st = np.empty(4, dtype=np.uint64)
    for r in range(reps):
        rng.seed_state(st, rng.replicate_key(base_key, start + r))
        queries[r] = _explore_ball(st, B, D, powB, n, probs, suffix, pts, visited, chosen, lab)
        for x in range(N):
            labels[r, x] = lab[x]
    return labels, queries


def explore_ball_batch(params: ModelParams, n: int, base_key: int, start: int, stop: int):
    """Canonical cluster labels of every point of Lambda_n, by exploring cluster after cluster."""
    layout, kmax, probs, suffix, _, powB = _tables(params, n)
    if n > layout.digits_per_word or params.base**n > 127:
        raise ValueError("whole-ball exploration is limited to balls of at most 127 points")
    ws = _workspace(params.base**n + 1)
    return _explore_ball_batch(params.base, layout.digits_per_word, powB, n, probs, suffix, np.uint64(base_key), start, stop, *ws)
