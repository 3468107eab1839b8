"""Recursive sampler over the size census of nested blocks.

A level-(t+1) block is L^d independent level-t blocks.  Two clusters C, C'
sitting in different sub-blocks are joined by at least one edge with
probability 1 - exp(-beta J_{t+1} |C| |C'|), independently over cluster
pairs, because every cross pair is at distance exactly L^(t+1).  The merge
graph is drawn size pair by size pair: a binomial number of joined pairs,
placed uniformly among the eligible cross-block cluster pairs.

Only the size census and the marked clusters of finished blocks are kept;
memberships are never stored.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .. import rng
from ..kernel import J_level, LevelTable, ModelParams
from ._uf import uf_find, uf_union

_ENUMERATE_BELOW = 32


@dataclass
class ClusterMultiset:
    """Size census of Lambda_level plus the clusters of the marked points."""

    census: dict  # size -> multiplicity
    marks: list  # packed indices of the marked points, in the order given
    mark_size: list
    mark_group: list  # equal handles <=> same cluster
    level: int

    @property
    def total_points(self) -> int:
        return sum(s * c for s, c in self.census.items())

    @property
    def max_size(self) -> int:
        return max(self.census)

    def sum_squares(self) -> int:
        return sum(s * s * c for s, c in self.census.items())

    def co_clustered(self, i: int, j: int) -> bool:
        return self.mark_group[i] == self.mark_group[j]


@njit(cache=True)
def _merge(B, w, st, rsize, rcount, rgroup, rchild, lo, hi, gparent, gsize, out_size, out_count, out_group, sc, seen):
    """Merge census rows [lo, hi) of B sibling blocks; returns number of output rows.

    ``sc`` is a (9, cap) int64 scratch array, ``seen`` a reusable int dict.
    """
    ssize, schild, sgroup, off, parent, comp, total, cgroup, plain = sc[0], sc[1], sc[2], sc[3], sc[4], sc[5], sc[6], sc[7], sc[8]
    # expand rows into one slot per cluster, ordered by size
    order = np.argsort(rsize[lo:hi], kind="mergesort")
    K = 0
    for oi in range(hi - lo):
        i = lo + order[oi]
        for _ in range(rcount[i]):
            ssize[K] = rsize[i]
            schild[K] = rchild[i]
            sgroup[K] = rgroup[i]
            K += 1
    nd = 0
    for i in range(K):
        if i == 0 or ssize[i] != ssize[i - 1]:
            off[nd] = i
            nd += 1
    off[nd] = K
    cnt = np.zeros((nd, B), dtype=np.int64)
    for a in range(nd):
        for i in range(off[a], off[a + 1]):
            cnt[a, schild[i]] += 1
    for i in range(K):
        parent[i] = i
        comp[i] = 1
    for a in range(nd):
        sa = ssize[off[a]]
        na = off[a + 1] - off[a]
        for b in range(a, nd):
            sb = ssize[off[b]]
            nb = off[b + 1] - off[b]
            if a == b:
                same = 0
                for c in range(B):
                    same += cnt[a, c] * cnt[a, c]
                npairs = (na * na - same) // 2
            else:
                npairs = 0
                for c in range(B):
                    npairs += cnt[a, c] * (nb - cnt[b, c])
            if npairs == 0:
                continue
            q = -np.expm1(-w * float(sa) * float(sb))
            if q >= 0.5 or npairs <= _ENUMERATE_BELOW:
                for x in range(off[a], off[a + 1]):
                    y0 = x + 1 if a == b else off[b]
                    for y in range(y0, off[b + 1]):
                        if schild[x] != schild[y] and rng.uniform(st) < q:
                            uf_union(parent, comp, x, y)
                continue
            count = rng.binomial(st, float(npairs), q)
            seen.clear()
            placed = 0
            while placed < count:
                x = off[a] + rng.randbelow(st, na)
                y = off[b] + rng.randbelow(st, nb)
                if schild[x] == schild[y]:
                    continue
                if x > y:
                    x, y = y, x
                code = x * K + y
                if code in seen:
                    continue
                seen[code] = True
                placed += 1
                uf_union(parent, comp, x, y)
    # sizes and mark groups of the merged components
    for i in range(K):
        total[i] = 0
        cgroup[i] = -1
    for i in range(K):
        r = uf_find(parent, i)
        total[r] += ssize[i]
        g = sgroup[i]
        if g >= 0:
            if cgroup[r] < 0:
                cgroup[r] = g
            else:
                ga = uf_find(gparent, cgroup[r])
                gb = uf_find(gparent, g)
                if ga != gb:
                    if gb < ga:
                        ga, gb = gb, ga
                    gparent[gb] = ga
                cgroup[r] = ga
    nout = 0
    npl = 0
    for i in range(K):
        if parent[i] != i:
            continue
        if cgroup[i] >= 0:
            g = uf_find(gparent, cgroup[i])
            gsize[g] = total[i]
            out_size[nout] = total[i]
            out_count[nout] = 1
            out_group[nout] = g
            nout += 1
        else:
            plain[npl] = total[i]
            npl += 1
    plain[:npl].sort()
    i = 0
    while i < npl:
        j = i
        while j < npl and plain[j] == plain[i]:
            j += 1
        out_size[nout] = plain[i]
        out_count[nout] = j - i
        out_group[nout] = -1
        nout += 1
        i = j
    return nout


@njit(cache=True)
def _recursive_core(st, B, n, weights, marks, rsize, rcount, rgroup, rchild, gparent, gsize, tmp_size, tmp_count, tmp_group, sc, seen):
    """Fills the row stack with the census of Lambda_n; returns number of rows."""
    N = np.int64(1)
    for _ in range(n):
        N *= B
    nm = len(marks)
    for g in range(nm):
        gparent[g] = g
        gsize[g] = 1
    gstart = np.empty(n * (B - 1) + 2, dtype=np.int64)
    glevel = np.empty(n * (B - 1) + 2, dtype=np.int64)
    gtop = 0
    top = 0
    mi = 0
    for x in range(N):
        g = -1
        while mi < nm and marks[mi] == x:
            # repeated marks share the group of the first occurrence
            if g < 0:
                g = mi
            else:
                gparent[mi] = g
            mi += 1
        rsize[top] = 1
        rcount[top] = 1
        rgroup[top] = g
        gstart[gtop] = top
        glevel[gtop] = 0
        top += 1
        gtop += 1
        while gtop >= B:
            t = glevel[gtop - 1]
            if t >= n:
                break
            full = True
            for i in range(gtop - B, gtop):
                if glevel[i] != t:
                    full = False
                    break
            if not full:
                break
            base = gstart[gtop - B]
            for c in range(B):
                a = gstart[gtop - B + c]
                b = gstart[gtop - B + c + 1] if c < B - 1 else top
                for i in range(a, b):
                    rchild[i] = c
            nout = _merge(B, weights[t + 1], st, rsize, rcount, rgroup, rchild, base, top, gparent, gsize, tmp_size, tmp_count, tmp_group, sc, seen)
            for i in range(nout):
                rsize[base + i] = tmp_size[i]
                rcount[base + i] = tmp_count[i]
                rgroup[base + i] = tmp_group[i]
            top = base + nout
            gtop -= B
            gstart[gtop] = base
            glevel[gtop] = t + 1
            gtop += 1
    return top


def _weights(params: ModelParams, n: int) -> np.ndarray:
    if isinstance(params.kernel, LevelTable) and getattr(params.kernel, "radial", True) is False:
        raise ValueError("recursive sampler requires a radially symmetric kernel")
    w = np.zeros(n + 1)
    for t in range(1, n + 1):
        w[t] = params.beta * J_level(t, params)
    return w


def _buffers(N: int, nm: int):
    cap = N + 1
    return (
        np.empty(cap, dtype=np.int64),
        np.empty(cap, dtype=np.int64),
        np.empty(cap, dtype=np.int64),
        np.empty(cap, dtype=np.int64),
        np.empty(max(nm, 1), dtype=np.int64),
        np.empty(max(nm, 1), dtype=np.int64),
        np.empty(cap, dtype=np.int64),
        np.empty(cap, dtype=np.int64),
        np.empty(cap, dtype=np.int64),
        np.empty((9, cap + 1), dtype=np.int64),
    )


@njit(cache=True)
def _int_dict():
    seen = {np.int64(0): True}
    seen.clear()
    return seen


def recursive_cluster_sample(params: ModelParams, n: int, marks, key: int) -> ClusterMultiset:
    """One exact sample of the cluster census of Lambda_n with marked points.

    ``marks`` are packed point indices (or objects with ``.index()``).
    """
    N = params.base**n
    mark_list = [m.index() if hasattr(m, "index") and callable(m.index) else int(m) for m in marks]
    for m in mark_list:
        if not 0 <= m < N:
            raise ValueError(f"mark {m} lies outside Lambda_{n}")
    order = np.argsort(mark_list, kind="stable")
    sorted_marks = np.array(mark_list, dtype=np.int64)[order] if mark_list else np.empty(0, dtype=np.int64)
    bufs = _buffers(N, len(mark_list))
    st = rng.new_state(np.uint64(key))
    rows = _recursive_core(st, params.base, n, _weights(params, n), sorted_marks, *bufs, _int_dict())
    rsize, rcount, rgroup, _, gparent, gsize = bufs[:6]
    census: dict = {}
    for i in range(rows):
        census[int(rsize[i])] = census.get(int(rsize[i]), 0) + int(rcount[i])
    census = dict(sorted(census.items()))
    sizes = [0] * len(mark_list)
    groups = [0] * len(mark_list)
    for pos, original in enumerate(order):
        g = int(uf_find(gparent, pos))
        groups[original] = g
        sizes[original] = int(gsize[g])
    return ClusterMultiset(census, mark_list, sizes, groups, n)


@njit(cache=True)
def recursive_batch(B, n, weights, marks, base_key, start, stop, want_multiset):
    """Replicates [start, stop): root-mark size, max, sum of squares, mark groups.

    ``marks`` must be sorted; mark 0 is expected to be the origin.  Groups are
    canonical labels (first occurrence order over the marks).
    """
    N = np.int64(1)
    for _ in range(n):
        N *= B
    nm = len(marks)
    reps = stop - start
    cap = N + 1
    rsize = np.empty(cap, dtype=np.int64)
    rcount = np.empty(cap, dtype=np.int64)
    rgroup = np.empty(cap, dtype=np.int64)
    rchild = np.empty(cap, dtype=np.int64)
    gparent = np.empty(max(nm, 1), dtype=np.int64)
    gsize = np.empty(max(nm, 1), dtype=np.int64)
    tmp_size = np.empty(cap, dtype=np.int64)
    tmp_count = np.empty(cap, dtype=np.int64)
    tmp_group = np.empty(cap, dtype=np.int64)
    kroot = np.empty(reps, dtype=np.int64)
    kmax = np.empty(reps, dtype=np.int64)
    sumsq = np.empty(reps, dtype=np.int64)
    mgroup = np.empty((reps, nm), dtype=np.int8)
    msize = np.empty((reps, nm), dtype=np.int64)
    multiset = np.zeros((reps if want_multiset else 0, N), dtype=np.int64)
    relabel = np.empty(max(nm, 1), dtype=np.int64)
    sc = np.empty((9, cap + 1), dtype=np.int64)
    seen = _int_dict()
    st = np.empty(4, dtype=np.uint64)
    for r in range(reps):
        rng.seed_state(st, rng.replicate_key(base_key, start + r))
        rows = _recursive_core(st, B, n, weights, marks, rsize, rcount, rgroup, rchild, gparent, gsize, tmp_size, tmp_count, tmp_group, sc, seen)
        mx = 0
        sq = 0
        for i in range(rows):
            sq += rsize[i] * rsize[i] * rcount[i]
            if rsize[i] > mx:
                mx = rsize[i]
        kmax[r] = mx
        sumsq[r] = sq
        for g in range(nm):
            relabel[g] = -1
        nxt = 0
        for i in range(nm):
            g = uf_find(gparent, i)
            if relabel[g] < 0:
                relabel[g] = nxt
                nxt += 1
            mgroup[r, i] = relabel[g]
            msize[r, i] = gsize[g]
        kroot[r] = msize[r, 0] if nm > 0 else 0
        if want_multiset:
            j = 0
            for i in range(rows):
                for _ in range(rcount[i]):
                    multiset[r, j] = rsize[i]
                    j += 1
            multiset[r, :j] = np.sort(multiset[r, :j])[::-1]
    return kroot, kmax, sumsq, mgroup, msize, multiset
