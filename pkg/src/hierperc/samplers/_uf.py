import numpy as np
from numba import njit


@njit(cache=True)
def uf_init(parent, size, n):
    for i in range(n):
        parent[i] = i
        size[i] = 1


@njit(cache=True)
def uf_find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True)
def uf_union(parent, size, a, b):
    ra = uf_find(parent, a)
    rb = uf_find(parent, b)
    if ra == rb:
        return False
    if size[ra] < size[rb]:
        ra, rb = rb, ra
    parent[rb] = ra
    size[ra] += size[rb]
    return True


@njit(cache=True)
def canonical_labels(parent, n, out):
    """Relabel components by first occurrence: out[0] = 0, new labels increase."""
    seen = np.full(n, -1, dtype=np.int64)
    nxt = 0
    for x in range(n):
        r = uf_find(parent, x)
        if seen[r] < 0:
            seen[r] = nxt
            nxt += 1
        out[x] = seen[r]
    return nxt
