"""Exact laws for tiny balls by enumerating every edge configuration.

Configurations are visited in Gray-code order so each step toggles a single
edge in the adjacency bitmasks.  The probability of a configuration is the
product of two precomputed half-tables, so it carries no accumulated drift,
and mass is accumulated per set partition with compensated summation.
"""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numba import njit

from .kernel import ModelParams, level_probs, tail_sum
from .lattice import LatticeParams

MAX_EDGES = 30
_LABEL_BITS = 3


def ball_pairs(base: int, n: int):
    """Unordered pairs of Lambda_n with their separation level."""
    N = base**n
    out = []
    for x in range(N):
        for y in range(x + 1, N):
            a, b, h = x, y, 0
            while a != b:
                a //= base
                b //= base
                h += 1
            out.append((x, y, h))
    return out


@njit(cache=True)
def _half_table(p, offset, count):
    # probability of every open/closed pattern over edges offset..offset+count-1
    size = 1 << count
    out = np.empty(size)
    for mask in range(size):
        prob = 1.0
        for i in range(count):
            if (mask >> i) & 1:
                prob *= p[offset + i]
            else:
                prob *= 1.0 - p[offset + i]
        out[mask] = prob
    return out


@njit(cache=True)
def _enumerate(N, eu, ev, p, acc, comp):
    E = len(eu)
    lo = E // 2
    hi = E - lo
    plo = _half_table(p, 0, lo)
    phi = _half_table(p, lo, hi)
    lomask = (1 << lo) - 1
    adj = np.zeros(N, dtype=np.int64)
    labels = np.empty(N, dtype=np.int64)
    g = 0
    total = 1 << E
    for c in range(total):
        if c > 0:
            # bit that flips between Gray codes c-1 and c
            t = 0
            while not (c >> t) & 1:
                t += 1
            g ^= 1 << t
            a = eu[t]
            b = ev[t]
            adj[a] ^= 1 << b
            adj[b] ^= 1 << a
        prob = plo[g & lomask] * phi[g >> lo]
        for x in range(N):
            labels[x] = -1
        nxt = 0
        for x in range(N):
            if labels[x] >= 0:
                continue
            comp_mask = 1 << x
            frontier = comp_mask
            while frontier:
                reach = 0
                f = frontier
                while f:
                    low = f & (-f)
                    i = 0
                    while (low >> i) != 1:
                        i += 1
                    reach |= adj[i]
                    f ^= low
                frontier = reach & ~comp_mask
                comp_mask |= reach
            m = comp_mask
            while m:
                low = m & (-m)
                i = 0
                while (low >> i) != 1:
                    i += 1
                labels[i] = nxt
                m ^= low
            nxt += 1
        code = 0
        for x in range(1, N):
            code |= labels[x] << (3 * (x - 1))
        # Kahan step
        y = prob - comp[code]
        s = acc[code] + y
        comp[code] = (s - acc[code]) - y
        acc[code] = s


def _decode_labels(code: int, N: int) -> tuple[int, ...]:
    return (0,) + tuple((code >> (_LABEL_BITS * (x - 1))) & 7 for x in range(1, N))


@dataclass
class ExactLaw:
    """Exact law of the set partition of Lambda_n, with derived observables."""

    N: int
    base: int
    n: int
    partitions: dict  # label tuple -> probability

    @property
    def total_mass(self) -> float:
        return math.fsum(self.partitions.values())

    def _law(self, fn) -> dict:
        out = defaultdict(list)
        for labels, prob in self.partitions.items():
            out[fn(labels)].append(prob)
        return {k: math.fsum(v) for k, v in sorted(out.items())}

    def multiset_law(self) -> dict:
        def sizes(labels):
            counts = np.bincount(labels)
            return tuple(sorted(counts.tolist(), reverse=True))

        return self._law(sizes)

    def root_law(self) -> dict:
        return self._law(lambda lab: sum(1 for v in lab if v == lab[0]))

    def max_law(self) -> dict:
        return self._law(lambda lab: int(np.bincount(lab).max()))

    def connection(self, x: int, y: int) -> float:
        return math.fsum(p for lab, p in self.partitions.items() if lab[x] == lab[y])

    def connection_matrix(self) -> np.ndarray:
        out = np.eye(self.N)
        for x in range(self.N):
            for y in range(x + 1, self.N):
                out[x, y] = out[y, x] = self.connection(x, y)
        return out

    def mean_root_size(self) -> float:
        return math.fsum(k * p for k, p in self.root_law().items())

    def mean_census(self) -> float:
        """E[sum_C |C|^2] / |Lambda_n|."""
        terms = []
        for labels, prob in self.partitions.items():
            counts = np.bincount(labels)
            terms.append(prob * float((counts**2).sum()))
        return math.fsum(terms) / self.N

    def max_quantile(self) -> int:
        """Smallest m >= 1 with P(|K^max| >= m) <= 1/e."""
        law = self.max_law()
        m = 1
        while math.fsum(p for k, p in law.items() if k >= m) > math.exp(-1):
            m += 1
        return m

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["observable", "value", "probability"])
        for k, p in self.multiset_law().items():
            w.writerow(["multiset", " ".join(map(str, k)), f"{p:.17g}"])
        for k, p in self.root_law().items():
            w.writerow(["kroot", k, f"{p:.17g}"])
        for k, p in self.max_law().items():
            w.writerow(["kmax", k, f"{p:.17g}"])
        for x in range(1, self.N):
            w.writerow([f"connect_0_{x}", 1, f"{self.connection(0, x):.17g}"])
        return buf.getvalue()


def enumerate_exact(params: ModelParams, n: int) -> ExactLaw:
    base = params.base
    N = base**n
    pairs = ball_pairs(base, n)
    if len(pairs) > MAX_EDGES:
        raise ValueError(f"{len(pairs)} pairs exceed the enumeration limit of {MAX_EDGES}")
    probs = level_probs(params, n)
    eu = np.array([x for x, _, _ in pairs], dtype=np.int64)
    ev = np.array([y for _, y, _ in pairs], dtype=np.int64)
    p = np.array([probs[h] for _, _, h in pairs], dtype=np.float64)
    nbins = 1 << (_LABEL_BITS * max(N - 1, 0))
    acc = np.zeros(nbins)
    comp = np.zeros(nbins)
    if N == 1:
        return ExactLaw(1, base, n, {(0,): 1.0})
    _enumerate(N, eu, ev, p, acc, comp)
    parts = {_decode_labels(int(code), N): float(acc[code]) for code in np.flatnonzero(acc)}
    return ExactLaw(N, base, n, parts)


def exact_phi(params: ModelParams, n: int) -> float:
    """phi_beta(Lambda_n) = E|K_n| * T_n(beta), using |y - x| = |y| outside the ball."""
    law = enumerate_exact(params, n)
    return law.mean_root_size() * tail_sum(n, params).value


def connected_set_law(params: ModelParams, n: int, exact: bool = False) -> dict:
    """Law of K_n(0) via the connected-subgraph recursion (independent of enumeration).

    P(S connected) = 1 - sum_{T proper, 0' in T} P(T connected) * prod_{i in T, j in S-T} q_ij
    where 0' is the smallest element of S.  Returns {frozenset: probability}.
    With ``exact`` the edge probabilities are treated as exact binary fractions.
    """
    base = params.base
    N = base**n
    probs = level_probs(params, n)
    q = {}
    for x, y, h in ball_pairs(base, n):
        val = Fraction(1.0 - probs[h]) if exact else 1.0 - probs[h]
        q[(x, y)] = q[(y, x)] = val
    one = Fraction(1) if exact else 1.0
    conn = {}

    def cut(T, S):
        prod = one
        for i in T:
            for j in S:
                if j not in T:
                    prod *= q[(i, j)]
        return prod

    def connected(S):
        if S in conn:
            return conn[S]
        if len(S) == 1:
            conn[S] = one
            return one
        first = min(S)
        rest = sorted(S - {first})
        total = one
        for mask in range(2 ** len(rest) - 1):
            T = frozenset([first] + [rest[i] for i in range(len(rest)) if (mask >> i) & 1])
            total -= connected(T) * cut(T, S)
        conn[S] = total
        return total

    everything = frozenset(range(N))
    law = {}
    others = list(range(1, N))
    for mask in range(2 ** len(others)):
        S = frozenset([0] + [others[i] for i in range(len(others)) if (mask >> i) & 1])
        law[S] = connected(S) * cut(S, everything)
    return law


def lattice_of(params: ModelParams) -> LatticeParams:
    return params.lattice
