"""Sampler-versus-oracle comparison on tiny balls.

Every sampler is reduced to canonical cluster labels of all points of
Lambda_n (first-occurrence order), from which the root size, the maximum
cluster, each connection indicator and the full size multiset follow.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass
from functools import partial

import numpy as np

from . import rng
from .kernel import ModelParams, level_probs
from .oracle import ExactLaw, enumerate_exact
from .parallel import concat_shards, map_shards
from .samplers.direct import direct_batch
from .samplers.explorer import explore_ball_batch
from .samplers.recursive import _weights, recursive_batch

SAMPLERS = ("direct", "recursive", "explorer")
SIGMAS = 4.0


def _direct_labels(B, n, probs, key, start, stop):
    return (direct_batch(B, n, probs, np.uint64(key), start, stop, True)[4],)


def _recursive_labels(B, n, weights, key, start, stop):
    marks = np.arange(B**n, dtype=np.int64)
    return (recursive_batch(B, n, weights, marks, np.uint64(key), start, stop, False)[3],)


def _explorer_labels(params, n, key, start, stop):
    return (explore_ball_batch(params, n, key, start, stop)[0],)


def sampler_labels(params: ModelParams, n: int, sampler: str, replicates: int, seed: int, workers: int = 1) -> np.ndarray:
    key = rng.stream_key(seed, f"oracle-check:{sampler}:{n}")
    B = params.base
    if sampler == "direct":
        fn = partial(_direct_labels, B, n, level_probs(params, n), key)
    elif sampler == "recursive":
        fn = partial(_recursive_labels, B, n, _weights(params, n), key)
    elif sampler == "explorer":
        fn = partial(_explorer_labels, params, n, key)
    else:
        raise ValueError(f"unknown sampler {sampler!r}")
    return concat_shards(map_shards(fn, replicates, workers))[0]


@dataclass
class Deviation:
    sampler: str
    observable: str
    outcome: str
    exact: float
    estimate: float
    stderr: float

    @property
    def z(self) -> float:
        if self.stderr == 0.0:
            return 0.0 if self.estimate == self.exact else math.inf
        return (self.estimate - self.exact) / self.stderr

    @property
    def ok(self) -> bool:
        return abs(self.z) <= SIGMAS


def _cluster_sizes(labels: np.ndarray) -> np.ndarray:
    N = labels.shape[1]
    return np.stack([(labels == c).sum(axis=1) for c in range(N)], axis=1)


def compare_to_law(law: ExactLaw, labels: np.ndarray, sampler: str) -> list[Deviation]:
    R = labels.shape[0]
    sizes = _cluster_sizes(labels)
    kroot = sizes[:, 0]
    kmax = sizes.max(axis=1)
    out = []

    def add(observable, outcome, p, hits):
        est = hits / R
        out.append(Deviation(sampler, observable, str(outcome), p, est, math.sqrt(p * (1 - p) / R)))

    for k, p in law.root_law().items():
        add("kroot", k, p, int((kroot == k).sum()))
    for k, p in law.max_law().items():
        add("kmax", k, p, int((kmax == k).sum()))
    for x in range(1, law.N):
        add(f"connect_0_{x}", 1, law.connection(0, x), int((labels[:, x] == 0).sum()))
    multisets = Counter(tuple(sorted((s for s in row if s), reverse=True)) for row in sizes.tolist())
    for ms, p in law.multiset_law().items():
        add("multiset", " ".join(map(str, ms)), p, multisets.get(ms, 0))
    return out


def oracle_check(params: ModelParams, n: int, replicates: int, seed: int, workers: int = 1, samplers=SAMPLERS) -> list[Deviation]:
    law = enumerate_exact(params, n)
    out = []
    for s in samplers:
        out.extend(compare_to_law(law, sampler_labels(params, n, s, replicates, seed, workers), s))
    return out


def deviations_csv(devs: list[Deviation], n: int, beta: float, replicates: int, seed: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "beta", "sampler", "observable", "outcome", "exact", "estimate", "stderr", "z", "replicates", "seed"])
    for d in devs:
        w.writerow([n, format(beta, ".17g"), d.sampler, d.observable, d.outcome, format(d.exact, ".17g"), format(d.estimate, ".17g"), format(d.stderr, ".17g"), format(d.z, ".17g"), replicates, seed])
    return buf.getvalue()
