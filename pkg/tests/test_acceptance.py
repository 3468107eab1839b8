"""Acceptance criteria, each at its stated tolerance and replicate count.

One PASS/FAIL line per criterion is printed in the terminal summary.
"""

import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from hierperc import cli
from hierperc.estimators import (
    estimate_radial_two_point,
    estimate_susceptibility,
    estimate_tail,
    compute_phi,
    fit_delta,
    max_cluster_checks,
    triangle_sum,
)
from hierperc.experiments import SEED, critical_point, model
from hierperc.samplers import direct_sample
from hierperc.validation import oracle_check

DATA = Path(__file__).parent / "data"
pytestmark = pytest.mark.slow


def test_c1_oracle_equivalence(record_criterion):
    t0 = time.perf_counter()
    worst, failed = 0.0, []
    for beta in (0.2, 0.4, 0.8):
        devs = oracle_check(model(0.5, beta), 2, 1_000_000, SEED)
        # laws of |K_2(0)|, |K_2^max| and every connection indicator
        devs = [d for d in devs if d.observable != "multiset"]
        worst = max(worst, max(abs(d.z) for d in devs))
        failed += [(beta, d.sampler, d.observable, d.outcome, round(d.z, 2)) for d in devs if not d.ok]
    wall = time.perf_counter() - t0
    ok = not failed and wall < 120
    record_criterion(1, ok, f"max|z|={worst:.2f} over 3 samplers x 3 betas at 1e6, {wall:.0f}s")
    assert not failed, failed
    assert wall < 120


def test_c2_cluster_average_identity(record_criterion):
    t0 = time.perf_counter()
    betas = (0.2, 0.5, 0.8, 1.1, 1.4)
    worst, bad = 0.0, []
    for beta in betas:
        for n in range(1, 9):
            est = estimate_susceptibility(model(0.5, beta), n, 20_000, SEED)
            worst = max(worst, abs(est.z))
            if est.disagreement:
                bad.append((beta, n, est.z))
    wall = time.perf_counter() - t0
    ok = not bad and wall < 300
    record_criterion(2, ok, f"max|z|={worst:.2f} over n=1..8 x {len(betas)} betas, {wall:.0f}s")
    assert not bad, bad
    assert wall < 300


def test_c3_betac_bracket(record_criterion):
    t0 = time.perf_counter()
    est = critical_point(0.5)
    lb = est.lower_bound
    p = model(0.5, 0.9 * est.value)
    phi = compute_phi(p, 6, estimate_susceptibility(p, 6, 50_000, SEED))
    wall = time.perf_counter() - t0
    ok = est.value >= lb - est.width and phi.value < 1 and wall < 1200
    record_criterion(3, ok, f"beta_c={est.value:.5f} in [{est.interval[0]:.5f}, {est.interval[1]:.5f}], bound {lb:.6f}, phi(0.9 beta_c, 6)={phi.value:.4f}+/-{phi.stderr:.4f}")
    assert lb == pytest.approx(0.414214, abs=1e-6)
    assert est.value >= lb - est.width
    assert phi.value < 1


def test_c4_scaling_band(record_criterion):
    est = critical_point(0.5)
    R = [r.R for r in est.report.at(est.value)]
    ratio = max(R) / min(R)
    record_criterion(4, ratio <= 3, f"R_n for n=4..8 at beta_c: {' '.join(f'{x:.4f}' for x in R)}, max/min={ratio:.3f}")
    assert len(R) == 5
    assert ratio <= 3


def test_c5_max_cluster_inequalities(record_criterion):
    t0 = time.perf_counter()
    bc = critical_point(0.5).value
    checks = []
    for frac in (0.25, 0.5, 0.75, 1.0):
        checks += max_cluster_checks(model(0.5, frac * bc), 8, 20_000, SEED)
    wall = time.perf_counter() - t0
    bad = [(c.name, c.n, c.beta, c.lhs, c.rhs) for c in checks if not c.ok]
    ok = not bad and wall < 600
    record_criterion(5, ok, f"{len(checks) - len(bad)}/{len(checks)} inequalities hold on n=1..8, beta/beta_c in {{.25,.5,.75,1}}, {wall:.0f}s")
    assert not bad, bad


def _increment_ratios(alpha):
    p = model(alpha, critical_point(alpha).value)
    tau = estimate_radial_two_point(p, 8, 50_000, SEED, mode="unrestricted", delta=3, estimator="pairs")
    return triangle_sum(tau, 8, p).increment_ratios(4, 8), p.L ** (3 * alpha - p.d)


def test_c6_triangle_trend(record_criterion):
    t0 = time.perf_counter()
    low, target = _increment_ratios(0.2)
    high, _ = _increment_ratios(0.6)
    wall = time.perf_counter() - t0
    band = (target / 2, 2 * target)
    conv = bool(np.all((low >= band[0]) & (low <= band[1])))
    div = bool(np.all(high > 1))
    record_criterion(
        6, conv and div,
        f"alpha=0.2 ratios {' '.join(f'{r:.3f}' for r in low)} in [{band[0]:.3f}, {band[1]:.3f}]; alpha=0.6 ratios {' '.join(f'{r:.3f}' for r in high)} > 1; {wall:.0f}s",
    )
    assert conv and div


def test_c7_mean_field_tail(record_criterion):
    t0 = time.perf_counter()
    p = model(0.2, critical_point(0.2).value)
    curve = estimate_tail(p, 4096, 1_000_000, SEED)
    fit = fit_delta(curve, (16, 1024), seed=SEED)
    wall = time.perf_counter() - t0
    ok = 1.6 <= fit.delta <= 2.4 and wall < 3600
    record_criterion(7, ok, f"delta={fit.delta:.3f}+/-{fit.stderr:.3f} at beta={p.beta:.5f}, censored {curve.censored:.4f}, {wall:.0f}s")
    assert 1.6 <= fit.delta <= 2.4


def test_c8_direct_performance(record_criterion):
    band = json.loads((DATA / "edge_band.json").read_text())
    p = model(0.5, critical_point(0.5).value)
    direct_sample(p, 4, key=0)  # compile outside the timed region
    t0 = time.perf_counter()
    part = direct_sample(p, 20, key=SEED)
    wall = time.perf_counter() - t0
    density = part.open_edges.sum() / part.num_points
    lo, hi = band["band"]
    ok = wall < 5 and lo <= density <= hi
    record_criterion(8, ok, f"2^20 vertices in {wall:.2f}s, open edges/vertex {density:.4f} in [{lo:.4f}, {hi:.4f}]")
    assert wall < 5
    assert lo <= density <= hi


def test_c9_determinism(record_criterion, tmp_path):
    runs = {
        "susceptibility": ["susceptibility", "--alpha", "0.5", "--beta", "1.2", "--n", "8", "--replicates", "60000", "--seed", str(SEED)],
        "tail": ["tail", "--alpha", "0.2", "--beta", "0.3", "--cap", "1024", "--replicates", "60000", "--seed", str(SEED)],
        "two-point": ["two-point", "--alpha", "0.5", "--beta", "1.2", "--n", "5", "--mode", "unrestricted", "--replicates", "30000", "--seed", str(SEED)],
    }
    same = []
    for name, argv in runs.items():
        outs = []
        for tag, extra in (("a", ["--workers", "1"]), ("b", ["--workers", "1"]), ("c", ["--workers", "2"])):
            path = tmp_path / f"{name}-{tag}.csv"
            assert cli.main(argv + extra + ["--out", str(path)]) == 0
            outs.append(path.read_bytes())
        same.append(outs[0] == outs[1] == outs[2])
    # an in-process estimator repeat as well
    a = estimate_susceptibility(model(0.5, 1.0), 6, 30_000, SEED)
    b = estimate_susceptibility(model(0.5, 1.0), 6, 30_000, SEED)
    same.append(a.census == b.census)
    ok = all(same)
    record_criterion(9, ok, f"{sum(same)}/{len(same)} repeated runs byte-identical (including 1 vs 2 workers)")
    assert ok
