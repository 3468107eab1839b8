"""Triangle-diagram increments at the estimated critical point.

    python3 scripts/triangle_trend.py --alpha 0.2 0.6
"""

import argparse

from hierperc.estimators import estimate_radial_two_point, triangle_sum
from hierperc.experiments import SEED, critical_point, model


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--alpha", type=float, nargs="+", default=[0.2, 0.6])
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--delta", type=int, default=3)
    ap.add_argument("--replicates", type=int, default=50_000)
    args = ap.parse_args()
    for a in args.alpha:
        beta = critical_point(a).value
        p = model(a, beta)
        tau = estimate_radial_two_point(p, args.n, args.replicates, SEED, mode="unrestricted", delta=args.delta, estimator="pairs")
        tri = triangle_sum(tau, args.n, p)
        ratios = tri.increment_ratios(4, args.n)
        print(f"alpha={a:g} beta={beta:.5f} predicted ratio L^(3a-d)={p.L ** (3 * a - p.d):.4f}")
        for m in range(1, args.n + 1):
            print(f"  m={m} nabla={tri.partial[m]:.6f} increment={tri.increments[m]:.6f}")
        print("  ratios m=4..:", " ".join(f"{r:.4f}" for r in ratios))


if __name__ == "__main__":
    main()
