"""Volume tail P(|K| >= m) at the estimated critical point and the fitted delta.

    python3 scripts/tail_exponent.py --alpha 0.2 --replicates 1000000
"""

import argparse

from hierperc.estimators import estimate_tail, fit_delta
from hierperc.experiments import SEED, critical_point, model


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--alpha", type=float, default=0.2)
    ap.add_argument("--cap", type=int, default=4096)
    ap.add_argument("--replicates", type=int, default=1_000_000)
    ap.add_argument("--window", type=float, nargs=2, default=[16, 1024])
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    p = model(args.alpha, critical_point(args.alpha).value)
    curve = estimate_tail(p, args.cap, args.replicates, SEED, workers=args.workers)
    fit = fit_delta(curve, tuple(args.window), seed=SEED)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(curve.to_csv())
    print(f"alpha={args.alpha:g} beta={p.beta:.5f} censored={curve.censored:.4f}")
    print(f"delta={fit.delta:.4f} +/- {fit.stderr:.4f} (mean-field 2, (d+a)/(d-a)={(1 + args.alpha) / (1 - args.alpha):.3f})")


if __name__ == "__main__":
    main()
