"""Crossing estimates of beta_c for several alpha, with the scaling report.

    python3 scripts/betac_scan.py --alpha 0.2 0.5 0.6 --out results/betac
"""

import argparse
import json
from pathlib import Path

from hierperc.experiments import critical_point


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--alpha", type=float, nargs="+", default=[0.2, 0.5, 0.6])
    ap.add_argument("--out", default="results/betac")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summary = {}
    for a in args.alpha:
        est = critical_point(a)
        (out / f"scaling_alpha{a:g}.csv").write_text(est.report.to_csv())
        summary[f"{a:g}"] = {"betac": est.value, "interval": list(est.interval), "lower_bound": est.lower_bound}
        R = [r.R for r in est.report.rows]
        print(f"alpha={a:g} betac={est.value:.5f} interval=[{est.interval[0]:.5f}, {est.interval[1]:.5f}] R ratio={max(R) / min(R):.3f}")
    (out / "betac.json").write_text(json.dumps(summary, indent=2) + "\n")


if __name__ == "__main__":
    main()
