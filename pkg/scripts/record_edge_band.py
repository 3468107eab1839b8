"""Record the open-edges-per-vertex band of the direct sampler at beta_c(alpha=0.5).

The band is [0.97 min, 1.03 max] of the per-vertex edge density measured at
n = 12, 14, ..., 20; the acceptance suite enforces it as a regression check.

    python3 scripts/record_edge_band.py
"""

import json
from pathlib import Path

from hierperc import rng
from hierperc.experiments import SEED, critical_point, model
from hierperc.samplers import direct_sample

FIXTURE = Path(__file__).resolve().parent.parent / "tests" / "data" / "edge_band.json"
LEVELS = (12, 14, 16, 18, 20)
REPLICATES = 3


def measure(beta: float) -> dict:
    p = model(0.5, beta)
    key = rng.stream_key(SEED, "edge-band")
    out = {}
    for n in LEVELS:
        vals = []
        for r in range(REPLICATES):
            part = direct_sample(p, n, int(rng.replicate_key(key, r)))
            vals.append(int(part.open_edges.sum()) / part.num_points)
        out[n] = sum(vals) / len(vals)
    return out


def main():
    beta = critical_point(0.5).value
    dens = measure(beta)
    band = [0.97 * min(dens.values()), 1.03 * max(dens.values())]
    FIXTURE.write_text(json.dumps({"alpha": 0.5, "beta": beta, "levels": {str(k): v for k, v in dens.items()}, "band": band}, indent=2) + "\n")
    print(f"beta={beta:.6f} densities={dens} band={band}")


if __name__ == "__main__":
    main()
