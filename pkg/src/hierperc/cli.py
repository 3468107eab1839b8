"""Command-line front door.

Every flag has a config-file key of the same name (dashes become
underscores); values from ``--config`` are read first and flags override
them.  Output goes to ``--out`` (stdout when absent) and, with ``--out``, a
JSON manifest is written next to it as ``<out>.manifest.json``.

Exit codes: 0 success, 1 validation error, 2 oracle-check failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from functools import partial

import numpy as np

from . import __version__, rng
from .estimators import (
    CrossingError,
    betac_lower_bound,
    compute_phi,
    estimate_betac,
    estimate_radial_two_point,
    estimate_susceptibility,
    estimate_tail,
    estimate_typical_max,
    fit_delta,
    triangle_sum,
)
from .estimators.report import row, to_csv
from .kernel import ModelParams, level_probs, params_from_dict, params_to_dict, parse_key_values, tail_sum
from .parallel import concat_shards, map_shards
from .samplers.direct import check_budget, direct_records
from .samplers.explorer import INFINITE
from .validation import deviations_csv, oracle_check

COMMANDS = ("sample", "two-point", "susceptibility", "typical-max", "tail", "delta-fit", "triangle", "phi", "betac-scan", "oracle-check")
MODEL_KEYS = ("d", "L", "alpha", "beta", "n", "kernel", "c", "C")
EXIT_OK, EXIT_INVALID, EXIT_ORACLE = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: ModelParams
    levels: tuple | None = None
    replicates: int = 10_000
    seed: int = 0
    workers: int = 1
    cap: int = 4096
    delta_embed: int = 3
    bracket: tuple | None = None
    window: tuple | None = None
    mode: str = "restricted"
    estimator: str | None = None
    restriction: int | None = None  # None: infinite volume
    marks: tuple = ()
    divergence_guard: float | None = None
    out: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.replicates < 1:
            raise UsageError("replicates must be >= 1")
        if self.workers < 1:
            raise UsageError("workers must be >= 1")
        if self.cap < 1:
            raise UsageError("cap must be >= 1")
        if self.format not in ("csv", "jsonl"):
            raise UsageError(f"format must be csv or jsonl, got {self.format!r}")
        if self.mode not in ("restricted", "unrestricted"):
            raise UsageError(f"mode must be restricted or unrestricted, got {self.mode!r}")
        if self.estimator not in (None, "representative", "pairs"):
            raise UsageError(f"estimator must be representative or pairs, got {self.estimator!r}")
        if self.levels is not None and not (0 <= self.levels[0] <= self.levels[1]):
            raise UsageError(f"levels must satisfy 0 <= a <= b, got {self.levels}")

    @property
    def n(self) -> int:
        return self.params.n

    def level_range(self) -> list[int]:
        if self.levels is None:
            return [self.n]
        return list(range(self.levels[0], self.levels[1] + 1))

    def to_dict(self) -> dict[str, str]:
        out = {"command": self.command}
        out.update(params_to_dict(self.params))
        for f in fields(self):
            if f.name in ("command", "params"):
                continue
            v = getattr(self, f.name)
            if v is None:
                continue
            if f.name == "levels":
                out[f.name] = f"{v[0]}..{v[1]}"
            elif f.name in ("bracket", "window"):
                out[f.name] = f"{v[0]!r},{v[1]!r}"
            elif f.name == "marks":
                if v:
                    out[f.name] = ",".join(map(str, v))
            elif isinstance(v, float):
                out[f.name] = repr(v)
            else:
                out[f.name] = str(v)
        return out

    @classmethod
    def from_dict(cls, data: dict[str, str]) -> "RunConfig":
        data = dict(data)
        known = set(MODEL_KEYS) | {f.name for f in fields(cls)}
        for key in data:
            if key not in known and not key.startswith("J_"):
                raise UsageError(f"unknown key {key!r}")
        if "command" not in data:
            raise UsageError("missing command")
        if "beta" not in data:
            raise UsageError("--beta is required")
        model = {k: v for k, v in data.items() if k in MODEL_KEYS or k.startswith("J_")}
        model.setdefault("d", "1")
        model.setdefault("L", "2")
        model.setdefault("alpha", "0.5")
        model.setdefault("n", "2")
        try:
            params = params_from_dict(model)
        except (ValueError, TypeError) as exc:
            raise UsageError(str(exc)) from None
        kw = {}
        try:
            for f in fields(cls):
                if f.name in ("command", "params") or f.name not in data:
                    continue
                raw = data[f.name]
                if f.name == "levels":
                    a, b = raw.split("..")
                    kw[f.name] = (int(a), int(b))
                elif f.name in ("bracket", "window"):
                    a, b = raw.split(",")
                    kw[f.name] = (float(a), float(b))
                elif f.name == "marks":
                    kw[f.name] = tuple(int(x) for x in raw.split(",") if x.strip())
                elif f.name in ("replicates", "seed", "workers", "cap", "delta_embed"):
                    kw[f.name] = int(raw)
                elif f.name == "restriction":
                    kw[f.name] = None if raw in ("inf", "infinite") else int(raw)
                elif f.name == "divergence_guard":
                    kw[f.name] = float(raw)
                else:
                    kw[f.name] = raw
        except ValueError:
            raise UsageError(f"malformed value for {f.name}: {data[f.name]!r}") from None
        return cls(data["command"], params, **kw)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hierperc", description="Long-range percolation on the hierarchical lattice.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("command", choices=COMMANDS)
    S = argparse.SUPPRESS
    for name in ("d", "L", "n", "replicates", "seed", "workers", "cap", "delta-embed"):
        p.add_argument(f"--{name}", default=S)
    for name in ("alpha", "beta", "divergence-guard"):
        p.add_argument(f"--{name}", default=S)
    p.add_argument("--levels", default=S, help="a..b")
    p.add_argument("--bracket", default=S, help="lo,hi")
    p.add_argument("--window", default=S, help="lo,hi")
    p.add_argument("--mode", default=S, help="restricted | unrestricted")
    p.add_argument("--estimator", default=S, help="representative | pairs")
    p.add_argument("--restriction", default=S, help="ball level, or inf")
    p.add_argument("--marks", default=S, help="comma-separated packed indices")
    p.add_argument("--kernel", default=S)
    p.add_argument("--out", default=S)
    p.add_argument("--format", default=S, help="csv | jsonl")
    p.add_argument("--config", default=None)
    return p


def parse_config(argv) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    data = {}
    cfg_path = ns.pop("config", None)
    if cfg_path:
        try:
            with open(cfg_path) as fh:
                data.update(parse_key_values(fh.read()))
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
    for k, v in ns.items():
        data[k.replace("-", "_")] = str(v)
    return RunConfig.from_dict(data)


# -- subcommands ------------------------------------------------------------------


def _records_shard(B, n, probs, key, marks, start, stop):
    return direct_records(B, n, probs, np.uint64(key), start, stop, marks)


def _run_sample(cfg: RunConfig):
    P, n = cfg.params, cfg.n
    check_budget(P, n)
    N = P.base**n
    if any(not 0 <= m < N for m in cfg.marks):
        raise UsageError(f"marks must lie in [0, {N})")
    marks = np.array(cfg.marks, dtype=np.int64)
    fn = partial(_records_shard, P.base, n, level_probs(P, n), rng.stream_key(cfg.seed, f"sample:{n}"), marks)
    kroot, kmax, conn, edges = concat_shards(map_shards(fn, cfg.replicates, cfg.workers))
    recs = []
    for i in range(cfg.replicates):
        recs.append({
            "replicate": i,
            "n": n,
            "beta": P.beta,
            "kmax": int(kmax[i]),
            "kroot": int(kroot[i]),
            "marks_connected": [bool(c) for c in conn[i]],
            "open_edges": [int(e) for e in edges[i, 1:]],
        })
    if cfg.format == "jsonl":
        return "".join(json.dumps(r) + "\n" for r in recs)
    lines = ["replicate,n,beta,kmax,kroot,marks_connected,open_edges"]
    for r in recs:
        mc = ";".join(str(int(c)) for c in r["marks_connected"])
        oe = ";".join(map(str, r["open_edges"]))
        lines.append(f"{r['replicate']},{n},{format(P.beta, '.17g')},{r['kmax']},{r['kroot']},{mc},{oe}")
    return "\n".join(lines) + "\n"


def _two_point(cfg: RunConfig, mode: str, default_estimator: str):
    return estimate_radial_two_point(
        cfg.params, cfg.n, cfg.replicates, cfg.seed, mode=mode, delta=cfg.delta_embed,
        estimator=cfg.estimator or default_estimator, workers=cfg.workers,
    )


def _rows_two_point(cfg):
    return _two_point(cfg, cfg.mode, "representative").rows()


def _rows_triangle(cfg):
    tau = _two_point(cfg, "unrestricted", "pairs")
    tri = triangle_sum(tau, cfg.n, cfg.params)
    rows = tau.rows()
    for m in range(cfg.n + 1):
        rows.append(row(m, cfg.params.beta, "triangle", tri.partial[m], math.nan, cfg.replicates, cfg.seed))
        if m > 0:
            rows.append(row(m, cfg.params.beta, "triangle_increment", tri.increments[m], math.nan, cfg.replicates, cfg.seed))
    return rows


def _rows_susceptibility(cfg):
    rows = []
    for n in cfg.level_range():
        est = estimate_susceptibility(cfg.params.with_level(n), n, cfg.replicates, cfg.seed, cfg.workers)
        b = cfg.params.beta
        rows.append(row(n, b, "susceptibility_root", est.root.mean, est.root.stderr, cfg.replicates, cfg.seed))
        rows.append(row(n, b, "susceptibility_census", est.census.mean, est.census.stderr, cfg.replicates, cfg.seed))
        rows.append(row(n, b, "root_minus_census_z", est.z, math.nan, cfg.replicates, cfg.seed))
    return rows


def _rows_typical_max(cfg):
    rows = []
    for n in cfg.level_range():
        tm = estimate_typical_max(cfg.params.with_level(n), n, cfg.replicates, cfg.seed, cfg.workers)
        b = cfg.params.beta
        rows.append(row(n, b, "typical_max", tm.value, math.nan, cfg.replicates, cfg.seed))
        rows.append(row(n, b, "typical_max_lo", tm.interval[0], math.nan, cfg.replicates, cfg.seed))
        rows.append(row(n, b, "typical_max_hi", tm.interval[1], math.nan, cfg.replicates, cfg.seed))
    return rows


def _tail(cfg):
    restriction = INFINITE if cfg.restriction is None else cfg.restriction
    return estimate_tail(cfg.params, cfg.cap, cfg.replicates, cfg.seed, restriction, cfg.workers, cfg.divergence_guard)


def _rows_tail(cfg):
    return _tail(cfg).rows()


def _rows_delta_fit(cfg):
    curve = _tail(cfg)
    fit = fit_delta(curve, cfg.window, seed=cfg.seed)
    rows = curve.rows()
    lvl = curve.restriction
    rows.append(row(lvl, cfg.params.beta, "delta", fit.delta, fit.stderr, cfg.replicates, cfg.seed))
    rows.append(row(lvl, cfg.params.beta, "slope", fit.slope, math.nan, cfg.replicates, cfg.seed))
    return rows


def _rows_phi(cfg):
    rows = []
    for n in cfg.level_range():
        P = cfg.params.with_level(n)
        sus = estimate_susceptibility(P, n, cfg.replicates, cfg.seed, cfg.workers)
        phi = compute_phi(P, n, sus)
        ts = tail_sum(n, P)
        b = P.beta
        rows.append(row(n, b, "phi", phi.value, phi.stderr, cfg.replicates, cfg.seed))
        rows.append(row(n, b, "susceptibility", sus.census.mean, sus.census.stderr, cfg.replicates, cfg.seed))
        rows.append(row(n, b, "tail_sum", ts.value, math.nan, cfg.replicates, cfg.seed))
        rows.append(row(n, b, "tail_sum_linear_bound", ts.linear_bound, math.nan, cfg.replicates, cfg.seed))
    rows.append(row(cfg.n, cfg.params.beta, "betac_lower_bound", betac_lower_bound(cfg.params), math.nan, cfg.replicates, cfg.seed))
    return rows


def _rows_betac(cfg):
    lb = betac_lower_bound(cfg.params)
    bracket = cfg.bracket or (lb, 10 * lb)
    levels = cfg.level_range() if cfg.levels else [4, 5, 6, 7, 8]
    est = estimate_betac(cfg.params, levels, bracket, cfg.replicates, cfg.seed, cfg.workers)
    rows = est.report.csv_rows()
    n = levels[-1]
    rows.append(row(n, est.value, "betac", est.value, math.nan, cfg.replicates, cfg.seed))
    rows.append(row(n, est.value, "betac_lo", est.interval[0], math.nan, cfg.replicates, cfg.seed))
    rows.append(row(n, est.value, "betac_hi", est.interval[1], math.nan, cfg.replicates, cfg.seed))
    rows.append(row(n, est.value, "betac_lower_bound", lb, math.nan, cfg.replicates, cfg.seed))
    return rows


ROWS = {
    "two-point": _rows_two_point,
    "triangle": _rows_triangle,
    "susceptibility": _rows_susceptibility,
    "typical-max": _rows_typical_max,
    "tail": _rows_tail,
    "delta-fit": _rows_delta_fit,
    "phi": _rows_phi,
    "betac-scan": _rows_betac,
}


def _rows_text(rows, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(rows)
    text = to_csv(rows).splitlines()
    header = text[0].split(",")
    out = []
    for line in text[1:]:
        vals = line.split(",")
        out.append(json.dumps(dict(zip(header, vals))))
    return "".join(s + "\n" for s in out)


def execute(cfg: RunConfig) -> tuple[str, int]:
    """Run one command; returns (output text, exit status)."""
    if cfg.command == "sample":
        return _run_sample(cfg), EXIT_OK
    if cfg.command == "oracle-check":
        devs = oracle_check(cfg.params, cfg.n, cfg.replicates, cfg.seed, cfg.workers)
        text = deviations_csv(devs, cfg.n, cfg.params.beta, cfg.replicates, cfg.seed)
        return text, EXIT_OK if all(d.ok for d in devs) else EXIT_ORACLE
    return _rows_text(ROWS[cfg.command](cfg), cfg.format), EXIT_OK


def manifest(cfg: RunConfig, wall_time: float, status: int) -> dict:
    return {
        "config": cfg.to_dict(),
        "version": __version__,
        "wall_time": wall_time,
        "total_replicates": cfg.replicates,
        "exit_status": status,
    }


def config_from_manifest(data: dict) -> RunConfig:
    return RunConfig.from_dict(data["config"])


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        t0 = time.perf_counter()
        text, status = execute(cfg)
    except (UsageError, ValueError, MemoryError, OverflowError) as exc:
        print(f"error: {exc}".splitlines()[0], file=sys.stderr)
        return EXIT_INVALID
    except CrossingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    wall = time.perf_counter() - t0
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
        with open(cfg.out + ".manifest.json", "w") as fh:
            json.dump(manifest(cfg, wall, status), fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
