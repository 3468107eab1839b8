"""Fixed-column CSV rows shared by every estimator output."""

from __future__ import annotations

import csv
import io
import math

COLUMNS = ("n", "beta", "observable", "value", "stderr", "replicates", "seed")


def fmt(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (int,)) or (hasattr(x, "dtype") and x.dtype.kind in "iu"):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def row(n, beta, observable, value, stderr, replicates, seed) -> tuple:
    return (n, beta, observable, value, stderr, replicates, seed)


def to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([fmt(v) if not isinstance(v, str) else v for v in r])
    return buf.getvalue()
