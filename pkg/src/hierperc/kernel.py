"""Interaction kernel J, per-level edge probabilities and level sums.

Kernels are radial: J depends only on the level k of |x - y| = L^k, so every
consumer works with one value J_k per distance class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .lattice import LatticeParams, annulus_size

TAIL_RTOL = 1e-14


@dataclass(frozen=True)
class PowerLaw:
    """J(x) = <x>^(-d-alpha); both envelope constants equal 1."""

    c: float = 1.0
    C: float = 1.0


@dataclass(frozen=True)
class LevelTable:
    """Explicit J_1, J_2, ... with declared envelope c L^{-(d+a)k} <= J_k <= C L^{-(d+a)k}.

    Levels past the table continue the last entry with the power-law decay,
    which keeps the declared envelope valid at every level.
    """

    values: tuple[float, ...]
    c: float
    C: float

    def __post_init__(self):
        if not self.values:
            raise ValueError("level table is empty")
        if not 0 < self.c <= self.C:
            raise ValueError(f"need 0 < c <= C, got c={self.c}, C={self.C}")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))


@dataclass(frozen=True)
class ModelParams:
    lattice: LatticeParams
    alpha: float
    beta: float
    kernel: PowerLaw | LevelTable = field(default_factory=PowerLaw)

    def __post_init__(self):
        d = self.lattice.d
        if not 0 < self.alpha < d:
            raise ValueError(f"alpha must lie in (0, d={d}), got {self.alpha}")
        if self.beta < 0 or not math.isfinite(self.beta):
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")
        if isinstance(self.kernel, LevelTable):
            L, a = self.lattice.L, self.alpha
            for k, value in enumerate(self.kernel.values, start=1):
                scale = float(L) ** (-(d + a) * k)
                if not self.kernel.c * scale * (1 - 1e-12) <= value <= self.kernel.C * scale * (1 + 1e-12):
                    raise ValueError(f"J_{k}={value} violates the declared bounds [c, C]·L^(-(d+alpha)k)")

    @property
    def d(self) -> int:
        return self.lattice.d

    @property
    def L(self) -> int:
        return self.lattice.L

    @property
    def n(self) -> int:
        return self.lattice.n

    @property
    def base(self) -> int:
        return self.lattice.base

    @property
    def upper_constant(self) -> float:
        return self.kernel.C

    def with_beta(self, beta: float) -> "ModelParams":
        return replace(self, beta=float(beta))

    def with_level(self, n: int) -> "ModelParams":
        return replace(self, lattice=replace(self.lattice, n=n))


def J_level(k: int, params: ModelParams) -> float:
    """Kernel value at distance L^k (k >= 1)."""
    if k < 1:
        raise ValueError(f"kernel level must be >= 1, got {k}")
    decay = -(params.d + params.alpha)
    L = float(params.L)
    kern = params.kernel
    if isinstance(kern, LevelTable):
        m = len(kern.values)
        if k <= m:
            return kern.values[k - 1]
        return kern.values[-1] * L ** (decay * (k - m))
    return L ** (decay * k)


def p_level(k: int, params: ModelParams) -> float:
    """Edge probability 1 - exp(-beta J_k) between points at distance L^k."""
    return -math.expm1(-params.beta * J_level(k, params))


def level_probs(params: ModelParams, n: int) -> np.ndarray:
    """Array of p_level(k) for k = 0..n (entry 0 unused and zero)."""
    out = np.zeros(n + 1)
    for k in range(1, n + 1):
        out[k] = p_level(k, params)
    return out


def level_hazards(params: ModelParams, kmax: int) -> np.ndarray:
    """beta * J_k * annulus_size(k) for k = 0..kmax, as floats (entry 0 zero).

    exp(-hazard) is exactly the probability of no edge from a point into
    its whole annulus at level k.
    """
    out = np.zeros(kmax + 1)
    B = float(params.base)
    for k in range(1, kmax + 1):
        out[k] = params.beta * J_level(k, params) * (B**k - B ** (k - 1))
    return out


def hazard_beyond(params: ModelParams, k: int) -> float:
    """sum_{r > k} beta * J_r * annulus_size(r), closed form for the decaying tail."""
    kern = params.kernel
    ratio = float(params.L) ** (-params.alpha)
    if isinstance(kern, LevelTable) and k < len(kern.values):
        head = sum(
            params.beta * J_level(r, params) * annulus_size(r, params.lattice)
            for r in range(k + 1, len(kern.values) + 1)
        )
        return head + hazard_beyond(params, len(kern.values))
    first = params.beta * J_level(k + 1, params) * (float(params.base) ** (k + 1)) * (1 - 1 / params.base)
    return first / (1 - ratio)


@dataclass(frozen=True)
class TailSum:
    value: float
    linear_bound: float


def tail_sum(n: int, params: ModelParams) -> TailSum:
    """T_n(beta) = sum over r > n of annulus_size(r) * p_level(r).

    This equals sum_{y outside Lambda_n} (1 - exp(-beta J(y - x))) for any x
    in Lambda_n.  Summation stops once the geometric remainder bound drops
    below TAIL_RTOL relative.
    """
    if n < 0:
        raise ValueError(f"level must be >= 0, got {n}")
    d, L, a = params.d, float(params.L), params.alpha
    C = params.upper_constant
    ratio = L ** (-a)
    linear = params.beta * C * (1 - L ** (-d)) * L ** (-a * (n + 1)) / (1 - ratio)
    if params.beta == 0:
        return TailSum(0.0, 0.0)
    total = 0.0
    comp = 0.0
    r = n + 1
    B = float(params.base)
    while True:
        term = (B**r - B ** (r - 1)) * p_level(r, params)
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        remainder = params.beta * C * (1 - 1 / B) * L ** (-a * (r + 1)) / (1 - ratio)
        if remainder <= TAIL_RTOL * total:
            break
        r += 1
    return TailSum(total, linear)


# -- flat key=value serialization ---------------------------------------------


def params_to_dict(params: ModelParams) -> dict[str, str]:
    out = {
        "d": str(params.d),
        "L": str(params.L),
        "n": str(params.n),
        "alpha": repr(float(params.alpha)),
        "beta": repr(float(params.beta)),
    }
    if isinstance(params.kernel, LevelTable):
        out["kernel"] = "table"
        out["c"] = repr(params.kernel.c)
        out["C"] = repr(params.kernel.C)
        for k, v in enumerate(params.kernel.values, start=1):
            out[f"J_{k}"] = repr(v)
    else:
        out["kernel"] = "power"
    return out


def params_from_dict(data: dict[str, str]) -> ModelParams:
    try:
        lattice = LatticeParams(d=int(data["d"]), L=int(data["L"]), n=int(data.get("n", 0)))
        alpha = float(data["alpha"])
        beta = float(data["beta"])
    except KeyError as exc:
        raise ValueError(f"missing model key {exc.args[0]!r}") from None
    kind = data.get("kernel", "power")
    if kind == "power":
        kernel = PowerLaw()
    elif kind == "table":
        keys = sorted((k for k in data if k.startswith("J_")), key=lambda k: int(k[2:]))
        if [int(k[2:]) for k in keys] != list(range(1, len(keys) + 1)):
            raise ValueError("table entries must be J_1, J_2, ... without gaps")
        kernel = LevelTable(tuple(float(data[k]) for k in keys), float(data["c"]), float(data["C"]))
    else:
        raise ValueError(f"unknown kernel {kind!r} (expected 'power' or 'table')")
    return ModelParams(lattice, alpha, beta, kernel)


def parse_key_values(text: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def dump_key_values(data: dict[str, str]) -> str:
    return "".join(f"{k}={v}\n" for k, v in data.items())


def load_params(path) -> ModelParams:
    with open(path) as fh:
        return params_from_dict(parse_key_values(fh.read()))


def save_params(params: ModelParams, path) -> None:
    with open(path, "w") as fh:
        fh.write(dump_key_values(params_to_dict(params)))
