"""The hierarchical group H^d_L: points, addition, ultrametric norm, balls.

A point is a finite sequence of digits, level 1 first.  Each digit is an
element of the torus (Z/LZ)^d stored as an integer in [0, L^d) whose base-L
expansion (least significant first) gives the d coordinates.  Inside a ball
Lambda_n a point is also addressed by its packed index sum_i digit_i * B**(i-1)
with B = L**d; in that order every sub-ball is a contiguous index range.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence


@dataclass(frozen=True)
class LatticeParams:
    d: int
    L: int
    n: int = 0

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension d must be >= 1, got {self.d}")
        if self.L < 2:
            raise ValueError(f"side length L must be >= 2, got {self.L}")
        if self.n < 0:
            raise ValueError(f"ball level n must be >= 0, got {self.n}")

    @property
    def base(self) -> int:
        """Number of torus elements per digit, L**d."""
        return self.L**self.d

    def ball_size(self, k: int | None = None) -> int:
        k = self.n if k is None else k
        if k < 0:
            raise ValueError(f"level must be >= 0, got {k}")
        return self.base**k


def _digit_from_coords(coords: Sequence[int], L: int) -> int:
    value = 0
    for c in reversed(coords):
        value = value * L + (c % L)
    return value


def _coords_from_digit(digit: int, L: int, d: int) -> tuple[int, ...]:
    out = []
    for _ in range(d):
        out.append(digit % L)
        digit //= L
    return tuple(out)


@dataclass(frozen=True)
class Point:
    """Element of H^d_L in canonical form (no trailing zero digits)."""

    digits: tuple[int, ...]
    d: int = 1
    L: int = 2

    def __post_init__(self):
        base = self.L**self.d
        digits = []
        for x in self.digits:
            digit = _digit_from_coords(x, self.L) if isinstance(x, (tuple, list)) else int(x)
            if not 0 <= digit < base:
                raise ValueError(f"digit {x!r} outside [0, {base})")
            digits.append(digit)
        while digits and digits[-1] == 0:
            digits.pop()
        object.__setattr__(self, "digits", tuple(digits))

    @classmethod
    def zero(cls, d: int = 1, L: int = 2) -> "Point":
        return cls((), d, L)

    @classmethod
    def from_index(cls, index: int, d: int = 1, L: int = 2) -> "Point":
        """Inverse of :meth:`index`."""
        if index < 0:
            raise ValueError("packed index must be nonnegative")
        base = L**d
        digits = []
        while index:
            index, r = divmod(index, base)
            digits.append(r)
        return cls(tuple(digits), d, L)

    @property
    def level(self) -> int:
        """Top nonzero level h, 0 for the zero point."""
        return len(self.digits)

    def index(self) -> int:
        base = self.L**self.d
        value = 0
        for digit in reversed(self.digits):
            value = value * base + digit
        return value

    def digit(self, level: int) -> int:
        return self.digits[level - 1] if 1 <= level <= len(self.digits) else 0

    def coords(self, level: int) -> tuple[int, ...]:
        return _coords_from_digit(self.digit(level), self.L, self.d)

    def _check(self, other: "Point"):
        if (self.d, self.L) != (other.d, other.L):
            raise ValueError("points belong to different lattices")

    def __add__(self, other: "Point") -> "Point":
        return add(self, other)

    def __neg__(self) -> "Point":
        return neg(self)

    def __sub__(self, other: "Point") -> "Point":
        return add(self, neg(other))

    def encode(self) -> str:
        return encode(self)


def norm(p: Point) -> int:
    """Ultrametric norm: L**h for top level h, 0 for the zero point."""
    return p.L**p.level if p.digits else 0


def japanese_bracket(p: Point) -> int:
    return max(1, norm(p))


def add(p: Point, q: Point) -> Point:
    """Digit-wise, coordinate-wise sum mod L.  Levels never carry."""
    p._check(q)
    h = max(p.level, q.level)
    digits = []
    for i in range(1, h + 1):
        a = p.coords(i)
        b = q.coords(i)
        digits.append(_digit_from_coords([x + y for x, y in zip(a, b)], p.L))
    return Point(tuple(digits), p.d, p.L)


def neg(p: Point) -> Point:
    digits = [_digit_from_coords([-c for c in p.coords(i)], p.L) for i in range(1, p.level + 1)]
    return Point(tuple(digits), p.d, p.L)


def distance(p: Point, q: Point) -> int:
    return norm(p - q)


def separation_level(p: Point, q: Point) -> int:
    """h(p, q): highest level at which the digits differ, 0 if p == q."""
    p._check(q)
    for i in range(max(p.level, q.level), 0, -1):
        if p.digit(i) != q.digit(i):
            return i
    return 0


def annulus_size(k: int, params: LatticeParams) -> int:
    """|Lambda_k minus Lambda_{k-1}|; the level-0 annulus is the zero point."""
    if k < 0:
        raise ValueError(f"annulus level must be >= 0, got {k}")
    if k == 0:
        return 1
    base = params.base
    return base**k - base ** (k - 1)


def ball_points(params: LatticeParams, n: int | None = None) -> Iterator[Point]:
    """All points of Lambda_n in packed-index order."""
    n = params.n if n is None else n
    for i in range(params.ball_size(n)):
        yield Point.from_index(i, params.d, params.L)


def sample_uniform_annulus(k: int, params: LatticeParams, rng) -> Point:
    """Uniform point with norm exactly L**k; ``rng`` is a numpy Generator."""
    if k < 1:
        raise ValueError(f"annulus level must be >= 1, got {k}")
    base = params.base
    lower = [int(rng.integers(base)) for _ in range(k - 1)]
    top = int(rng.integers(1, base))
    return Point(tuple(lower) + (top,), params.d, params.L)


def first_in_annulus(k: int, params: LatticeParams) -> int:
    """Packed index of the first point of annulus k (digit 1 at level k)."""
    return 0 if k == 0 else params.base ** (k - 1)


def triple_count(j: int, k: int, m: int, n: int, params: LatticeParams) -> int:
    """#{(x, y) in Lambda_n^2 : |x| = L^j, |y| = L^k, |x - y| = L^m}.

    Level 0 stands for the zero point (or x == y for m).  Closed form by
    case analysis on the ultrametric triangle.
    """
    for level in (j, k, m):
        if not 0 <= level <= n:
            raise ValueError(f"levels must lie in [0, {n}], got {(j, k, m)}")
    a = lambda t: annulus_size(t, params)  # noqa: E731
    if j == 0:
        return a(k) if m == k else 0
    if k == 0:
        return a(j) if m == j else 0
    if m == 0:
        return a(j) if j == k else 0
    if j != k:
        return a(j) * a(k) if m == max(j, k) else 0
    if m > j:
        return 0
    if m == j:
        base = params.base
        return a(j) * (base - 2) * base ** (j - 1)
    return a(j) * a(m)


def encode(p: Point) -> str:
    if not p.digits:
        return "0"
    return ",".join(str(x) for x in p.digits)


def decode(text: str, d: int = 1, L: int = 2) -> Point:
    text = text.strip()
    if text in ("", "0"):
        return Point.zero(d, L)
    return Point(tuple(int(x) for x in text.split(",")), d, L)
