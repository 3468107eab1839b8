import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hierperc.lattice import (
    LatticeParams,
    Point,
    add,
    annulus_size,
    ball_points,
    decode,
    distance,
    encode,
    first_in_annulus,
    japanese_bracket,
    neg,
    norm,
    sample_uniform_annulus,
    separation_level,
    triple_count,
)


def points(d=1, L=2, max_level=8):
    return st.lists(st.integers(0, L**d - 1), max_size=max_level).map(lambda ds: Point(tuple(ds), d, L))


lattices = st.sampled_from([(1, 2), (1, 3), (2, 2), (1, 4), (3, 2)])


@st.composite
def triples(draw):
    d, L = draw(lattices)
    return tuple(draw(points(d, L)) for _ in range(3))


def test_norm_examples():
    assert norm(Point.zero()) == 0
    assert norm(Point((1, 0, 1))) == 8
    assert norm(Point(((0, 1), (1, 1)), d=2, L=2)) == 4
    assert japanese_bracket(Point.zero()) == 1


def test_add_examples():
    assert add(Point((1, 1)), Point((1, 0))) == Point((0, 1))
    p = Point((1, 0, 1))
    assert p + Point.zero() == p
    assert add(Point((2,), L=3), Point((2,), L=3)) == Point((1,), L=3)


def test_addition_never_carries():
    # base-2 integers would give 1 + 1 = (0, 1)
    assert Point((1,)) + Point((1,)) == Point.zero()
    assert Point((1, 1)) + Point((1,)) == Point((0, 1))


def test_canonical_form_trims_zeros():
    p = Point((1, 0, 0))
    assert p.digits == (1,)
    assert Point((0, 0)) == Point.zero()


@pytest.mark.parametrize("d,L,k,expected", [(1, 2, 3, 4), (2, 2, 1, 3), (1, 4, 2, 12), (1, 2, 0, 1)])
def test_annulus_size(d, L, k, expected):
    assert annulus_size(k, LatticeParams(d, L)) == expected


def test_annulus_rejects_negative():
    with pytest.raises(ValueError):
        annulus_size(-1, LatticeParams(1, 2))


@given(triples())
def test_ultrametric_inequality(t):
    x, y, z = t
    a, b, c = distance(x, y), distance(y, z), distance(x, z)
    assert c <= max(a, b)
    if a != b:
        assert c == max(a, b)


@given(triples())
def test_translation_invariance(t):
    x, y, g = t
    assert distance(x, y) == distance(x + g, y + g)


@given(lattices.flatmap(lambda dl: points(*dl)))
def test_inverse(p):
    assert add(p, neg(p)) == Point.zero(p.d, p.L)
    assert p - p == Point.zero(p.d, p.L)


@given(lattices.flatmap(lambda dl: st.tuples(points(*dl), points(*dl))))
def test_separation_level_matches_norm(pq):
    p, q = pq
    h = separation_level(p, q)
    assert distance(p, q) == (p.L**h if h else 0)


@given(lattices.flatmap(lambda dl: points(*dl)))
def test_packed_index_round_trip(p):
    assert Point.from_index(p.index(), p.d, p.L) == p
    assert decode(encode(p), p.d, p.L) == p


def test_encoding():
    assert encode(Point((1, 0, 1))) == "1,0,1"
    assert encode(Point.zero()) == "0"
    assert decode("0") == Point.zero()


@pytest.mark.parametrize("d,L,n", [(1, 2, 4), (2, 2, 2), (1, 3, 3)])
def test_ball_enumeration(d, L, n):
    pts = list(ball_points(LatticeParams(d, L, n)))
    assert len(pts) == L ** (d * n) == len(set(pts))
    assert all(norm(p) <= L**n for p in pts)
    assert [p.index() for p in pts] == list(range(len(pts)))


def test_first_in_annulus_has_right_norm():
    lat = LatticeParams(2, 3)
    for k in range(1, 5):
        assert norm(Point.from_index(first_in_annulus(k, lat), 2, 3)) == 3**k


def test_sample_uniform_annulus():
    lat = LatticeParams(1, 2)
    gen = np.random.default_rng(1)
    assert all(sample_uniform_annulus(1, lat, gen) == Point((1,)) for _ in range(20))
    assert all(norm(sample_uniform_annulus(4, lat, gen)) == 16 for _ in range(200))
    # annulus 2 of d=1, L=2 holds (0,1) and (1,1); chi-square at 10^5 draws
    draws = 100_000
    counts = np.zeros(2)
    for _ in range(draws):
        counts[sample_uniform_annulus(2, lat, gen).digit(1)] += 1
    expected = draws / 2
    chi2 = ((counts - expected) ** 2 / expected).sum()
    assert chi2 < 16.0  # 4 sigma for one degree of freedom


def _brute_triples(lat, n):
    pts = list(ball_points(lat, n))
    out = {}
    for x, y in itertools.product(pts, repeat=2):
        key = (x.level, y.level, separation_level(x, y))
        out[key] = out.get(key, 0) + 1
    return out


@pytest.mark.parametrize("d,L,n", [(1, 2, 1), (1, 2, 2), (1, 2, 4), (1, 3, 2), (1, 4, 2), (2, 2, 2), (1, 2, 8), (2, 2, 4), (4, 2, 2)])
def test_triple_count_matches_enumeration(d, L, n):
    lat = LatticeParams(d, L, n)
    if lat.ball_size(n) > 256:
        pytest.skip("beyond brute-force size")
    brute = _brute_triples(lat, n)
    total = 0
    for j, k, m in itertools.product(range(n + 1), repeat=3):
        c = triple_count(j, k, m, n, lat)
        assert c == brute.get((j, k, m), 0), (j, k, m)
        total += c
    assert total == lat.ball_size(n) ** 2


def test_triple_count_examples():
    lat = LatticeParams(1, 2)
    assert triple_count(1, 2, 1, 3, lat) == 0
    assert triple_count(1, 2, 2, 2, lat) == 2
    with pytest.raises(ValueError):
        triple_count(0, 3, 3, 2, lat)
