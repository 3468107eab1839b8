import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hierperc.kernel import ModelParams, tail_sum
from hierperc.lattice import LatticeParams
from hierperc.oracle import ball_pairs, connected_set_law, enumerate_exact, exact_phi

# frozen with an independent arbitrary-precision enumeration at
# (d, L, alpha, beta) = (1, 2, 0.5, 0.4)
MEAN_ROOT_2 = 1.2600551549716064
CONNECT_01 = 0.13649422017998728
CONNECT_02 = 0.061780467395809582
KMAX_LAW_2 = {1: 0.61702686637042595, 2: 0.3314904507345912, 3: 0.045919707160833405, 4: 0.0055629757341494529}
ROOT_LAW_2 = {1: 0.78551057686731751, 2: 0.17448666702790797, 3: 0.034439780370625062, 4: 0.005562975734149454}
PHI_1 = 0.38272503812005661


def model(alpha=0.5, beta=0.4, d=1, L=2):
    return ModelParams(LatticeParams(d, L, 0), alpha, beta)


def test_frozen_values_n2():
    law = enumerate_exact(model(), 2)
    assert law.total_mass == pytest.approx(1.0, abs=1e-14)
    assert law.mean_root_size() == pytest.approx(MEAN_ROOT_2, rel=1e-13)
    assert law.connection(0, 1) == pytest.approx(CONNECT_01, rel=1e-13)
    assert law.connection(0, 2) == pytest.approx(CONNECT_02, rel=1e-13)
    assert law.connection(0, 3) == pytest.approx(CONNECT_02, rel=1e-13)
    for k, p in KMAX_LAW_2.items():
        assert law.max_law()[k] == pytest.approx(p, rel=1e-12)
    for k, p in ROOT_LAW_2.items():
        assert law.root_law()[k] == pytest.approx(p, rel=1e-12)


def test_phi_n1():
    assert exact_phi(model(), 1) == pytest.approx(PHI_1, rel=1e-13)
    # below the lower bound for beta_c, phi stays under 1
    assert exact_phi(model(), 1) < 1.0


def test_two_points_closed_form():
    p = model(beta=1.3)
    law = enumerate_exact(p, 1)
    p1 = -math.expm1(-1.3 * 2**-1.5)
    assert law.root_law() == pytest.approx({1: 1 - p1, 2: p1}, rel=1e-14)
    assert law.mean_census() == pytest.approx(1 + p1, rel=1e-14)


def test_three_point_ball_closed_form():
    # L = 3, d = 1: triangle with equal edge probability
    p = ModelParams(LatticeParams(1, 3, 0), 0.5, 0.7)
    q = 1 + math.expm1(-0.7 * 3**-1.5)
    law = enumerate_exact(p, 1)
    one_cluster = 1 - 3 * q**2 + 2 * q**3
    assert law.multiset_law()[(3,)] == pytest.approx(one_cluster, rel=1e-13)
    assert law.multiset_law()[(1, 1, 1)] == pytest.approx(q**3, rel=1e-13)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.1, 0.9), st.floats(0.0, 4.0))
def test_enumeration_matches_recursion(alpha, beta):
    p = model(alpha, beta)
    law = enumerate_exact(p, 2)
    sets = connected_set_law(p, 2)
    for k, prob in law.root_law().items():
        alt = math.fsum(v for S, v in sets.items() if len(S) == k)
        assert prob == pytest.approx(alt, abs=1e-13)
    for x in range(1, 4):
        alt = math.fsum(v for S, v in sets.items() if x in S)
        assert law.connection(0, x) == pytest.approx(alt, abs=1e-13)


def test_translation_invariant_connections():
    law = enumerate_exact(model(0.3, 0.9, d=1, L=2), 2)
    M = law.connection_matrix()
    for x in range(4):
        for y in range(4):
            assert M[x, y] == pytest.approx(M[0, x ^ y], abs=1e-14)


def test_two_dimensional_ball():
    law = enumerate_exact(model(1.2, 0.8, d=2, L=2), 1)
    assert law.N == 4
    assert law.total_mass == pytest.approx(1.0, abs=1e-14)
    assert len(ball_pairs(4, 1)) == 6


def test_phi_uses_tail():
    p = model(0.5, 0.4)
    assert exact_phi(p, 2) == pytest.approx(MEAN_ROOT_2 * tail_sum(2, p).value, rel=1e-13)


def test_too_large():
    with pytest.raises(ValueError):
        enumerate_exact(model(), 4)


def test_csv_has_all_observables():
    text = enumerate_exact(model(), 2).to_csv()
    assert text.splitlines()[0] == "observable,value,probability"
    for tag in ("multiset", "kroot", "kmax", "connect_0_3"):
        assert tag in text
