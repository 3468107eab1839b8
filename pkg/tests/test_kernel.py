import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hierperc.kernel import (
    J_level,
    LevelTable,
    ModelParams,
    hazard_beyond,
    level_hazards,
    load_params,
    p_level,
    params_from_dict,
    params_to_dict,
    save_params,
    tail_sum,
)
from hierperc.lattice import LatticeParams

# 40-digit mpmath evaluations, (d, L, alpha, beta) = (1, 2, 0.5, 0.4)
P1 = 0.13187655460541512355
P2 = 0.048770575499285990909
T1 = 0.33813319709010039151
T0 = 0.47000975169551551506


def model(alpha=0.5, beta=0.4, d=1, L=2, n=0, kernel=None):
    kw = {} if kernel is None else {"kernel": kernel}
    return ModelParams(LatticeParams(d, L, n), alpha, beta, **kw)


def test_p_level_values():
    p = model()
    assert J_level(2, p) == 0.125
    assert p_level(1, p) == pytest.approx(P1, rel=1e-15)
    assert p_level(2, p) == pytest.approx(P2, rel=1e-15)
    assert all(p_level(k, model(beta=0.0)) == 0.0 for k in range(1, 10))


@given(st.floats(0.05, 0.95), st.floats(0.01, 5.0))
def test_p_level_monotone_in_level(alpha, beta):
    p = model(alpha, beta)
    vals = [p_level(k, p) for k in range(1, 12)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


@given(st.floats(0.05, 0.95), st.integers(1, 8), st.floats(0.01, 3.0), st.floats(0.01, 3.0))
def test_p_level_monotone_in_beta(alpha, k, b1, b2):
    lo, hi = sorted((b1, b2))
    if lo == hi:
        return
    assert p_level(k, model(alpha, lo)) < p_level(k, model(alpha, hi))


@pytest.mark.parametrize("k", [1, 3, 7])
def test_small_beta_limit(k):
    for beta in (1e-6, 1e-8, 1e-10):
        p = model(beta=beta)
        J = J_level(k, p)
        assert p_level(k, p) / beta == pytest.approx(J, rel=beta)
        assert p_level(k, p) / beta == pytest.approx(J * (1 - beta * J / 2), rel=1e-10)


def test_tail_sum_values():
    t = tail_sum(1, model())
    assert t.value == pytest.approx(T1, rel=1e-13)
    assert t.linear_bound == pytest.approx(0.4 * 0.5 * 2**-1 / (1 - 2**-0.5), rel=1e-15)
    assert t.linear_bound == pytest.approx(0.341421356237, rel=1e-11)
    assert tail_sum(0, model()).value == pytest.approx(T0, rel=1e-13)
    assert tail_sum(3, model(beta=0.0)).value == 0.0


@given(st.floats(0.05, 0.95), st.floats(0.0, 10.0), st.integers(0, 30))
def test_tail_sum_below_linear_bound(alpha, beta, n):
    t = tail_sum(n, model(alpha, beta))
    assert 0.0 <= t.value <= t.linear_bound * (1 + 1e-12)


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
def test_tail_sum_ratio_tends_to_L_alpha(alpha):
    p = model(alpha, 1.0)
    for n in range(10, 20):
        ratio = tail_sum(n, p).value / tail_sum(n + 1, p).value
        assert 2**alpha * 0.95 <= ratio <= 2**alpha * 1.05


def test_hazards_sum_to_tail():
    p = model(0.3, 0.7)
    hz = level_hazards(p, 40)
    total = hz[11:].sum() + hazard_beyond(p, 40)
    assert total == pytest.approx(hazard_beyond(p, 10), rel=1e-12)


def test_model_validation():
    with pytest.raises(ValueError):
        model(alpha=1.0)
    with pytest.raises(ValueError):
        model(alpha=0.0)
    with pytest.raises(ValueError):
        model(beta=-0.1)


def test_level_table_bounds_checked():
    ok = LevelTable((0.3, 0.1), c=0.5, C=1.5)
    p = model(kernel=ok)
    assert J_level(1, p) == 0.3
    assert J_level(3, p) == pytest.approx(0.1 * 2**-1.5)
    with pytest.raises(ValueError):
        model(kernel=LevelTable((0.9,), c=0.5, C=1.5))
    with pytest.raises(ValueError):
        LevelTable((0.3,), c=2.0, C=1.0)


def test_tail_bound_uses_upper_constant():
    p = model(kernel=LevelTable((0.5, 0.1767766952966369), c=1.0, C=1.5))
    t = tail_sum(2, p)
    assert t.value <= t.linear_bound


def test_serialization_round_trip(tmp_path):
    p = model(0.3, 0.123456789, d=2, L=3, n=4)
    assert params_from_dict(params_to_dict(p)) == p
    q = model(kernel=LevelTable((0.3, 0.1), c=0.5, C=1.5))
    path = tmp_path / "model.cfg"
    save_params(q, path)
    assert load_params(path) == q
    assert "J_2=" in path.read_text()


def test_serialization_rejects_bad_keys():
    base = params_to_dict(model())
    with pytest.raises(ValueError):
        params_from_dict({**base, "kernel": "gauss"})
    with pytest.raises(ValueError):
        params_from_dict({k: v for k, v in base.items() if k != "alpha"})
    assert math.isfinite(float(base["beta"]))
