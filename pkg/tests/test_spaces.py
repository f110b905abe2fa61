import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crossnorm import (
    INF,
    BudgetError,
    CapabilityError,
    DimensionError,
    Functional,
    LpSpace,
    dual_exponent,
    dual_norm,
    sample_unit_sphere,
    unit_ball_extreme_points,
    vector_norm,
)
from crossnorm.spaces import make_rng, norming_functional, parse_exponent

from conftest import EXPONENTS


def test_vector_norm_examples():
    assert vector_norm([3, 4], LpSpace(2, 2)) == pytest.approx(5.0, abs=1e-15)
    assert vector_norm([1, -1, 1], LpSpace(3, 1)) == 3.0
    for p in EXPONENTS:
        assert vector_norm(np.zeros(4), LpSpace(4, p)) == 0.0


def test_vector_norm_rejects_wrong_length():
    with pytest.raises(DimensionError):
        vector_norm([1.0, 2.0, 3.0], LpSpace(2, 2))


def test_dual_exponent_examples():
    assert dual_exponent(2) == 2.0
    assert dual_exponent(1) is INF
    assert dual_exponent(INF) == 1.0
    assert dual_exponent(3) == pytest.approx(1.5)
    assert dual_exponent("inf") == 1.0


@given(st.floats(min_value=1.0, max_value=50.0))
def test_dual_exponent_is_an_involution(p):
    q = dual_exponent(p)
    back = dual_exponent(q)
    if back is INF:
        assert p == 1.0
    else:
        assert back == pytest.approx(p, rel=1e-12)
    if q is not INF:
        assert 1 / p + 1 / q == pytest.approx(1.0, abs=1e-12)


def test_infinity_is_a_tag_not_a_float():
    assert parse_exponent(math.inf) is INF
    assert parse_exponent("Infinity") is INF
    assert LpSpace(3, float("inf")).p is INF
    with pytest.raises(ValueError):
        LpSpace(2, 0.5)
    with pytest.raises(ValueError):
        LpSpace(0, 2)


def test_dual_norm_examples():
    assert dual_norm(Functional([1, 1], LpSpace(2, 1))) == 1.0
    assert dual_norm(Functional([3, 4], LpSpace(2, 2))) == pytest.approx(5.0)
    assert dual_norm(Functional([2, -1], LpSpace(2, INF))) == 3.0


@pytest.mark.parametrize("p", EXPONENTS)
def test_hoelder_inequality_on_random_pairs(p):
    rng = make_rng(1, 2)
    s = LpSpace(4, p)
    for _ in range(1000):
        f = Functional(rng.standard_normal(4), s)
        x = rng.standard_normal(4) * rng.exponential()
        assert abs(f(x)) <= dual_norm(f) * vector_norm(x, s) + 1e-12


@pytest.mark.parametrize("p", EXPONENTS)
def test_norm_axioms(p):
    rng = make_rng(3)
    s = LpSpace(5, p)
    for _ in range(200):
        u, v, w = rng.standard_normal((3, 5))
        c = rng.standard_normal()
        assert vector_norm(c * u, s) == pytest.approx(abs(c) * vector_norm(u, s), rel=1e-12, abs=1e-15)
        assert vector_norm(u + v, s) <= vector_norm(u, s) + vector_norm(v, s) + 1e-12
        assert vector_norm(u + w, s) <= vector_norm(u + v, s) + vector_norm(w - v, s) + 1e-12


@pytest.mark.parametrize("p", EXPONENTS)
def test_norming_functional_attains_the_norm(p):
    rng = make_rng(4)
    q = dual_exponent(p)
    for _ in range(100):
        y = rng.standard_normal(4)
        w = norming_functional(y, p)
        assert w @ y == pytest.approx(vector_norm(y, LpSpace(4, p)), rel=1e-12)
        assert vector_norm(w, LpSpace(4, q)) <= 1 + 1e-12


def test_extreme_points_examples():
    e1 = unit_ball_extreme_points(LpSpace(2, 1))
    assert sorted(map(tuple, e1)) == sorted([(1, 0), (-1, 0), (0, 1), (0, -1)])
    einf = unit_ball_extreme_points(LpSpace(2, INF))
    assert sorted(map(tuple, einf)) == sorted([(1, 1), (1, -1), (-1, 1), (-1, -1)])
    with pytest.raises(CapabilityError):
        unit_ball_extreme_points(LpSpace(2, 2))
    with pytest.raises(BudgetError):
        unit_ball_extreme_points(LpSpace(13, INF))


@pytest.mark.parametrize("p", [1.0, INF])
def test_linear_objectives_peak_at_extreme_points(p):
    rng = make_rng(5)
    s = LpSpace(5, p)
    E = unit_ball_extreme_points(s)
    assert np.allclose([vector_norm(e, s) for e in E], 1.0)
    for _ in range(200):
        c = rng.standard_normal(5)
        assert np.max(E @ c) == pytest.approx(dual_norm(Functional(c, s)), abs=1e-12)


@pytest.mark.parametrize("p", EXPONENTS)
def test_sphere_samples_are_unit_and_deterministic(p):
    s = LpSpace(3, p)
    for seed in range(20):
        v = sample_unit_sphere(s, seed)
        assert vector_norm(v, s) == pytest.approx(1.0, abs=1e-12)
    assert np.array_equal(sample_unit_sphere(LpSpace(2, 1), 7), sample_unit_sphere(LpSpace(2, 1), 7))


def test_dual_space_swaps_exponents():
    assert LpSpace(3, 1).dual == LpSpace(3, INF)
    assert LpSpace(3, 3).dual.p == pytest.approx(1.5)
