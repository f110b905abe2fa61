import numpy as np
import pytest

from crossnorm import (
    INF,
    BudgetError,
    CapabilityError,
    LpSpace,
    OperatorTensor,
    Tensor,
    injective_norm,
    projective_norm,
    single_tensor,
)
from crossnorm.oracle import (
    Certainty,
    closed_form_injective,
    closed_form_projective,
    grid_injective,
    jacobi_singular_values,
    kron_matrix,
    kron_spectral,
    random_decomposition_search,
    svd_nuclear,
    svd_spectral,
)
from crossnorm.spaces import make_rng

from conftest import EXPONENTS, l2


def test_svd_examples():
    assert svd_spectral(np.diag([3.0, 1.0])) == pytest.approx(3.0)
    assert svd_spectral([[0.0, 1.0], [1.0, 0.0]]) == pytest.approx(1.0)
    u, v = np.array([1.0, 2.0, 2.0]), np.array([3.0, 4.0])
    assert svd_spectral(np.outer(u, v)) == pytest.approx(15.0)
    assert svd_nuclear(np.outer(u, v)) == pytest.approx(15.0)
    assert svd_nuclear(np.eye(4)) == pytest.approx(4.0)
    assert svd_nuclear(np.diag([2.0, 1.0])) == pytest.approx(3.0)


def test_jacobi_agrees_with_lapack():
    rng = make_rng(0)
    for shape in [(2, 2), (3, 5), (6, 4), (9, 9)]:
        M = rng.standard_normal(shape)
        assert np.allclose(jacobi_singular_values(M), np.linalg.svd(M, compute_uv=False), rtol=0, atol=1e-12)


def test_kron_examples():
    X = l2(2)
    assert kron_spectral(OperatorTensor.identity(X, X)).value == pytest.approx(1.0)
    rng = make_rng(1)
    A, B = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
    assert kron_spectral(OperatorTensor([(A, B), (-A, B)], X, X)).value == pytest.approx(0.0, abs=1e-14)


def test_kron_singular_values_multiply():
    rng = make_rng(2)
    for _ in range(100):
        n, m = rng.integers(1, 4, size=2)
        A, B = rng.standard_normal((n, n)), rng.standard_normal((m, m))
        L = OperatorTensor.single(A, B, l2(n), l2(m))
        res = kron_spectral(L)
        assert res.certainty is Certainty.EXACT
        assert res.value == pytest.approx(svd_spectral(A) * svd_spectral(B), rel=1e-10)


def test_kron_matrix_uses_column_major_flattening():
    rng = make_rng(3)
    L = OperatorTensor([(rng.standard_normal((2, 3)), rng.standard_normal((4, 2)))], l2(3), l2(2), l2(2), l2(4))
    F = rng.standard_normal((3, 2))
    assert np.allclose(kron_matrix(L) @ F.ravel(order="F"), L.matrix_apply(F).ravel(order="F"))


def test_kron_oracle_rejects_non_hilbert_spaces():
    X = LpSpace(2, 1)
    with pytest.raises(CapabilityError):
        kron_spectral(OperatorTensor.identity(X, X))


def test_grid_examples_and_refinement():
    F = Tensor(np.eye(2), l2(2), l2(2))
    assert grid_injective(F, 64).value == pytest.approx(1.0, abs=1e-12)
    x, y = np.array([0.3, -1.2, 0.4]), np.array([2.0, 0.1])
    G = single_tensor(x, y, l2(3), l2(2))
    assert grid_injective(G, 400).value == pytest.approx(np.linalg.norm(x) * np.linalg.norm(y), rel=1e-4)
    H = Tensor(make_rng(4).standard_normal((3, 3)), LpSpace(3, 1.5), LpSpace(3, 3.0))
    values = [grid_injective(H, r).value for r in (4, 16, 50, 100, 400)]
    assert all(a <= b + 1e-12 for a, b in zip(values, values[1:]))


def test_grid_refuses_large_dims():
    with pytest.raises(BudgetError):
        grid_injective(Tensor(np.ones((4, 2)), l2(4), l2(2)))
    with pytest.raises(BudgetError):
        random_decomposition_search(Tensor(np.ones((2, 4)), l2(2), l2(4)))


def test_random_search_examples():
    F = Tensor(np.eye(2), l2(2), l2(2))
    res = random_decomposition_search(F, samples=500)
    assert res.certainty is Certainty.SAMPLED_UPPER
    assert 2.0 - 1e-12 <= res.value <= 2.0 + 1e-9
    assert random_decomposition_search(Tensor(np.zeros((2, 2)), l2(2), l2(2)), samples=10).value == 0.0
    x, y = np.array([1.0, 2.0]), np.array([-1.0, 0.5, 0.5])
    X, Y = LpSpace(2, 3.0), LpSpace(3, INF)
    G = single_tensor(x, y, X, Y)
    assert random_decomposition_search(G, samples=1).value == pytest.approx(
        np.sum(np.abs(x) ** 3) ** (1 / 3) * 1.0, rel=1e-12
    )


@pytest.mark.parametrize("p", EXPONENTS)
@pytest.mark.parametrize("q", EXPONENTS)
def test_estimators_agree_with_oracles(p, q):
    rng = make_rng(5)
    X, Y = LpSpace(3, p), LpSpace(2, q)
    for _ in range(2):
        F = Tensor(rng.standard_normal((3, 2)), X, Y)
        inj, proj = injective_norm(F), projective_norm(F)
        grid = grid_injective(F, 400)
        # grid points are feasible, so a correct estimate dominates them
        assert grid.value <= inj.value + 1e-9
        assert inj.value <= grid.value * (1 + 1e-4) + 1e-12
        closed = closed_form_injective(F)
        if closed is not None:
            assert inj.value == pytest.approx(closed.value, abs=1e-9)
        sampled = random_decomposition_search(F, samples=10_000)
        assert proj.value <= sampled.value + 1e-9
        closed = closed_form_projective(F)
        if closed is not None:
            assert proj.value == pytest.approx(closed.value, abs=1e-9)
        elif X.is_polyhedral or Y.is_polyhedral:
            # exact pricing certifies the bracket without any oracle
            assert proj.lo >= proj.value * (1 - 1e-3)


@pytest.mark.xfail(reason="sampled decompositions stall in local minima above the optimum; see the decisions ledger", strict=False)
def test_sampled_oracle_reaches_the_projective_estimate():
    rng = make_rng(6)
    gaps = []
    for p, q in [(1.5, 3.0), (2.0, 1.5), (3.0, 3.0), (2.0, 3.0)]:
        F = Tensor(rng.standard_normal((3, 3)), LpSpace(3, p), LpSpace(3, q))
        est = projective_norm(F).value
        gaps.append(random_decomposition_search(F, samples=10_000).value / est - 1)
    assert max(gaps) <= 1e-3
