import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crossnorm import (
    HILBERTIAN,
    INF,
    INJECTIVE,
    PROJECTIVE,
    Budget,
    Direction,
    LpSpace,
    NormEstimate,
    OperatorTensor,
    Tensor,
    Verdict,
    check_corollary_44,
    check_gamma,
    check_prop_32_dual_bound,
    check_question4,
    check_remark_chain,
    check_sandwich,
    check_theorem_41,
    check_uniform_identity,
    entrywise,
    equivalence_ratio,
    equivalence_ratio_inf,
    gamma_constant,
    single_tensor,
)
from crossnorm.oracle import kron_spectral, svd_nuclear, svd_spectral
from crossnorm.spaces import make_rng
from crossnorm.verify import compare, worst

from conftest import l2

FAST = Budget(restarts=8, max_iters=100)


def _est(value, direction, **kw):
    return NormEstimate(value, direction, **kw)


# -- verdict logic -------------------------------------------------------------


def test_exact_comparisons():
    assert compare(_est(1.0, Direction.EXACT), _est(2.0, Direction.EXACT), 1e-6).verdict is Verdict.HOLDS
    assert compare(_est(2.0, Direction.EXACT), _est(1.0, Direction.EXACT), 1e-6).verdict is Verdict.VIOLATED
    near = compare(_est(1.0 + 1e-8, Direction.EXACT), _est(1.0, Direction.EXACT), 1e-6)
    assert near.verdict is Verdict.HOLDS_WITH_SLACK


def test_uncertifiable_directions_are_inconclusive():
    # an upper bound on the left says nothing about a <= b
    c = compare(_est(5.0, Direction.UPPER), _est(1.0, Direction.LOWER), 1e-6)
    assert c.verdict is Verdict.INCONCLUSIVE
    c = compare(_est(1.0, Direction.LOWER), _est(2.0, Direction.LOWER), 1e-6)
    assert c.verdict is Verdict.INCONCLUSIVE
    c = compare(_est(1.0, Direction.HEURISTIC), _est(2.0, Direction.EXACT), 1e-6)
    assert c.verdict is Verdict.INCONCLUSIVE


def test_brackets_can_prove_an_inequality():
    a = _est(1.0, Direction.LOWER, upper=1.5)
    b = _est(2.0, Direction.LOWER)
    c = compare(a, b, 1e-6)
    assert c.proven and c.verdict is Verdict.HOLDS


@given(
    upper=st.floats(0.0, 100.0),
    excess=st.floats(1e-5, 100.0),
)
def test_inflated_lower_bound_above_certified_upper_is_violated(upper, excess):
    lower = _est(upper + excess, Direction.LOWER)
    for right in (_est(upper, Direction.UPPER), _est(upper, Direction.EXACT)):
        assert compare(lower, right, 1e-6).verdict is Verdict.VIOLATED


def test_record_verdict_is_the_worst_comparison():
    assert worst([Verdict.HOLDS, Verdict.INCONCLUSIVE, Verdict.HOLDS_WITH_SLACK]) is Verdict.INCONCLUSIVE
    assert worst([Verdict.HOLDS, Verdict.VIOLATED, Verdict.INCONCLUSIVE]) is Verdict.VIOLATED
    assert worst([]) is Verdict.HOLDS


# -- sandwich ----------------------------------------------------------------------


def test_sandwich_examples():
    X = l2(2)
    rec = check_sandwich(Tensor(np.eye(2), X, X), HILBERTIAN)
    assert [est.value for _, est in rec.sides] == pytest.approx([1.0, np.sqrt(2), 2.0])
    assert rec.verdict is Verdict.HOLDS
    for tag in (INJECTIVE, PROJECTIVE, HILBERTIAN):
        rec = check_sandwich(single_tensor([1.0, 2.0], [3.0, -1.0], X, X), tag)
        assert rec.verdict is Verdict.HOLDS
        assert max(abs(s) for s in rec.slacks) <= 1e-12
        rec = check_sandwich(Tensor(np.zeros((2, 2)), X, X), tag)
        assert rec.verdict is Verdict.HOLDS
        assert all(est.value == 0.0 for _, est in rec.sides)


def test_sandwich_record_is_serializable():
    F = Tensor(make_rng(0).standard_normal((3, 2)), LpSpace(3, 1.5), LpSpace(2, 1.5))
    rec = check_sandwich(F, entrywise(1.5), FAST)
    d = json.loads(json.dumps(rec.to_dict()))
    assert d["name"] == "sandwich"
    assert d["metadata"]["budget"] == {"restarts": 8, "max_iters": 100}
    assert {s["direction"] for s in d["sides"]} <= {"Exact", "LowerBound", "UpperBound", "Heuristic"}
    assert rec.verdict is not Verdict.VIOLATED


# -- uniform identity ------------------------------------------------------------


def test_uniform_identity_examples():
    X = l2(2)
    rec = check_uniform_identity(np.diag([2.0, 1.0]), np.diag([3.0, 0.5]), HILBERTIAN, X, X)
    assert rec.side("induced").value == pytest.approx(6.0, abs=1e-8)
    assert rec.verdict is Verdict.HOLDS
    rng = make_rng(1)
    A, B = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
    rec = check_uniform_identity(A, B, HILBERTIAN, X, X)
    assert rec.metadata["abs_difference"] <= 1e-8
    assert rec.side("induced").value == pytest.approx(kron_spectral(OperatorTensor.single(A, B, X, X)).value, abs=1e-8)
    rec = check_uniform_identity(np.zeros((2, 2)), B, HILBERTIAN, X, X)
    assert rec.side("induced").value == 0.0 and rec.side("product").value == 0.0
    assert rec.verdict is Verdict.HOLDS


@pytest.mark.parametrize("tag", [INJECTIVE, PROJECTIVE])
def test_uniform_identity_for_injective_and_projective(tag):
    rng = make_rng(2)
    X, Y = l2(2), l2(3)
    A, B = rng.standard_normal((2, 2)), rng.standard_normal((3, 3))
    rec = check_uniform_identity(A, B, tag, X, Y, budget=FAST)
    assert rec.verdict is not Verdict.VIOLATED
    assert rec.side("induced").value == pytest.approx(rec.side("product").value, rel=1e-6)


# -- operator-tensor chain ------------------------------------------------------


def test_operator_chain_examples():
    X = l2(2)
    rng = make_rng(3)
    A, B = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
    rec = check_theorem_41(OperatorTensor.single(A, B, X, X), HILBERTIAN)
    target = svd_spectral(A) * svd_spectral(B)
    assert all(est.value == pytest.approx(target, abs=1e-6) for _, est in rec.sides)
    assert rec.verdict is not Verdict.VIOLATED
    rec = check_theorem_41(OperatorTensor.identity(X, X), HILBERTIAN)
    assert rec.side("[hilbertian,hilbertian]").value == pytest.approx(1.0)
    assert rec.side("operator-injective").value <= 1 + 1e-12 <= rec.side("operator-projective").value + 2e-12
    rec = check_theorem_41(OperatorTensor([(A, B), (-A, B)], X, X), HILBERTIAN)
    assert all(est.value == pytest.approx(0.0, abs=1e-12) for _, est in rec.sides)


def test_operator_chain_on_random_operator_tensors():
    rng = make_rng(4)
    for _ in range(5):
        L = OperatorTensor([(rng.standard_normal((3, 2)), rng.standard_normal((2, 3))) for _ in range(3)], l2(2), l2(3), l2(3), l2(2))
        rec = check_theorem_41(L, HILBERTIAN, FAST)
        assert rec.verdict in (Verdict.HOLDS, Verdict.HOLDS_WITH_SLACK)


# -- weighted chain and equivalence constants -------------------------------------


def test_equivalence_constants_on_two_by_two():
    X = l2(2)
    sup = equivalence_ratio(PROJECTIVE, HILBERTIAN, X, X)
    inf = equivalence_ratio_inf(INJECTIVE, HILBERTIAN, X, X)
    assert sup.value == pytest.approx(np.sqrt(2), abs=1e-3)
    assert inf.value == pytest.approx(1 / np.sqrt(2), abs=1e-3)
    W = sup.witness
    assert svd_nuclear(W) / np.linalg.norm(W) == pytest.approx(sup.value, abs=1e-9)


def test_weighted_chain_examples():
    X = l2(2)
    rng = make_rng(5)
    A, B = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
    rec = check_corollary_44(OperatorTensor.single(A, B, X, X), HILBERTIAN)
    assert rec.verdict is Verdict.HOLDS
    assert min(rec.slacks) > 0
    rec = check_corollary_44(OperatorTensor([(A, B), (-A, B)], X, X), HILBERTIAN)
    assert rec.verdict is Verdict.HOLDS
    assert rec.side("[hilbertian,hilbertian]").value == 0.0


def test_weighted_chain_combines_domain_and_codomain_ratios():
    rng = make_rng(6)
    L = OperatorTensor([(rng.standard_normal((3, 2)), rng.standard_normal((3, 2)))], l2(2), l2(2), l2(3), l2(3))
    rec = check_corollary_44(L, HILBERTIAN, FAST)
    assert rec.metadata["ratio_pairs"] == "domain+codomain"
    # the larger supremum comes from the 3 x 3 codomain pair
    assert rec.side("c_sup").value == pytest.approx(np.sqrt(3), abs=1e-3)
    assert rec.side("c_inf").value == pytest.approx(1 / np.sqrt(3), abs=1e-3)
    assert rec.verdict is not Verdict.VIOLATED


def test_equivalence_ratio_examples():
    for n in (2, 3):
        g = equivalence_ratio(PROJECTIVE, INJECTIVE, l2(n), l2(n))
        assert g.value == pytest.approx(n, abs=1e-6)
        assert gamma_constant(l2(n), l2(n)).value == g.value
    assert equivalence_ratio(PROJECTIVE, HILBERTIAN, l2(2), l2(2)).value == pytest.approx(np.sqrt(2), abs=1e-6)


@given(
    tag=st.sampled_from(["injective", "projective", "entrywise"]),
    p=st.sampled_from([1.0, 1.5, 2.0, 3.0, INF]),
    n=st.integers(1, 6),
    m=st.integers(1, 6),
)
def test_same_tag_ratio_is_exactly_one(tag, p, n, m):
    from crossnorm import CrossnormTag

    t = CrossnormTag.parse(tag, p=p)
    est = equivalence_ratio(t, t, LpSpace(n, p), LpSpace(m, p))
    assert est.value == 1.0 and est.direction is Direction.EXACT


def test_gamma_record():
    rec = check_gamma(l2(3), l2(3))
    assert rec.side("gamma").value == pytest.approx(3.0, abs=1e-3)
    assert rec.side("identity-ratio").value == pytest.approx(3.0)
    assert rec.verdict is Verdict.HOLDS


# -- four-term chain ---------------------------------------------------------------


def test_four_term_chain_examples():
    X = l2(2)
    rng = make_rng(7)
    A, B = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
    rec = check_remark_chain(OperatorTensor.single(A, B, X, X), HILBERTIAN)
    target = svd_spectral(A) * svd_spectral(B)
    assert all(est.value == pytest.approx(target, abs=1e-4) for _, est in rec.sides)
    rec = check_remark_chain(OperatorTensor.identity(X, X), HILBERTIAN)
    assert [est.value for _, est in rec.sides] == pytest.approx([1.0, 1.0, 1.0, 1.0], abs=1e-9)
    rec = check_remark_chain(OperatorTensor([(A, B), (-A, B)], X, X), HILBERTIAN)
    assert all(est.value == pytest.approx(0.0, abs=1e-12) for _, est in rec.sides)
    assert rec.verdict is not Verdict.VIOLATED


def test_four_term_chain_first_link_compares_two_lower_bounds():
    # both sides approximate the same supremum from below, so no verdict is certifiable
    rng = make_rng(8)
    L = OperatorTensor([(rng.standard_normal((2, 2)), rng.standard_normal((2, 2))) for _ in range(2)], l2(2), l2(2))
    rec = check_remark_chain(L, HILBERTIAN, FAST)
    first = rec.comparisons[0]
    assert first.verdict is Verdict.INCONCLUSIVE
    assert abs(first.slack) <= 1e-6 * rec.sides[0][1].value
    assert all(c.verdict is Verdict.HOLDS for c in rec.comparisons[1:])


# -- functional tensors ------------------------------------------------------------


def test_functional_tensor_bound_examples():
    X = l2(2)
    rng = make_rng(9)
    u, v, s, t = rng.standard_normal((4, 2))
    rec = check_prop_32_dual_bound(np.outer(u, v), np.outer(s, t), HILBERTIAN, X, X)
    bound = np.linalg.norm(u) * np.linalg.norm(v) * np.linalg.norm(s) * np.linalg.norm(t)
    assert rec.side("functional-tensor").value <= bound + 1e-6
    assert rec.verdict is not Verdict.VIOLATED
    rec = check_prop_32_dual_bound(np.zeros((2, 2)), np.outer(s, t), HILBERTIAN, X, X)
    assert rec.side("functional-tensor").value == 0.0
    rec = check_prop_32_dual_bound(np.eye(2), np.eye(2), HILBERTIAN, X, X)
    assert rec.side("functional-tensor").value <= 4 + 1e-6
    assert rec.side("dual-norm-product").value == pytest.approx(4.0)


# -- ordering of induced norms ----------------------------------------------------


def test_induced_ordering_trace_map_is_a_certified_counterexample():
    # L(F) = tr(F) E_11 has [inj,inj] = n but [frobenius,frobenius] = sqrt(n)
    n = 3
    X = l2(n)
    E = np.eye(n)
    terms = [(np.outer(E[0], E[i]), np.outer(E[0], E[i])) for i in range(n)]
    L = OperatorTensor(terms, X, X)
    rec = check_question4(L, HILBERTIAN)
    assert not rec.paper_proved
    assert rec.side("[hilbertian,hilbertian]").value == pytest.approx(math.sqrt(n))
    assert kron_spectral(L).value == pytest.approx(math.sqrt(n))
    assert rec.side("[injective,injective]").value == pytest.approx(n, abs=1e-6)
    assert rec.verdict is Verdict.VIOLATED
