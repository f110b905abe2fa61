"""
Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]`` or ``[FAIL]`` line naming its
criterion, so ``pytest tests/test_acceptance.py`` doubles as a report.
Run directly with ``python tests/test_acceptance.py``.
"""

import contextlib
import json
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from crossnorm import (
    HILBERTIAN,
    INF,
    INJECTIVE,
    PROJECTIVE,
    Direction,
    LpSpace,
    OperatorTensor,
    Tensor,
    Verdict,
    check_corollary_44,
    check_prop_32_dual_bound,
    check_remark_chain,
    check_sandwich,
    check_theorem_41,
    check_uniform_identity,
    entrywise,
    equivalence_ratio,
    equivalence_ratio_inf,
    gamma_constant,
    injective_norm,
    projective_norm,
)
from crossnorm.oracle import (
    closed_form_injective,
    grid_injective,
    random_decomposition_search,
    svd_nuclear,
    svd_spectral,
)
from crossnorm.spaces import make_rng

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
EXPONENTS = (1.0, 1.5, 2.0, 3.0, INF)
CERTIFIED = (Verdict.HOLDS, Verdict.HOLDS_WITH_SLACK)


@pytest.fixture
def criterion(capsys):
    """Print one pass/fail line for the criterion checked inside the block."""

    @contextlib.contextmanager
    def run(label):
        start = time.perf_counter()
        try:
            yield
        except BaseException as exc:
            with capsys.disabled():
                print(f"\n[FAIL] {label} ({time.perf_counter() - start:.1f} s): {str(exc).splitlines()[0] if str(exc) else type(exc).__name__}")
            raise
        with capsys.disabled():
            print(f"\n[PASS] {label} ({time.perf_counter() - start:.1f} s)")

    return run


def _l2(n):
    return LpSpace(int(n), 2.0)


def _random_l2_operator_tensor(rng, max_dim=3, max_terms=3):
    n, m, k, l = (int(d) for d in rng.integers(1, max_dim + 1, size=4))
    J = int(rng.integers(1, max_terms + 1))
    return OperatorTensor([(rng.standard_normal((k, n)), rng.standard_normal((l, m))) for _ in range(J)],
                          _l2(n), _l2(m), _l2(k), _l2(l))


def _certified(record):
    return all(c.tested or c.proven for c in record.comparisons)


def test_criterion_1_sandwich(criterion):
    with criterion("1 sandwich: 200 tensors, entrywise p-norms, zero certified violations, < 60 s"):
        start = time.perf_counter()
        rng = make_rng(101)
        violated = 0
        for t in range(200):
            p = EXPONENTS[t % len(EXPONENTS)]
            n, m = (int(d) for d in rng.integers(1, 5, size=2))
            F = Tensor(rng.standard_normal((n, m)), LpSpace(n, p), LpSpace(m, p))
            rec = check_sandwich(F, entrywise(p), tol=1e-6, stream=t)
            violated += rec.verdict is Verdict.VIOLATED
        elapsed = time.perf_counter() - start
        assert violated == 0, f"{violated} certified violations"
        assert elapsed < 60, f"took {elapsed:.1f} s"


def test_criterion_2_uniform_identity(criterion):
    with criterion("2 uniform identity: 100 l2 pairs, Hilbertian, |difference| <= 1e-8, both Exact, < 30 s"):
        start = time.perf_counter()
        rng = make_rng(102)
        for t in range(100):
            n, m, k, l = (int(d) for d in rng.integers(1, 5, size=4))
            A, B = rng.standard_normal((k, n)), rng.standard_normal((l, m))
            rec = check_uniform_identity(A, B, HILBERTIAN, _l2(n), _l2(m), _l2(k), _l2(l), tol=1e-8, stream=t)
            assert rec.side("induced").direction is Direction.EXACT
            assert rec.side("product").direction is Direction.EXACT
            assert rec.metadata["abs_difference"] <= 1e-8, f"trial {t}: {rec.metadata['abs_difference']:.3g}"
        elapsed = time.perf_counter() - start
        assert elapsed < 30, f"took {elapsed:.1f} s"


def test_criterion_3_operator_chain(criterion):
    with criterion("3 operator-tensor chain: 50 L, certified at 1e-6, single terms collapse within 1e-4, < 5 min"):
        start = time.perf_counter()
        rng = make_rng(103)
        singles = 0
        for t in range(50):
            L = _random_l2_operator_tensor(rng)
            rec = check_theorem_41(L, HILBERTIAN, tol=1e-6, stream=t)
            assert rec.verdict in CERTIFIED and _certified(rec), f"trial {t}: {rec.verdict.value}"
            if len(L.terms) == 1:
                singles += 1
                (A, B), = L.terms
                target = svd_spectral(A) * svd_spectral(B)
                for label, est in rec.sides:
                    assert abs(est.value - target) <= 1e-4, f"trial {t}: {label} = {est.value} vs {target}"
        assert singles > 0
        elapsed = time.perf_counter() - start
        assert elapsed < 300, f"took {elapsed:.1f} s"


def test_criterion_4_weighted_chain(criterion):
    with criterion("4 equivalence constants sqrt(2) and 1/sqrt(2) with witnesses; weighted chain on 50 L"):
        X = _l2(2)
        sup = equivalence_ratio(PROJECTIVE, HILBERTIAN, X, X)
        inf = equivalence_ratio_inf(INJECTIVE, HILBERTIAN, X, X)
        assert abs(sup.value - np.sqrt(2)) <= 1e-3
        assert abs(inf.value - 1 / np.sqrt(2)) <= 1e-3
        # witnesses are re-evaluated with the independent singular value oracle
        W = sup.witness
        assert abs(svd_nuclear(W) / np.linalg.norm(W) - sup.value) <= 1e-9
        W = inf.witness
        assert abs(svd_spectral(W) / np.linalg.norm(W) - inf.value) <= 1e-9
        rng = make_rng(104)
        for t in range(50):
            J = int(rng.integers(1, 4))
            L = OperatorTensor([(rng.standard_normal((2, 2)), rng.standard_normal((2, 2))) for _ in range(J)], X, X)
            rec = check_corollary_44(L, HILBERTIAN, stream=t)
            assert rec.verdict in CERTIFIED and _certified(rec), f"trial {t}: {rec.verdict.value}"


def test_criterion_5_gamma(criterion):
    with criterion("5 gamma: projective/injective ratio >= n - 1e-3 on l2^n (x) l2^n, n = 2, 3"):
        for n in (2, 3):
            X = _l2(n)
            g = gamma_constant(X, X)
            assert g.value >= n - 1e-3, f"n={n}: {g.value}"
            W = g.witness
            identity = svd_nuclear(np.eye(n)) / svd_spectral(np.eye(n))
            assert abs(svd_nuclear(W) / svd_spectral(W) - identity) <= 1e-3


def test_criterion_6_oracle_agreement(criterion):
    with criterion("6 oracle agreement: 50 tensors, grid 400, 10^4 sampled decompositions, closed forms"):
        rng = make_rng(106)
        for t in range(50):
            n, m = (int(d) for d in rng.integers(1, 4, size=2))
            p, q = (EXPONENTS[int(k)] for k in rng.integers(len(EXPONENTS), size=2))
            F = Tensor(rng.standard_normal((n, m)), LpSpace(n, p), LpSpace(m, q))
            inj, proj = injective_norm(F, stream=t), projective_norm(F, stream=t)
            assert inj.direction in (Direction.EXACT, Direction.LOWER)
            assert inj.value >= grid_injective(F, 400).value - 1e-9, f"trial {t}: injective below grid"
            closed = closed_form_injective(F)
            if closed is not None:
                assert inj.value <= closed.value + 1e-9, f"trial {t}: injective above closed form"
            assert proj.direction in (Direction.EXACT, Direction.UPPER)
            sampled = random_decomposition_search(F, samples=10_000, seed=t)
            assert proj.value <= sampled.value + 1e-9, f"trial {t}: projective above sampled decomposition"


def test_criterion_7_functional_tensor_bound(criterion):
    with criterion("7 functional tensor bound: 50 rank <= 2 pairings, <= nuclear products + 1e-5"):
        rng = make_rng(107)
        for t in range(50):
            n, m, k, l = (int(d) for d in rng.integers(1, 4, size=4))
            pair = lambda r, c: sum(np.outer(rng.standard_normal(r), rng.standard_normal(c)) for _ in range(int(rng.integers(1, 3))))
            phi, eta = pair(k, n), pair(l, m)
            rec = check_prop_32_dual_bound(phi, eta, HILBERTIAN, _l2(n), _l2(m), _l2(k), _l2(l), tol=1e-5, stream=t)
            left = rec.side("functional-tensor")
            assert left.direction in (Direction.EXACT, Direction.LOWER)
            assert left.value <= svd_nuclear(phi) * svd_nuclear(eta) + 1e-5, f"trial {t}"
            assert rec.verdict is not Verdict.VIOLATED


def test_criterion_8_four_term_chain(criterion):
    with criterion("8 four-term chain: 30 L, ordered within 1e-5, zero certified violations"):
        rng = make_rng(108)
        for t in range(30):
            L = _random_l2_operator_tensor(rng)
            rec = check_remark_chain(L, HILBERTIAN, tol=1e-5, stream=t)
            assert rec.verdict is not Verdict.VIOLATED, f"trial {t}"
            values = [est.value for _, est in rec.sides]
            for a, b in zip(values, values[1:]):
                assert a <= b + 1e-5 * max(1.0, b), f"trial {t}: {values}"


def test_criterion_9_cli_determinism(criterion, tmp_path):
    with criterion("9 determinism: `--suite all --seed 42` twice gives identical records"):
        env = dict(os.environ, PYTHONPATH=os.pathsep.join(filter(None, [os.path.join(ROOT, "src"), os.environ.get("PYTHONPATH")])))
        outs = []
        for k in range(2):
            out = tmp_path / f"run{k}.json"
            proc = subprocess.run([sys.executable, "-m", "crossnorm", "--suite", "all", "--seed", "42", "--out", str(out)],
                                  capture_output=True, text=True, env=env, cwd=ROOT)
            assert proc.returncode == 0, proc.stderr
            outs.append(json.dumps(json.loads(out.read_text())["records"]).encode())
        assert outs[0] == outs[1]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
