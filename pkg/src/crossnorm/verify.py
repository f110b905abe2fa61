"""
Direction-aware numerical checks of the crossnorm inequalities.

Every check computes the sides of one or more inequalities ``a <= b`` as
:class:`NormEstimate` objects and compares them with their certified
brackets ``[lo, hi]``:

* ``Violated`` when ``lo(a) > hi(b) + tol``: a certified counterexample;
* ``Holds`` when ``hi(a) <= lo(b)`` (proved from the brackets), or when the
  comparison is a genuine test (``a`` bounded below and ``b`` bounded above,
  e.g. a lower bound against an exact value) that the values pass, both up
  to rounding (:data:`ROUNDING`, relative);
* ``HoldsWithSlack`` when such a comparison passes only within ``tol``;
* ``Inconclusive`` when the directions cannot certify either outcome.

A record's verdict is the worst verdict among its comparisons.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .crossnorms import (
    DEFAULT_BUDGET,
    INJECTIVE,
    PROJECTIVE,
    CrossnormTag,
    alpha_norm,
    injective_norm,
    projective_norm,
)
from .estimates import Budget, Direction, NormEstimate, product, reciprocal
from .operator_norms import (
    InducedNormSpec,
    functional_operator_dual_norm,
    functional_tensor_norm,
    induced_crossnorm,
    operator_norm,
    operator_tensor_injective_norm,
    operator_tensor_projective_norm,
)
from .spaces import LpSpace
from .tensor_core import OperatorFunctionalTensor, OperatorTensor, Tensor

__all__ = [
    "Verdict",
    "Comparison",
    "CheckRecord",
    "compare",
    "check_sandwich",
    "check_uniform_identity",
    "check_theorem_41",
    "check_corollary_44",
    "check_remark_chain",
    "check_prop_32_dual_bound",
    "check_question4",
    "equivalence_ratio",
    "equivalence_ratio_inf",
    "gamma_constant",
    "check_gamma",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-6
# values that agree to this relative precision are equal up to rounding
ROUNDING = 1e-12


class Verdict(str, enum.Enum):
    HOLDS = "Holds"
    HOLDS_WITH_SLACK = "HoldsWithSlack"
    INCONCLUSIVE = "Inconclusive"
    VIOLATED = "Violated"

    def __str__(self) -> str:
        return self.value


_SEVERITY = {Verdict.HOLDS: 0, Verdict.HOLDS_WITH_SLACK: 1, Verdict.INCONCLUSIVE: 2, Verdict.VIOLATED: 3}


def worst(verdicts) -> Verdict:
    return max(verdicts, key=_SEVERITY.__getitem__, default=Verdict.HOLDS)


@dataclass(frozen=True)
class Comparison:
    """One inequality ``left <= right`` between two sides of a record."""

    left: str
    right: str
    slack: float  # right.value - left.value
    verdict: Verdict
    tested: bool  # lower bound on the left against an upper bound on the right
    proven: bool  # hi(left) <= lo(right) + tol

    def to_dict(self) -> dict:
        return {
            "left": self.left,
            "right": self.right,
            "slack": self.slack,
            "verdict": self.verdict.value,
            "tested": self.tested,
            "proven": self.proven,
        }


def compare(a: NormEstimate, b: NormEstimate, tol: float, left: str = "a", right: str = "b") -> Comparison:
    """Direction-aware verdict for ``a <= b``."""
    slack = b.value - a.value
    if a is b:
        return Comparison(left, right, 0.0, Verdict.HOLDS, True, True)
    if a.lo > b.hi + tol:
        return Comparison(left, right, slack, Verdict.VIOLATED, True, False)
    proven = a.hi <= b.lo + tol
    tested = a.direction in (Direction.EXACT, Direction.LOWER) and b.direction in (Direction.EXACT, Direction.UPPER)
    rounding = ROUNDING * max(1.0, abs(a.value), abs(b.value))
    if proven and a.hi <= b.lo + rounding:
        verdict = Verdict.HOLDS
    elif tested and a.value <= b.value + rounding:
        verdict = Verdict.HOLDS
    elif proven or tested:
        verdict = Verdict.HOLDS_WITH_SLACK
    else:
        verdict = Verdict.INCONCLUSIVE
    return Comparison(left, right, slack, verdict, tested, proven)


@dataclass(frozen=True, eq=False)
class CheckRecord:
    name: str
    sides: tuple  # ((label, NormEstimate), ...)
    comparisons: tuple
    verdict: Verdict
    tolerance: float
    seed: int
    spaces: tuple = ()
    dims: tuple = ()
    tag: str = ""
    paper_proved: bool = True
    metadata: dict = field(default_factory=dict)

    @property
    def slacks(self) -> tuple:
        return tuple(c.slack for c in self.comparisons)

    def side(self, label: str) -> NormEstimate:
        for name, est in self.sides:
            if name == label:
                return est
        raise KeyError(label)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "verdict": self.verdict.value,
            "paper_proved": self.paper_proved,
            "tolerance": self.tolerance,
            "seed": self.seed,
            "tag": self.tag,
            "spaces": list(self.spaces),
            "dims": list(self.dims),
            "sides": [{"label": label, **est.to_dict()} for label, est in self.sides],
            "comparisons": [c.to_dict() for c in self.comparisons],
            "slacks": list(self.slacks),
            "metadata": self.metadata,
        }


def _record(name, sides, pairs, tol, budget, spaces, tag, paper_proved=True, **metadata) -> CheckRecord:
    lookup = dict(sides)
    comps = tuple(compare(lookup[a], lookup[b], tol, a, b) for a, b in pairs)
    meta = {"budget": {"restarts": budget.restarts, "max_iters": budget.max_iters}, **metadata}
    return CheckRecord(
        name=name,
        sides=tuple(sides),
        comparisons=comps,
        verdict=worst(c.verdict for c in comps),
        tolerance=tol,
        seed=budget.seed,
        spaces=tuple(str(s) for s in spaces),
        dims=tuple(s.dim for s in spaces),
        tag=str(tag),
        paper_proved=paper_proved,
        metadata=meta,
    )


# -- tensors -------------------------------------------------------------------


def check_sandwich(F: Tensor, tag: CrossnormTag, budget: Budget = DEFAULT_BUDGET, tol: float = DEFAULT_TOL, stream: int = 0) -> CheckRecord:
    """``||F||_inj <= ||F||_alpha <= ||F||_proj``."""
    tag.check(F.x_space, F.y_space)
    inj = injective_norm(F, budget, stream)
    proj = projective_norm(F, budget, stream)
    if tag == INJECTIVE:
        alpha = inj
    elif tag == PROJECTIVE:
        alpha = proj
    else:
        alpha = alpha_norm(F, tag, budget, stream)
    sides = [("injective", inj), (tag.name, alpha), ("projective", proj)]
    pairs = [("injective", tag.name), (tag.name, "projective")]
    return _record("sandwich", sides, pairs, tol, budget, (F.x_space, F.y_space), tag)


# -- equivalence constants -----------------------------------------------------


@functools.lru_cache(maxsize=256)
def equivalence_ratio(
    numerator: CrossnormTag, denominator: CrossnormTag, X: LpSpace, Y: LpSpace, budget: Budget = DEFAULT_BUDGET, stream: int = 0
) -> NormEstimate:
    """``sup_{F != 0} ||F||_numerator / ||F||_denominator`` with a witness ``F``.

    This is the induced norm of the identity operator tensor from the
    denominator norm to the numerator norm.  A tag against itself is
    exactly 1.
    """
    numerator.check(X, Y)
    denominator.check(X, Y)
    if numerator == denominator:
        F = np.zeros((X.dim, Y.dim))
        F[0, 0] = 1.0
        return NormEstimate(1.0, Direction.EXACT, witness=F, method="ratio:same-norm")
    est = induced_crossnorm(OperatorTensor.identity(X, Y), InducedNormSpec(denominator, numerator), budget, stream)
    return NormEstimate(est.value, est.direction, witness=est.witness, method=f"ratio:{est.method}",
                        restarts=est.restarts, seed=est.seed, lower=est.lower, upper=est.upper)


def equivalence_ratio_inf(
    numerator: CrossnormTag, denominator: CrossnormTag, X: LpSpace, Y: LpSpace, budget: Budget = DEFAULT_BUDGET, stream: int = 0
) -> NormEstimate:
    """``inf ||F||_numerator / ||F||_denominator``, the reciprocal of the swapped supremum."""
    sup = equivalence_ratio(denominator, numerator, X, Y, budget, stream)
    return reciprocal(sup, method=f"1/({sup.method})")


def gamma_constant(X: LpSpace, Y: LpSpace, budget: Budget = DEFAULT_BUDGET, stream: int = 0) -> NormEstimate:
    """``sup ||F||_proj / ||F||_inj``, so that ``||F||_proj <= gamma ||F||_inj`` on X (x) Y."""
    return equivalence_ratio(PROJECTIVE, INJECTIVE, X, Y, budget, stream)


def check_gamma(X: LpSpace, Y: LpSpace, budget: Budget = DEFAULT_BUDGET, tol: float = DEFAULT_TOL, stream: int = 0) -> CheckRecord:
    """The supremum ``gamma`` must reach the ratio of the identity matrix.

    In l_2 (x) l_2 that ratio is ``min(n, m)``, which is also the value of
    ``gamma``; elsewhere the identity ratio is only a heuristic point value.
    """
    gamma = gamma_constant(X, Y, budget, stream)
    eye = Tensor(np.eye(X.dim, Y.dim), X, Y)
    num, den = projective_norm(eye, budget, stream), injective_norm(eye, budget, stream)
    both_exact = num.direction is Direction.EXACT and den.direction is Direction.EXACT
    point = NormEstimate(num.value / den.value, Direction.EXACT if both_exact else Direction.HEURISTIC, method="identity-ratio")
    sides = [("identity-ratio", point), ("gamma", gamma)]
    return _record("gamma", sides, [("identity-ratio", "gamma")], tol, budget, (X, Y), "[injective,projective]")


def _min_estimate(ests) -> NormEstimate:
    best = min(ests, key=lambda e: e.value)
    lo = min(e.lo for e in ests)
    hi = min(e.hi for e in ests)
    return NormEstimate(best.value, best.direction, witness=best.witness, method=best.method,
                        lower=lo if lo > 0 else None, upper=None if math.isinf(hi) else hi)


def _max_estimate(ests) -> NormEstimate:
    best = max(ests, key=lambda e: e.value)
    lo = max(e.lo for e in ests)
    hi = max(e.hi for e in ests)
    return NormEstimate(best.value, best.direction, witness=best.witness, method=best.method,
                        lower=lo if lo > 0 else None, upper=None if math.isinf(hi) else hi)


# -- operators -------------------------------------------------------------------


def check_uniform_identity(
    A, B, tag: CrossnormTag, X: LpSpace, Y: LpSpace, V: LpSpace | None = None, W: LpSpace | None = None,
    budget: Budget = DEFAULT_BUDGET, tol: float = DEFAULT_TOL, stream: int = 0,
) -> CheckRecord:
    """``||A (x) B||_[alpha, alpha] = ||A|| ||B||``, as two inequalities."""
    V = X if V is None else V
    W = Y if W is None else W
    L = OperatorTensor.single(A, B, X, Y, V, W)
    induced = induced_crossnorm(L, InducedNormSpec.same(tag), budget, stream)
    prod = product(operator_norm(A, X, V, budget, stream), operator_norm(B, Y, W, budget, stream + 1), method="operator-norm-product")
    sides = [("induced", induced), ("product", prod)]
    pairs = [("product", "induced"), ("induced", "product")]
    return _record("uniform-identity", sides, pairs, tol, budget, (X, Y, V, W), tag,
                   abs_difference=abs(induced.value - prod.value))


def check_theorem_41(L: OperatorTensor, tag: CrossnormTag, budget: Budget = DEFAULT_BUDGET, tol: float = DEFAULT_TOL, stream: int = 0) -> CheckRecord:
    """``||L||_inj <= ||L||_[alpha, alpha] <= ||L||_proj`` on ``B[X,V] (x) B[Y,W]``."""
    spec = InducedNormSpec.same(tag)
    spec.check(L)
    sides = [
        ("operator-injective", operator_tensor_injective_norm(L, budget, stream)),
        (spec.name, induced_crossnorm(L, spec, budget, stream)),
        ("operator-projective", operator_tensor_projective_norm(L, budget, stream)),
    ]
    pairs = [("operator-injective", spec.name), (spec.name, "operator-projective")]
    return _record("thm4.1a", sides, pairs, tol, budget, L.spaces, tag, terms=len(L))


def check_corollary_44(L: OperatorTensor, tag: CrossnormTag, budget: Budget = DEFAULT_BUDGET, tol: float = DEFAULT_TOL, stream: int = 0) -> CheckRecord:
    """``c_inf ||L||_[inj,inj] <= ||L||_[alpha,alpha] <= c_sup ||L||_[proj,proj]``.

    ``c_inf = inf ||F||_inj / ||F||_alpha`` and ``c_sup = sup ||F||_proj /
    ||F||_alpha``, each combined over the domain pair (X, Y) and the
    codomain pair (V, W): the smaller infimum and the larger supremum.
    """
    X, Y, V, W = L.spaces
    spec = InducedNormSpec.same(tag)
    spec.check(L)
    pairs_of_spaces = [(X, Y)] if (X, Y) == (V, W) else [(X, Y), (V, W)]
    c_inf = _min_estimate([equivalence_ratio_inf(INJECTIVE, tag, s, t, budget) for s, t in pairs_of_spaces])
    c_sup = _max_estimate([equivalence_ratio(PROJECTIVE, tag, s, t, budget) for s, t in pairs_of_spaces])
    n_inj = induced_crossnorm(L, InducedNormSpec.same(INJECTIVE), budget, stream)
    n_alpha = induced_crossnorm(L, spec, budget, stream)
    n_proj = induced_crossnorm(L, InducedNormSpec.same(PROJECTIVE), budget, stream)
    left = product(c_inf, n_inj, method="c_inf*[injective,injective]")
    right = product(c_sup, n_proj, method="c_sup*[projective,projective]")
    sides = [
        ("c_inf", c_inf),
        ("c_sup", c_sup),
        ("[injective,injective]", n_inj),
        (spec.name, n_alpha),
        ("[projective,projective]", n_proj),
        ("weighted-injective", left),
        ("weighted-projective", right),
    ]
    pairs = [("weighted-injective", spec.name), (spec.name, "weighted-projective")]
    return _record("cor4.4", sides, pairs, tol, budget, L.spaces, tag,
                   ratio_pairs="domain+codomain" if len(pairs_of_spaces) == 2 else "domain=codomain")


def check_remark_chain(L: OperatorTensor, tag: CrossnormTag, budget: Budget = DEFAULT_BUDGET, tol: float = DEFAULT_TOL, stream: int = 0) -> CheckRecord:
    """``||L||_inj <= ||L||_[proj,inj] <= ||L||_[alpha,alpha] <= ||L||_proj``."""
    spec = InducedNormSpec.same(tag)
    spec.check(L)
    mixed = InducedNormSpec(PROJECTIVE, INJECTIVE)
    sides = [
        ("operator-injective", operator_tensor_injective_norm(L, budget, stream)),
        (mixed.name, induced_crossnorm(L, mixed, budget, stream)),
        (spec.name, induced_crossnorm(L, spec, budget, stream)),
        ("operator-projective", operator_tensor_projective_norm(L, budget, stream)),
    ]
    labels = [s for s, _ in sides]
    pairs = list(zip(labels[:-1], labels[1:]))
    return _record("remark4.3", sides, pairs, tol, budget, L.spaces, tag, terms=len(L))


def check_prop_32_dual_bound(
    phi, eta, tag: CrossnormTag, X: LpSpace, Y: LpSpace, V: LpSpace | None = None, W: LpSpace | None = None,
    budget: Budget = DEFAULT_BUDGET, tol: float = DEFAULT_TOL, stream: int = 0,
) -> CheckRecord:
    """``||phi (x) eta||_{*[alpha,alpha]} <= ||phi|| ||eta||``."""
    V = X if V is None else V
    W = Y if W is None else W
    spec = InducedNormSpec.same(tag)
    k = OperatorFunctionalTensor([(phi, eta)])
    left = functional_tensor_norm(k, spec, X, Y, V, W, budget, stream)
    right = product(
        functional_operator_dual_norm(phi, X, V, budget, stream),
        functional_operator_dual_norm(eta, Y, W, budget, stream + 1),
        method="dual-norm-product",
    )
    sides = [("functional-tensor", left), ("dual-norm-product", right)]
    return _record("prop3.2", sides, [("functional-tensor", "dual-norm-product")], tol, budget, (X, Y, V, W), tag)


def check_question4(L: OperatorTensor, tag: CrossnormTag, budget: Budget = DEFAULT_BUDGET, tol: float = DEFAULT_TOL, stream: int = 0) -> CheckRecord:
    """Exploratory: ``||L||_[inj,inj] <= ||L||_[alpha,alpha] <= ||L||_[proj,proj]``.

    Whether this holds in general is open, so the record never counts as a
    failure.
    """
    spec = InducedNormSpec.same(tag)
    spec.check(L)
    sides = [
        ("[injective,injective]", induced_crossnorm(L, InducedNormSpec.same(INJECTIVE), budget, stream)),
        (spec.name, induced_crossnorm(L, spec, budget, stream)),
        ("[projective,projective]", induced_crossnorm(L, InducedNormSpec.same(PROJECTIVE), budget, stream)),
    ]
    pairs = [("[injective,injective]", spec.name), (spec.name, "[projective,projective]")]
    return _record("question4", sides, pairs, tol, budget, L.spaces, tag, paper_proved=False)
