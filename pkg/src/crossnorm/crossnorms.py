"""
Crossnorms on X (x) Y.

``injective_norm`` and ``projective_norm`` return :class:`NormEstimate`
objects whose direction says what was certified:

* the injective norm is a supremum, so searches give lower bounds; it is
  exact on l_2 (x) l_2 (spectral norm) and whenever one factor has a
  polyhedral dual ball small enough to enumerate;
* the projective norm is an infimum, so feasible decompositions give upper
  bounds; it is exact on l_2 (x) l_2 (nuclear norm) and when a factor is
  l_1 (row or column formula).  Elsewhere a linear program over rank-one
  atoms is solved by column generation; its dual solution certifies a lower
  bound whenever the pricing step is exact.

Each estimate also stores a subgradient ``G`` in ``info["subgradient"]``
with ``<G, F> = value``; ratio searches in :mod:`crossnorm.operator_norms`
rely on it.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog, minimize

from ._ascent import LinearMap, maximize_ratio, row_norming, row_norms
from .estimates import Budget, Direction, NormEstimate
from .exceptions import CapabilityError, DimensionError
from .spaces import INF, Functional, LpSpace, exponent_label, make_rng, parse_exponent
from .tensor_core import Decomposition, Tensor

__all__ = [
    "CrossnormKind",
    "CrossnormTag",
    "INJECTIVE",
    "PROJECTIVE",
    "HILBERTIAN",
    "entrywise",
    "injective_norm",
    "projective_norm",
    "entrywise_norm",
    "alpha_norm",
    "dual_injective_pair_value",
    "DEFAULT_BUDGET",
]

DEFAULT_BUDGET = Budget()
FEASIBILITY_TOL = 1e-8
_PRICING_TOL = 1e-9
_EXACT_PRICING_ROUNDS = 150  # pricing certifies optimality, so run to convergence
_SEARCH_ROUNDS = 12  # warm start for the factorization search


class CrossnormKind(str, enum.Enum):
    INJECTIVE = "injective"
    PROJECTIVE = "projective"
    ENTRYWISE = "entrywise"
    HILBERTIAN = "hilbertian"


@dataclass(frozen=True)
class CrossnormTag:
    kind: CrossnormKind
    p: object = None

    def __post_init__(self):
        object.__setattr__(self, "kind", CrossnormKind(self.kind))
        if self.kind is CrossnormKind.ENTRYWISE:
            object.__setattr__(self, "p", parse_exponent(self.p))
        elif self.kind is CrossnormKind.HILBERTIAN:
            object.__setattr__(self, "p", 2.0)
        else:
            object.__setattr__(self, "p", None)

    @property
    def name(self) -> str:
        if self.kind is CrossnormKind.ENTRYWISE:
            return f"entrywise-{exponent_label(self.p)}"
        return self.kind.value

    def __str__(self) -> str:
        return self.name

    def attachable(self, X: LpSpace, Y: LpSpace) -> bool:
        if self.kind in (CrossnormKind.ENTRYWISE, CrossnormKind.HILBERTIAN):
            return X.p == self.p and Y.p == self.p
        return True

    def check(self, X: LpSpace, Y: LpSpace) -> None:
        if not self.attachable(X, Y):
            raise CapabilityError(f"{self.name} is only defined on l{exponent_label(self.p)} (x) l{exponent_label(self.p)}, not {X} (x) {Y}")

    @classmethod
    def parse(cls, text: str, p=None) -> "CrossnormTag":
        """Parse ``injective``, ``projective``, ``hilbertian``, ``entrywise-<p>``.

        A bare ``entrywise`` (or ``alpha``) takes its exponent from ``p``.
        """
        t = text.strip().lower()
        aliases = {
            "injective": INJECTIVE, "inj": INJECTIVE, "vee": INJECTIVE, "∨": INJECTIVE,
            "projective": PROJECTIVE, "proj": PROJECTIVE, "wedge": PROJECTIVE, "∧": PROJECTIVE,
            "hilbertian": HILBERTIAN, "hilbert": HILBERTIAN, "frobenius": HILBERTIAN,
        }
        if t in aliases:
            return aliases[t]
        m = re.fullmatch(r"(?:entrywise|alpha|ep)(?:[-_:(]?([0-9.]+|inf)\)?)?", t)
        if m:
            exp = m.group(1) if m.group(1) is not None else p
            if exp is None:
                raise ValueError(f"tag {text!r} needs an exponent")
            return entrywise(exp)
        raise ValueError(f"unknown crossnorm tag {text!r}")


INJECTIVE = CrossnormTag(CrossnormKind.INJECTIVE)
PROJECTIVE = CrossnormTag(CrossnormKind.PROJECTIVE)
HILBERTIAN = CrossnormTag(CrossnormKind.HILBERTIAN)


def entrywise(p) -> CrossnormTag:
    return CrossnormTag(CrossnormKind.ENTRYWISE, p)


def _zero(F: Tensor, method: str = "zero") -> NormEstimate:
    return NormEstimate(0.0, Direction.EXACT, witness=None, method=method, info={"subgradient": np.zeros(F.shape)})


# -- injective ---------------------------------------------------------------


def injective_norm(F: Tensor, budget: Budget = DEFAULT_BUDGET, stream: int = 0) -> NormEstimate:
    """``sup |f^T F g|`` over the unit balls of X* and Y*.

    Computed as ``sup_{||f||_{X*} <= 1} ||F^T f||_Y``.  The witness is the
    pair ``(f, g)`` of coefficient vectors with ``f^T F g = value``.
    """
    if F.is_zero():
        return _zero(F)
    res = maximize_ratio(LinearMap.from_matrix(F.entries.T), F.x_space.dual, F.y_space, budget, stream)
    f, g = res.u, res.w
    return NormEstimate(
        res.value,
        Direction.EXACT if res.exact else Direction.LOWER,
        witness=(f, g),
        method=f"injective:{res.method}",
        restarts=res.restarts,
        seed=None if res.exact else budget.seed,
        info={"subgradient": np.outer(f, g)},
    )


def dual_injective_pair_value(f: Functional, g: Functional, F: Tensor) -> float:
    """The value ``(f (x) g)(F) = f^T F g``."""
    if f.space.dim != F.x_space.dim or g.space.dim != F.y_space.dim:
        raise DimensionError("functional dimensions do not match the tensor")
    return float(f.coefficients @ F.entries @ g.coefficients)


# -- projective ----------------------------------------------------------------


def _svd_decomposition(M: np.ndarray) -> tuple[Decomposition, float, np.ndarray]:
    u, s, vt = np.linalg.svd(M, full_matrices=False)
    keep = s > s[0] * 1e-15 if s.size and s[0] > 0 else np.zeros(s.shape, bool)
    terms = [(s[i] * u[:, i], vt[i]) for i in np.flatnonzero(keep)]
    G = u[:, keep] @ vt[keep]
    return Decomposition(terms), float(s.sum()), G


def _row_decomposition(M: np.ndarray) -> Decomposition:
    n = M.shape[0]
    return Decomposition([(np.eye(n)[k], M[k]) for k in range(n) if np.any(M[k])])


def _column_decomposition(M: np.ndarray) -> Decomposition:
    m = M.shape[1]
    return Decomposition([(M[:, l], np.eye(m)[l]) for l in range(m) if np.any(M[:, l])])


def _estimate_from_decomposition(F, d, direction, method, G=None, lower=None, restarts=0, seed=None, **info):
    value = d.cost(F.x_space, F.y_space)
    info = dict(info)
    if G is not None:
        info["subgradient"] = G
    return NormEstimate(value, direction, witness=d, method=method, restarts=restarts, seed=seed, lower=lower, info=info)


def projective_norm(F: Tensor, budget: Budget = DEFAULT_BUDGET, stream: int = 0) -> NormEstimate:
    """``inf sum ||x_i|| ||y_i||`` over representations ``F = sum x_i y_i^T``.

    The witness is a :class:`Decomposition` whose cost is the returned value.
    """
    if F.is_zero():
        est = _zero(F)
        return NormEstimate(0.0, Direction.EXACT, witness=Decomposition(), method="zero", info=est.info)
    X, Y = F.x_space, F.y_space
    M = F.entries
    if X.p == 2.0 and Y.p == 2.0:
        d, _, G = _svd_decomposition(M)
        return _estimate_from_decomposition(F, d, Direction.EXACT, "projective:nuclear", G)
    if X.p == 1.0:
        G = row_norming(M, Y.p)
        return _estimate_from_decomposition(F, _row_decomposition(M), Direction.EXACT, "projective:l1-rows", G)
    if Y.p == 1.0:
        G = row_norming(M.T, X.p).T
        return _estimate_from_decomposition(F, _column_decomposition(M), Direction.EXACT, "projective:l1-columns", G)
    return _projective_search(F, budget, stream)


def _unit(v: np.ndarray, s: LpSpace) -> np.ndarray:
    return v / row_norms(v[None, :], s.p)[0]


def _initial_atoms(F: Tensor) -> list[tuple[np.ndarray, np.ndarray]]:
    X, Y = F.x_space, F.y_space
    M = F.entries
    n, m = M.shape
    atoms = [(np.eye(n)[k], np.eye(m)[l]) for k in range(n) for l in range(m)]
    for x, y in _row_decomposition(M).terms + _column_decomposition(M).terms + _svd_decomposition(M)[0].terms:
        atoms.append((_unit(x, X), _unit(y, Y)))
    return atoms


def _solve_master(F: Tensor, atoms) -> tuple[np.ndarray, np.ndarray, float]:
    b = F.entries.ravel()
    A = np.array([np.outer(x, y).ravel() for x, y in atoms]).T
    k = A.shape[1]
    res = linprog(
        np.ones(2 * k),
        A_eq=np.hstack([A, -A]),
        b_eq=b,
        bounds=(0, None),
        method="highs",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status != 0:
        raise RuntimeError(f"projective master LP failed: {res.message}")
    c = res.x[:k] - res.x[k:]
    dual = np.asarray(res.eqlin.marginals, dtype=float).reshape(F.shape)
    return c, dual, float(res.fun)


def _repair(F: Tensor, atoms, c: np.ndarray) -> Decomposition:
    """Exactly feasible decomposition from LP coefficients.

    Coefficients on the LP support are refit by least squares and the
    remaining residual is appended through its row decomposition.
    """
    support = np.flatnonzero(np.abs(c) > 1e-14)
    if support.size:
        A = np.array([np.outer(*atoms[i]).ravel() for i in support]).T
        refit, *_ = np.linalg.lstsq(A, F.entries.ravel(), rcond=None)
        # keep the refit only when it does not lose feasibility
        if np.linalg.norm(A @ refit - F.entries.ravel()) <= np.linalg.norm(A @ c[support] - F.entries.ravel()):
            coef = refit
        else:
            coef = c[support]
    else:
        coef = np.zeros(0)
    terms = [(coef[j] * atoms[i][0], atoms[i][1]) for j, i in enumerate(support)]
    partial = Decomposition(terms).matrix(*F.shape)
    residual = F.entries - partial
    return Decomposition(list(Decomposition(terms).terms) + list(_row_decomposition(residual).terms))


def _column_generation(F: Tensor, budget: Budget, stream: int, rounds: int):
    """Linear program over rank-one atoms, grown by pricing.

    Returns the atoms, the final LP coefficients and dual matrix, the
    certified lower bound (``None`` unless pricing was exact) and whether
    pricing proved optimality.
    """
    X, Y = F.x_space, F.y_space
    pricing_budget = budget.scaled(restarts=max(1, min(budget.restarts, 8)), max_iters=min(budget.max_iters, 60))
    atoms = _initial_atoms(F)
    lower = None
    optimal = False
    for r in range(rounds):
        c, dual, _ = _solve_master(F, atoms)
        # pricing: the most violated atom maximizes x^T G y over B_X x B_Y
        op = LinearMap.from_matrix(dual.T)
        res = maximize_ratio(op, X, Y.dual, pricing_budget, stream=stream * 1000 + r)
        nu = res.value
        if res.exact and nu > 0:
            lb = float(np.sum(dual * F.entries)) / max(nu, 1.0)
            lower = lb if lower is None else max(lower, lb)
        if nu <= 1.0 + _PRICING_TOL:
            optimal = res.exact
            break
        U, W, vals = res.candidates if res.candidates is not None else (res.u[None], res.w[None], np.array([nu]))
        added = 0
        for k in np.argsort(-vals, kind="stable"):
            if vals[k] <= 1.0 + _PRICING_TOL or added >= 8:
                break
            x, y = U[k], W[k]
            if not np.any(x) or not np.any(y):
                continue
            atoms.append((_unit(x, X), _unit(y, Y)))
            added += 1
        if added == 0:
            break
    c, dual, _ = _solve_master(F, atoms)
    return atoms, c, dual, lower, optimal


def _sq_norms_and_grad(Z: np.ndarray, p):
    """Squared row norms and their gradient ``2 ||z|| w`` with ``w`` norming ``z``."""
    if p is INF or p == 1.0:
        n = row_norms(Z, p)
        return n**2, 2.0 * n[:, None] * row_norming(Z, p)
    a = np.abs(Z)
    ap1 = a ** (p - 1.0)
    n = np.sum(ap1 * a, axis=1) ** (1.0 / p)
    scale = np.where(n > 0, n, 1.0) ** (2.0 - p)
    return n**2, 2.0 * scale[:, None] * np.sign(Z) * ap1


def _refine_factorization(F: Tensor, X0: np.ndarray, Y0: np.ndarray, outer: int = 8, mu: float = 10.0):
    """Penalized factorization ``F ~ X^T Y`` with rows ``x_i``, ``y_i``.

    Minimizes ``sum (||x_i||^2 + ||y_i||^2) / 2``, whose minimum over
    rescalings of each pair is ``sum ||x_i|| ||y_i||``, under an augmented
    Lagrangian for the constraint ``X^T Y = F``.  The rows are returned
    without repair; callers append the residual.
    """
    M = F.entries
    n, m = M.shape
    r = X0.shape[0]
    p, q = F.x_space.p, F.y_space.p
    lam = np.zeros((n, m))
    z = np.concatenate([X0.ravel(), Y0.ravel()])

    for _ in range(outer):
        def objective(z, lam=lam, mu=mu):
            Xr = z[: r * n].reshape(r, n)
            Yr = z[r * n :].reshape(r, m)
            a, ga = _sq_norms_and_grad(Xr, p)
            b, gb = _sq_norms_and_grad(Yr, q)
            R = Xr.T @ Yr - M
            val = 0.5 * (a.sum() + b.sum()) - np.sum(lam * R) + 0.5 * mu * np.sum(R * R)
            GR = mu * R - lam
            return val, np.concatenate([(0.5 * ga + Yr @ GR.T).ravel(), (0.5 * gb + Xr @ GR).ravel()])

        z = minimize(objective, z, jac=True, method="L-BFGS-B", options={"maxiter": 300, "gtol": 1e-12, "ftol": 1e-15}).x
        R = z[: r * n].reshape(r, n).T @ z[r * n :].reshape(r, m) - M
        lam = lam - mu * R
        mu *= 2.0
    return z[: r * n].reshape(r, n), z[r * n :].reshape(r, m)


def _balanced_rows(terms, r: int, n: int, m: int, rng, X: LpSpace, Y: LpSpace):
    Xr = 1e-2 * rng.standard_normal((r, n))
    Yr = 1e-2 * rng.standard_normal((r, m))
    for i, (x, y) in enumerate(terms[:r]):
        a = row_norms(x[None], X.p)[0]
        b = row_norms(y[None], Y.p)[0]
        if a > 0 and b > 0:
            s = np.sqrt(b / a)
            Xr[i], Yr[i] = x * s, y / s
    return Xr, Yr


def _with_residual(F: Tensor, Xr: np.ndarray, Yr: np.ndarray) -> Decomposition:
    terms = [(x, y) for x, y in zip(Xr, Yr) if np.any(x) and np.any(y)]
    residual = F.entries - Decomposition(terms).matrix(*F.shape)
    return Decomposition(terms + list(_row_decomposition(residual).terms))


def _enumerable(s: LpSpace, cap: int) -> bool:
    return s.p == 1.0 or (s.is_polyhedral and s.dim <= cap)


def _projective_search(F: Tensor, budget: Budget, stream: int) -> NormEstimate:
    X, Y = F.x_space, F.y_space
    n, m = F.shape
    exact_pricing = _enumerable(X, budget.enum_cap) or _enumerable(Y, budget.enum_cap)
    rounds = _EXACT_PRICING_ROUNDS if exact_pricing else _SEARCH_ROUNDS
    atoms, c, dual, lower, optimal = _column_generation(F, budget, stream, rounds)
    lp = _repair(F, atoms, c)
    candidates = [
        lp,
        _row_decomposition(F.entries),
        _column_decomposition(F.entries),
        _svd_decomposition(F.entries)[0],
    ]
    gap_closed = optimal and lower is not None and lp.cost(X, Y) - lower <= 1e-9 * max(1.0, lower)
    refinements = 0
    if not gap_closed and budget.restarts > 0:
        r = n * m
        starts = [lp.terms, _svd_decomposition(F.entries)[0].terms]
        starts += [None] * max(budget.restarts // 32 - 1, 0)
        for k, terms in enumerate(starts):
            rng = make_rng(budget.seed, stream, 7919, k)
            if terms is None:
                X0, Y0 = rng.standard_normal((r, n)), rng.standard_normal((r, m))
            else:
                X0, Y0 = _balanced_rows(list(terms), r, n, m, rng, X, Y)
            candidates.append(_with_residual(F, *_refine_factorization(F, X0, Y0)))
            refinements += 1
    costs = [d.cost(X, Y) for d in candidates]
    best = candidates[int(np.argmin(costs))]
    est = _estimate_from_decomposition(
        F,
        best,
        Direction.UPPER,
        "projective:lp+factorization" if refinements else "projective:lp",
        dual,
        lower=None if lower is None else min(lower, min(costs)),
        restarts=refinements,
        seed=budget.seed,
        atoms=len(atoms),
        pricing_exact=optimal,
    )
    return est


# -- entrywise and dispatch ----------------------------------------------------


def entrywise_norm(F: Tensor, p) -> NormEstimate:
    p = parse_exponent(p)
    v = F.entries.ravel()
    value = float(row_norms(v[None, :], p)[0])
    G = row_norming(v[None, :], p)[0].reshape(F.shape)
    return NormEstimate(value, Direction.EXACT, method=f"entrywise-l{exponent_label(p)}", info={"subgradient": G})


def alpha_norm(F: Tensor, tag: CrossnormTag, budget: Budget = DEFAULT_BUDGET, stream: int = 0) -> NormEstimate:
    """Evaluate the crossnorm named by ``tag`` at ``F``."""
    tag.check(F.x_space, F.y_space)
    if tag.kind is CrossnormKind.INJECTIVE:
        return injective_norm(F, budget, stream)
    if tag.kind is CrossnormKind.PROJECTIVE:
        return projective_norm(F, budget, stream)
    return entrywise_norm(F, tag.p)
