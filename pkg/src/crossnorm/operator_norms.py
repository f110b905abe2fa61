"""
Norms of operators and of operator tensors.

* ``operator_norm``: ``||A||`` for ``A: X -> V``.
* ``induced_crossnorm``: ``||L||_[beta, gamma] = sup ||L(F)||_gamma / ||F||_beta``.
* ``operator_tensor_injective_norm`` / ``operator_tensor_projective_norm``:
  the injective and projective crossnorms of ``L`` itself, viewed as an
  element of ``B[X,V] (x) B[Y,W]``.
* ``functional_operator_dual_norm`` / ``functional_tensor_norm``: norms of
  pairings ``phi`` on ``B[X,V]`` and of ``sum phi_k (x) eta_k`` against the
  induced norm.

Supremum searches return certified lower bounds.  A ratio is certified only
from a lower bound on its numerator and an upper bound on its denominator;
any other combination is tagged Heuristic.  Exact shortcuts:

* Frobenius to Frobenius is the largest singular value of ``F -> L(F)``,
  computed matrix-free with ARPACK;
* entrywise ``l_1`` domains and ``l_inf`` codomains enumerate extreme points;
* a projective domain restricts the search to single tensors ``x (x) y``,
  enumerated when both factor balls are small polytopes;
* an injective domain on ``l_2^2 (x) l_2^2`` has the orthogonal group as
  extreme points, two circles, which a Lipschitz branch and bound covers to
  give a certified upper bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.sparse.linalg import LinearOperator, svds

from ._ascent import LinearMap, maximize_ratio, row_norming, row_norms
from .crossnorms import (
    DEFAULT_BUDGET,
    CrossnormKind,
    CrossnormTag,
    alpha_norm,
    injective_norm,
    projective_norm,
)
from .estimates import Budget, Direction, NormEstimate
from .exceptions import DimensionError
from .spaces import INF, LpSpace, dual_exponent, make_rng, unit_ball_extreme_points
from .tensor_core import OperatorFunctionalTensor, OperatorTensor, Tensor, pair

__all__ = [
    "InducedNormSpec",
    "operator_norm",
    "induced_crossnorm",
    "operator_tensor_injective_norm",
    "operator_tensor_projective_norm",
    "functional_operator_dual_norm",
    "functional_tensor_norm",
    "certified_ratio",
]

# streams keep the searches inside one call independent of each other
_S_RATIO, _S_RANK_ONE, _S_OP_INJ, _S_OP_PROJ, _S_FUNCTIONAL = 11, 13, 17, 19, 23
_RANK_ONE_ENUM_CAP = 4096
_BB_RTOL = 1e-7
_BB_MAX_INTERVALS = 1 << 17


@dataclass(frozen=True)
class InducedNormSpec:
    """The pair ``(beta, gamma)``: ``beta`` on X (x) Y, ``gamma`` on V (x) W."""

    domain_tag: CrossnormTag
    codomain_tag: CrossnormTag

    @property
    def name(self) -> str:
        return f"[{self.domain_tag.name},{self.codomain_tag.name}]"

    def __str__(self) -> str:
        return self.name

    @classmethod
    def same(cls, tag: CrossnormTag) -> "InducedNormSpec":
        return cls(tag, tag)

    @classmethod
    def parse(cls, text: str, p=None) -> "InducedNormSpec":
        """``"projective,injective"`` or a single tag used on both sides."""
        parts = [t for t in text.strip().strip("[]").split(",") if t.strip()]
        if len(parts) == 1:
            return cls.same(CrossnormTag.parse(parts[0], p))
        if len(parts) == 2:
            return cls(CrossnormTag.parse(parts[0], p), CrossnormTag.parse(parts[1], p))
        raise ValueError(f"cannot parse induced norm spec {text!r}")

    def check(self, L: OperatorTensor) -> None:
        self.domain_tag.check(L.X, L.Y)
        self.codomain_tag.check(L.V, L.W)


def _frobenius(tag: CrossnormTag) -> bool:
    return tag.kind in (CrossnormKind.HILBERTIAN, CrossnormKind.ENTRYWISE) and tag.p == 2.0


def certified_ratio(num: NormEstimate, den: NormEstimate, method: str, **kw) -> NormEstimate:
    """``num / den`` for a supremum search, with the certified bracket.

    The value is a certified lower bound exactly when ``num`` is bounded
    below and ``den`` bounded above; otherwise it is Heuristic, though a
    finite ``lo(num) / hi(den)`` is still kept as ``lower``.
    """
    if den.value <= 0.0:
        raise ValueError("ratio with a vanishing denominator")
    certified = num.direction in (Direction.EXACT, Direction.LOWER) and den.direction in (
        Direction.EXACT,
        Direction.UPPER,
    )
    if num.direction is Direction.EXACT and den.direction is Direction.EXACT:
        direction = Direction.LOWER  # a ratio at one point bounds the supremum below
    else:
        direction = Direction.LOWER if certified else Direction.HEURISTIC
    lower = num.lo / den.hi if math.isfinite(den.hi) and den.hi > 0 else None
    return NormEstimate(num.value / den.value, direction, method=method, lower=lower, **kw)


# -- operators -----------------------------------------------------------------


def operator_norm(A, X: LpSpace, V: LpSpace, budget: Budget = DEFAULT_BUDGET, stream: int = 0) -> NormEstimate:
    """``sup_{||x||_X <= 1} ||A x||_V``; the witness is a maximizing unit ``x``."""
    A = np.asarray(A, dtype=float)
    if A.shape != (V.dim, X.dim):
        raise DimensionError(f"operator of shape {A.shape} between {X} and {V}")
    res = maximize_ratio(LinearMap.from_matrix(A), X, V, budget, stream)
    return NormEstimate(
        res.value,
        Direction.EXACT if res.exact else Direction.LOWER,
        witness=res.u,
        method=f"operator:{res.method}",
        restarts=res.restarts,
        seed=None if res.exact else budget.seed,
    )


def _operator_norms_batch(As: np.ndarray, X: LpSpace, V: LpSpace, budget: Budget) -> tuple[np.ndarray, bool]:
    """Norms of a stack of operators ``X -> V`` and whether all are exact."""
    if As.shape[0] == 0:
        return np.zeros(0), True
    if X.p == 2.0 and V.p == 2.0:
        return np.linalg.norm(As, ord=2, axis=(1, 2)), True
    for side, s in (("in", X), ("out", V.dual)):
        if s.p == 1.0 or (s.p is INF and s.dim <= budget.enum_cap):
            E = unit_ball_extreme_points(s, budget.enum_cap)
            if side == "in":
                vals = row_norms(np.einsum("bvx,ex->bev", As, E).reshape(-1, V.dim), V.p)
            else:
                vals = row_norms(np.einsum("bvx,ev->bex", As, E).reshape(-1, X.dim), dual_exponent(X.p))
            return vals.reshape(As.shape[0], -1).max(axis=1), True
    ests = [operator_norm(A, X, V, budget) for A in As]
    return np.array([e.value for e in ests]), all(e.direction is Direction.EXACT for e in ests)


# -- batched evaluation of a crossnorm -------------------------------------------


def _apply_batch(L: OperatorTensor, F: np.ndarray) -> np.ndarray:
    if not L.terms:
        return np.zeros((F.shape[0], L.V.dim, L.W.dim))
    A = np.stack([a for a, _ in L.terms])
    B = np.stack([b for _, b in L.terms])
    return np.einsum("jvx,rxy,jwy->rvw", A, F, B)


def _adjoint_batch(L: OperatorTensor, G: np.ndarray) -> np.ndarray:
    if not L.terms:
        return np.zeros((G.shape[0], L.X.dim, L.Y.dim))
    A = np.stack([a for a, _ in L.terms])
    B = np.stack([b for _, b in L.terms])
    return np.einsum("jvx,rvw,jwy->rxy", A, G, B)


class _TagNorm:
    """A crossnorm on a fixed pair of spaces, evaluated on stacks of matrices.

    ``batch`` is available (and exact) for entrywise norms, for l_2 (x) l_2
    and for the closed-form injective/projective cases; everything else goes
    through :func:`crossnorm.crossnorms.alpha_norm` one tensor at a time.
    """

    def __init__(self, tag: CrossnormTag, X: LpSpace, Y: LpSpace, budget: Budget, stream: int):
        tag.check(X, Y)
        self.tag, self.X, self.Y, self.budget, self.stream = tag, X, Y, budget, stream
        k = tag.kind
        self.mode = None
        if k in (CrossnormKind.ENTRYWISE, CrossnormKind.HILBERTIAN):
            self.mode = "entrywise"
        elif X.p == 2.0 and Y.p == 2.0:
            self.mode = "svd-" + k.value
        elif k is CrossnormKind.INJECTIVE and (X.p is INF or Y.p is INF):
            self.mode = "injective-inf"
        elif k is CrossnormKind.PROJECTIVE and (X.p == 1.0 or Y.p == 1.0):
            self.mode = "projective-l1"
        elif k is CrossnormKind.INJECTIVE and (X.p == 1.0 and X.dim <= budget.enum_cap):
            self.mode = "injective-l1"
        self.batched = self.mode is not None

    def batch(self, F: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Values and subgradients (``<G_r, F_r> = value_r``) for a stack ``F``."""
        mode = self.mode
        R = F.shape[0]
        if mode == "entrywise":
            flat = F.reshape(R, -1)
            return row_norms(flat, self.tag.p), row_norming(flat, self.tag.p).reshape(F.shape)
        if mode == "svd-injective" or mode == "svd-projective":
            u, s, vt = np.linalg.svd(F, full_matrices=False)
            if mode == "svd-injective":
                return s[:, 0], np.einsum("ri,rj->rij", u[:, :, 0], vt[:, 0, :])
            keep = s > (s[:, :1] * 1e-14)
            return s.sum(axis=1), np.einsum("rik,rk,rkj->rij", u, keep.astype(float), vt)
        if mode == "injective-inf":
            if self.X.p is INF:
                rows = row_norms(F.reshape(-1, F.shape[2]), self.Y.p).reshape(R, F.shape[1])
                k = np.argmax(rows, axis=1)
                G = np.zeros_like(F)
                picked = F[np.arange(R), k]
                G[np.arange(R), k] = row_norming(picked, self.Y.p)
                return rows[np.arange(R), k], G
            vals, G = _TagNorm(self.tag, self.Y, self.X, self.budget, self.stream).batch(np.swapaxes(F, 1, 2))
            return vals, np.swapaxes(G, 1, 2)
        if mode == "projective-l1":
            if self.X.p == 1.0:
                flat = F.reshape(-1, F.shape[2])
                return row_norms(flat, self.Y.p).reshape(R, -1).sum(axis=1), row_norming(flat, self.Y.p).reshape(F.shape)
            vals, G = _TagNorm(self.tag, self.Y, self.X, self.budget, self.stream).batch(np.swapaxes(F, 1, 2))
            return vals, np.swapaxes(G, 1, 2)
        if mode == "injective-l1":
            S = unit_ball_extreme_points(self.X.dual, self.budget.enum_cap)  # sign vectors
            images = np.einsum("sn,rnm->rsm", S, F)
            vals = row_norms(images.reshape(-1, F.shape[2]), self.Y.p).reshape(R, -1)
            k = np.argmax(vals, axis=1)
            g = row_norming(images[np.arange(R), k], self.Y.p)
            return vals[np.arange(R), k], np.einsum("rn,rm->rnm", S[k], g)
        raise RuntimeError("no batched evaluation for this crossnorm")

    def estimate(self, F: np.ndarray, budget: Budget | None = None) -> NormEstimate:
        if self.batched:
            v, G = self.batch(F[None])
            return NormEstimate(v[0], Direction.EXACT, method=f"{self.tag.name}:{self.mode}", info={"subgradient": G[0]})
        return alpha_norm(Tensor(F, self.X, self.Y), self.tag, budget or self.budget, self.stream)

    def values(self, F: np.ndarray, budget: Budget) -> tuple[np.ndarray, np.ndarray]:
        if self.batched:
            return self.batch(F)
        ests = [self.estimate(f, budget) for f in F]
        return np.array([e.value for e in ests]), np.stack([e.info["subgradient"] for e in ests])

    def dual_argmax(self, H: np.ndarray, budget: Budget) -> np.ndarray:
        """For each ``H_r`` an ``F_r`` in the unit ball (approximately) maximizing ``<H_r, F_r>``."""
        mode = self.mode
        R = H.shape[0]
        if mode == "entrywise":
            q = dual_exponent(self.tag.p)
            return row_norming(H.reshape(R, -1), q).reshape(H.shape)
        if mode == "svd-injective":
            u, s, vt = np.linalg.svd(H, full_matrices=False)
            keep = s > (s[:, :1] * 1e-14)
            return np.einsum("rik,rk,rkj->rij", u, keep.astype(float), vt)
        if mode == "svd-projective":
            u, s, vt = np.linalg.svd(H, full_matrices=False)
            return np.einsum("ri,rj->rij", u[:, :, 0], vt[:, 0, :])
        out = np.zeros_like(H)
        for r in range(R):
            T = Tensor(H[r], self.X.dual, self.Y.dual)
            if self.tag.kind is CrossnormKind.PROJECTIVE:
                f, g = injective_norm(T, budget, self.stream).witness or (np.zeros(H.shape[1]), np.zeros(H.shape[2]))
                out[r] = np.outer(f, g)
            else:
                out[r] = projective_norm(T, budget, self.stream).info["subgradient"]
        return out


def _small(budget: Budget) -> Budget:
    return budget.scaled(restarts=max(1, min(budget.restarts, 4)), max_iters=min(budget.max_iters, 40))


# -- induced norms ---------------------------------------------------------------


def induced_crossnorm(
    L: OperatorTensor, spec: InducedNormSpec, budget: Budget = DEFAULT_BUDGET, stream: int = 0
) -> NormEstimate:
    """``||L||_[beta, gamma] = sup_{F != 0} ||L(F)||_gamma / ||F||_beta``.

    The witness is a maximizing ``F`` normalized to ``||F||_beta = 1``
    (approximately, where ``beta`` is itself estimated).  ``info`` carries
    the image ``L(F)`` and a subgradient ``G`` of ``gamma`` there, which
    gives the derivative of the norm with respect to the terms of ``L``.
    """
    spec.check(L)
    beta, gamma = spec.domain_tag, spec.codomain_tag
    if not np.any(L.rearrangement()):
        F = np.zeros((L.X.dim, L.Y.dim))
        F[0, 0] = 1.0
        return NormEstimate(0.0, Direction.EXACT, witness=F, method="induced:zero",
                            info={"image": np.zeros((L.V.dim, L.W.dim)), "codomain_subgradient": np.zeros((L.V.dim, L.W.dim))})
    if _frobenius(beta) and _frobenius(gamma):
        return _frobenius_induced(L)
    if beta.kind is CrossnormKind.ENTRYWISE and gamma.kind in (CrossnormKind.ENTRYWISE, CrossnormKind.HILBERTIAN):
        return _entrywise_induced(L, beta, gamma, budget, stream)
    num = _TagNorm(gamma, L.V, L.W, budget, stream)
    if beta.kind is CrossnormKind.PROJECTIVE:
        return _rank_one_search(L, num, budget, stream)
    den = _TagNorm(beta, L.X, L.Y, budget, stream)
    est = _ratio_search(L, num, den, budget, stream)
    if (
        beta.kind is CrossnormKind.INJECTIVE
        and L.X.p == 2.0 and L.Y.p == 2.0 and L.X.dim == 2 and L.Y.dim == 2
        and num.batched
    ):
        est = _orthogonal_branch_and_bound(L, num, est)
    return _with_hilbert_upper(L, beta, gamma, est)


def _hilbert_constant(tag: CrossnormTag, s: LpSpace, t: LpSpace, frobenius_over_tag: bool) -> float | None:
    """Exact equivalence constants with the Frobenius norm on l_2 (x) l_2.

    With singular values ``sigma`` of a ``n x m`` matrix and ``k = min(n, m)``:
    ``|sigma|_inf <= |sigma|_2 <= |sigma|_1 <= sqrt(k) |sigma|_2 <= k |sigma|_inf``.
    Returns ``sup ||F||_F / ||F||_tag`` or ``sup ||F||_tag / ||F||_F``.
    """
    if not (s.p == 2.0 and t.p == 2.0):
        return None
    if _frobenius(tag):
        return 1.0
    root_k = math.sqrt(min(s.dim, t.dim))
    if tag.kind is CrossnormKind.INJECTIVE:
        return root_k if frobenius_over_tag else 1.0
    if tag.kind is CrossnormKind.PROJECTIVE:
        return 1.0 if frobenius_over_tag else root_k
    return None


def _with_hilbert_upper(L: OperatorTensor, beta: CrossnormTag, gamma: CrossnormTag, est: NormEstimate) -> NormEstimate:
    """Attach ``[beta,gamma] <= c_gamma [F,F] c_beta`` where both constants are exact.

    The factorization goes through the Frobenius norm on both sides, whose
    induced norm is computed exactly.
    """
    if est.direction is Direction.EXACT:
        return est
    c_dom = _hilbert_constant(beta, L.X, L.Y, frobenius_over_tag=True)
    c_cod = _hilbert_constant(gamma, L.V, L.W, frobenius_over_tag=False)
    if c_dom is None or c_cod is None:
        return est
    bound = c_cod * c_dom * _frobenius_induced(L).value * (1 + 1e-12)
    if bound >= est.hi:
        return est
    info = dict(est.info)
    info["hilbert_equivalence_upper"] = bound
    return replace(est, upper=bound, info=info)


def _frobenius_induced(L: OperatorTensor) -> NormEstimate:
    n, m, v, w = L.X.dim, L.Y.dim, L.V.dim, L.W.dim
    N, M = n * m, v * w

    def mv(x):
        return L.matrix_apply(np.asarray(x).reshape(n, m)).ravel()

    def rmv(y):
        return L.matrix_adjoint(np.asarray(y).reshape(v, w)).ravel()

    if min(N, M) == 1:
        # the map is a single row or column; its norm is that vector's length
        if N == 1:
            col = mv(np.ones(1))
            s = float(np.linalg.norm(col))
            vec_in, vec_out = np.ones(1), (col / s if s > 0 else col)
        else:
            row = rmv(np.ones(1))
            s = float(np.linalg.norm(row))
            vec_in, vec_out = (row / s if s > 0 else row), np.ones(1)
    else:
        op = LinearOperator((M, N), matvec=mv, rmatvec=rmv, dtype=float)
        v0 = np.random.default_rng(0).standard_normal(min(M, N))
        u, sv, vt = svds(op, k=1, tol=0, v0=v0)
        s = float(sv[0])
        vec_in, vec_out = vt[0], u[:, 0]
        # fix the sign so that the image has a positive pairing with vec_out
        if mv(vec_in) @ vec_out < 0:
            vec_out = -vec_out
    F = vec_in.reshape(n, m)
    image = mv(vec_in).reshape(v, w)
    return NormEstimate(
        s,
        Direction.EXACT,
        witness=F,
        method="induced:frobenius-arpack",
        info={"image": image, "codomain_subgradient": vec_out.reshape(v, w)},
    )


def _entrywise_induced(L, beta, gamma, budget, stream) -> NormEstimate:
    n, m, v, w = L.X.dim, L.Y.dim, L.V.dim, L.W.dim

    def forward(U):
        return _apply_batch(L, U.reshape(-1, n, m)).reshape(U.shape[0], v * w)

    def backward(W):
        return _adjoint_batch(L, W.reshape(-1, v, w)).reshape(W.shape[0], n * m)

    op = LinearMap(n * m, v * w, forward, backward)
    res = maximize_ratio(op, LpSpace(n * m, beta.p), LpSpace(v * w, gamma.p), budget, stream * 1000 + _S_RATIO,
                         hints=_product_hints(L, budget, stream))
    F = res.u.reshape(n, m)
    return NormEstimate(
        res.value,
        Direction.EXACT if res.exact else Direction.LOWER,
        witness=F,
        method=f"induced:entrywise:{res.method}",
        restarts=res.restarts,
        seed=None if res.exact else budget.seed,
        info={"image": forward(res.u[None])[0].reshape(v, w), "codomain_subgradient": res.w.reshape(v, w)},
    )


def _product_hints(L: OperatorTensor, budget: Budget, stream: int) -> list:
    """``x_A (x) x_B`` from the operator-norm witnesses of the largest term.

    On a single term this start already attains ``||A|| ||B||`` for every
    crossnorm with ``||x (x) y|| = ||x|| ||y||``.
    """
    A, B = max(L.terms, key=lambda t: np.linalg.norm(t[0]) * np.linalg.norm(t[1]))
    xa = operator_norm(A, L.X, L.V, budget, stream).witness
    xb = operator_norm(B, L.Y, L.W, budget, stream + 1).witness
    return [np.outer(xa, xb)]


def _finish_ratio(L, num: _TagNorm, den_est: NormEstimate, F: np.ndarray, method: str, budget, restarts, **info):
    image = L.matrix_apply(F)
    num_est = num.estimate(image)
    est = certified_ratio(num_est, den_est, method, witness=F, restarts=restarts, seed=budget.seed,
                          info={"image": image, "codomain_subgradient": num_est.info.get("subgradient"), **info})
    return est


def _rank_one_search(L: OperatorTensor, num: _TagNorm, budget: Budget, stream: int) -> NormEstimate:
    """``sup ||L(x (x) y)||_gamma`` over unit ``x``, ``y``: a projective domain.

    The projective unit ball is the closed convex hull of the unit single
    tensors and the numerator is convex, so this is the induced norm.  The
    denominator of every candidate is exactly ``||x|| ||y|| = 1``.
    """
    X, Y = L.X, L.Y
    one = NormEstimate(1.0, Direction.EXACT, method="single-tensor")
    ex = _enum_count(X, budget.enum_cap)
    ey = _enum_count(Y, budget.enum_cap)
    if num.batched and ex is not None and ey is not None and ex * ey <= _RANK_ONE_ENUM_CAP:
        EX = unit_ball_extreme_points(X, budget.enum_cap)
        EY = unit_ball_extreme_points(Y, budget.enum_cap)
        F = np.einsum("an,bm->abnm", EX, EY).reshape(-1, X.dim, Y.dim)
        vals, G = num.batch(_apply_batch(L, F))
        k = int(np.argmax(vals))
        image = L.matrix_apply(F[k])
        return NormEstimate(vals[k], Direction.EXACT, witness=F[k], method="induced:rank-one-enumeration",
                            info={"image": image, "codomain_subgradient": G[k]})

    b = budget if num.batched else _small(budget)
    R = max(b.restarts, 1)
    xs, ys = [], []
    hint = _rank_one_hint(L, b, stream)
    for r in range(R):
        if r == 0 and hint is not None:
            x, y = hint
        else:
            rng = make_rng(b.seed, stream, _S_RANK_ONE, r)
            x, y = rng.standard_normal(X.dim), rng.standard_normal(Y.dim)
        xs.append(x)
        ys.append(y)
    x = _unit_rows(np.array(xs), X.p)
    y = _unit_rows(np.array(ys), Y.p)
    qx, qy = dual_exponent(X.p), dual_exponent(Y.p)

    def objective(x, y):
        F = np.einsum("rn,rm->rnm", x, y)
        vals, G = num.values(_apply_batch(L, F), b)
        return vals, _adjoint_batch(L, G)

    best, H = objective(x, y)
    for _ in range(max(b.max_iters, 1)):
        # x <- argmax_{B_X} <x, H y>; then y likewise; each step is monotone by convexity
        x_new = row_norming(np.einsum("rnm,rm->rn", H, y), qx)
        x_new = np.where(np.any(x_new, axis=1)[:, None], x_new, x)
        _, H = objective(_unit_rows(x_new, X.p), y)
        y_new = row_norming(np.einsum("rnm,rn->rm", H, _unit_rows(x_new, X.p)), qy)
        y_new = np.where(np.any(y_new, axis=1)[:, None], y_new, y)
        x_new, y_new = _unit_rows(x_new, X.p), _unit_rows(y_new, Y.p)
        vals, H_new = objective(x_new, y_new)
        improved = vals > best * (1 + 1e-13) + 1e-300
        if not np.any(improved):
            break
        x = np.where(improved[:, None], x_new, x)
        y = np.where(improved[:, None], y_new, y)
        best = np.where(improved, vals, best)
        H = np.where(improved[:, None, None], H_new, H)
    k = int(np.argmax(best))  # first index on ties
    F = np.outer(x[k], y[k])
    return _finish_ratio(L, num, one, F, "induced:rank-one-ascent", budget, R, trace=best)


def _rank_one_hint(L: OperatorTensor, budget: Budget, stream: int):
    if not L.terms:
        return None
    F = _product_hints(L, budget, stream)[0]
    u, s, vt = np.linalg.svd(F)
    return u[:, 0] * s[0], vt[0]


def _enum_count(s: LpSpace, cap: int):
    if s.p == 1.0:
        return 2 * s.dim
    if s.p is INF and s.dim <= cap:
        return 2**s.dim
    return None


def _unit_rows(Z: np.ndarray, p) -> np.ndarray:
    n = row_norms(Z, p)
    return Z / np.where(n > 0, n, 1.0)[:, None]


def _ratio_search(L: OperatorTensor, num: _TagNorm, den: _TagNorm, budget: Budget, stream: int) -> NormEstimate:
    """Multi-start normalized subgradient ascent of ``||L F||_gamma / ||F||_beta``."""
    n, m = L.X.dim, L.Y.dim
    fast = num.batched and den.batched
    b = budget if fast else _small(budget)
    R = max(b.restarts, 1)
    starts = _product_hints(L, b, stream)
    for r in range(R):
        if r == 0:
            starts.append(_frobenius_induced(L).witness)
        else:
            starts.append(make_rng(b.seed, stream, _S_RATIO, r).standard_normal((n, m)))
    F = np.array(starts)
    d, _ = den.values(F, b)
    F = F / np.where(d > 0, d, 1.0)[:, None, None]

    def ratio(F):
        dv, Gd = den.values(F, b)
        nv, Gn = num.values(_apply_batch(L, F), b)
        return nv / np.where(dv > 0, dv, np.inf), nv, dv, Gn, Gd

    best, nv, dv, Gn, Gd = ratio(F)
    best_F = F.copy()
    if fast:
        eta = b.step
        for _ in range(b.max_iters):
            g = (_adjoint_batch(L, Gn) - (nv / dv)[:, None, None] * Gd) / dv[:, None, None]
            gn = np.sqrt(np.einsum("rij,rij->r", g, g))
            scale = np.sqrt(np.einsum("rij,rij->r", F, F))
            step = np.where(gn > 0, eta * scale / np.where(gn > 0, gn, 1.0), 0.0)
            F = F + step[:, None, None] * g
            d, _ = den.values(F, b)
            F = F / np.where(d > 0, d, 1.0)[:, None, None]
            val, nv, dv, Gn, Gd = ratio(F)
            better = val > best
            best = np.where(better, val, best)
            best_F[better] = F[better]
            eta *= b.decay
    # polish: F <- argmax over the beta-ball of <L*(G), F>; monotone by convexity of the numerator
    F = best_F.copy()
    val, nv, dv, Gn, Gd = ratio(F)
    for _ in range(b.polish_iters if fast else min(b.polish_iters, 10)):
        F_new = den.dual_argmax(_adjoint_batch(L, Gn), b)
        val, nv, dv, Gn_new, Gd = ratio(F_new)
        better = val > best * (1 + 1e-15)
        if not np.any(better):
            break
        best = np.where(better, val, best)
        best_F[better] = F_new[better]
        Gn = np.where(better[:, None, None], Gn_new, Gn)
    k = int(np.argmax(best))
    F = best_F[k]
    den_est = den.estimate(F)
    return _finish_ratio(L, num, den_est, F, "induced:ratio-ascent" if fast else "induced:ratio-ascent(slow)", budget, R, trace=best)


def _orthogonal_branch_and_bound(L: OperatorTensor, num: _TagNorm, est: NormEstimate) -> NormEstimate:
    """Certified bracket for an injective domain on ``l_2^2 (x) l_2^2``.

    The spectral-norm unit ball of 2 x 2 matrices has the orthogonal group
    as its extreme points: rotations ``I cos t + J sin t`` and reflections
    ``D cos t + S sin t``.  Along each circle ``g(t) = ||P cos t + Q sin t||``
    is Lipschitz with constant ``sqrt(||P||^2 + ||Q||^2)``, so on ``[a, b]``
    it stays below ``(g(a) + g(b))/2 + C (b - a)/2``.
    """
    circles = [
        (np.eye(2), np.array([[0.0, -1.0], [1.0, 0.0]])),
        (np.diag([1.0, -1.0]), np.array([[0.0, 1.0], [1.0, 0.0]])),
    ]
    plans = []
    lo = est.lo if est.direction is not Direction.HEURISTIC else 0.0
    best = (lo, est.witness)
    for P0, Q0 in circles:
        P, Q = L.matrix_apply(P0), L.matrix_apply(Q0)
        vals, _ = num.batch(np.stack([P, Q]))
        C = math.hypot(vals[0], vals[1])
        plans.append((P0, Q0, P, Q, C))

    def g(plan, t):
        P0, Q0, P, Q, C = plan
        c, s = np.cos(t), np.sin(t)
        vals, _ = num.batch(c[:, None, None] * P + s[:, None, None] * Q)
        return vals

    # level-synchronous refinement of all intervals that might still hold the maximum
    state = []
    for plan in plans:
        t = np.linspace(0.0, np.pi, 65)
        gv = g(plan, t)
        k = int(np.argmax(gv))
        if gv[k] > best[0]:
            best = (float(gv[k]), plan[0] * np.cos(t[k]) + plan[1] * np.sin(t[k]))
        state.append((plan, t[:-1], t[1:], gv[:-1], gv[1:]))
    upper = math.inf
    while True:
        total = 0
        bounds = []
        new_state = []
        for plan, a, bnd, ga, gb in state:
            C = plan[4]
            ub = 0.5 * (ga + gb) + 0.5 * C * (bnd - a)
            bounds.append(ub)
            keep = ub > best[0] + _BB_RTOL * (1.0 + best[0])
            new_state.append((plan, a[keep], bnd[keep], ga[keep], gb[keep], ub[keep]))
            total += int(keep.sum())
        upper = max([float(u.max()) for u in bounds if u.size] + [best[0]])
        if total == 0 or total * 2 > _BB_MAX_INTERVALS:
            break
        state = []
        for plan, a, bnd, ga, gb, _ in new_state:
            mid = 0.5 * (a + bnd)
            gm = g(plan, mid) if mid.size else mid
            if gm.size:
                k = int(np.argmax(gm))
                if gm[k] > best[0]:
                    best = (float(gm[k]), plan[0] * np.cos(mid[k]) + plan[1] * np.sin(mid[k]))
            state.append((plan, np.concatenate([a, mid]), np.concatenate([mid, bnd]), np.concatenate([ga, gm]), np.concatenate([gm, gb])))
    upper = max(upper, best[0]) * (1 + 1e-12) + 1e-300  # rounding in the evaluations
    info = dict(est.info)
    info["branch_and_bound_upper"] = upper
    if best[0] > est.lo:
        image = L.matrix_apply(best[1])
        nv, G = num.batch(image[None])
        info.update(image=image, codomain_subgradient=G[0])
        return NormEstimate(best[0], Direction.LOWER, witness=best[1], method="induced:orthogonal-branch-and-bound",
                            restarts=est.restarts, seed=est.seed, upper=upper, info=info)
    return NormEstimate(est.value, est.direction, witness=est.witness, method=est.method + "+orthogonal-branch-and-bound",
                        restarts=est.restarts, seed=est.seed, lower=est.lower, upper=upper, info=info)


# -- operator tensors as elements of B[X,V] (x) B[Y,W] ----------------------------


def operator_tensor_injective_norm(L: OperatorTensor, budget: Budget = DEFAULT_BUDGET, stream: int = 0) -> NormEstimate:
    """Injective norm of ``L`` in ``B[X,V] (x) B[Y,W]``.

    The dual unit ball of an operator norm is the closed convex hull of the
    functionals ``A -> g^T A x`` with unit ``x`` and ``g``, so the norm is
    ``sup sum_j (g^T A_j x)(h^T B_j y)`` over unit ``x, g, y, h``.  Found by
    block-coordinate ascent; each block update is an exact linear
    maximization, so the iteration is monotone.  The witness is
    ``(x, g, y, h)``.
    """
    X, Y, V, W = L.spaces
    if not L.terms:
        return NormEstimate(0.0, Direction.EXACT, method="operator-injective:zero")
    A = np.stack([a for a, _ in L.terms])
    B = np.stack([b for _, b in L.terms])
    if not np.any(np.einsum("jvx,jwy->j", np.abs(A), np.abs(B))):
        return NormEstimate(0.0, Direction.EXACT, method="operator-injective:zero")
    R = max(budget.restarts, 1)
    blocks = []
    for r in range(R):
        if r == 0:
            ua, _, va = np.linalg.svd(A[0])
            ub, _, vb = np.linalg.svd(B[0])
            blocks.append((va[0], ua[:, 0], vb[0], ub[:, 0]))
        else:
            rng = make_rng(budget.seed, stream, _S_OP_INJ, r)
            blocks.append(tuple(rng.standard_normal(s.dim) for s in (X, V, Y, W)))
    x, g, y, h = (np.array([b[i] for b in blocks]) for i in range(4))
    x, y = _unit_rows(x, X.p), _unit_rows(y, Y.p)
    g, h = _unit_rows(g, dual_exponent(V.p)), _unit_rows(h, dual_exponent(W.p))
    px, py = dual_exponent(X.p), dual_exponent(Y.p)

    def coeffs(x, g, y, h):
        a = np.einsum("rv,jvx,rx->rj", g, A, x)
        b = np.einsum("rw,jwy,ry->rj", h, B, y)
        return a, b

    def value(x, g, y, h):
        a, b = coeffs(x, g, y, h)
        return np.sum(a * b, axis=1)

    best = value(x, g, y, h)
    for _ in range(max(budget.max_iters, 1)):
        a, b = coeffs(x, g, y, h)
        x = _keep(row_norming(np.einsum("rj,jvx,rv->rx", b, A, g), px), x)
        a, b = coeffs(x, g, y, h)
        g = _keep(row_norming(np.einsum("rj,jvx,rx->rv", b, A, x), V.p), g)
        a, b = coeffs(x, g, y, h)
        y = _keep(row_norming(np.einsum("rj,jwy,rw->ry", a, B, h), py), y)
        a, b = coeffs(x, g, y, h)
        h = _keep(row_norming(np.einsum("rj,jwy,ry->rw", a, B, y), W.p), h)
        val = value(x, g, y, h)
        if np.all(val <= best * (1 + 1e-14) + 1e-300):
            best = np.maximum(best, val)
            break
        best = np.maximum(best, val)
    val = value(x, g, y, h)
    k = int(np.argmax(val))
    # rescale the witness to exactly unit norms so the value is attained
    xs = x[k] / max(row_norms(x[k : k + 1], X.p)[0], 1.0)
    gs = g[k] / max(row_norms(g[k : k + 1], dual_exponent(V.p))[0], 1.0)
    ys = y[k] / max(row_norms(y[k : k + 1], Y.p)[0], 1.0)
    hs = h[k] / max(row_norms(h[k : k + 1], dual_exponent(W.p))[0], 1.0)
    v = float(abs(value(xs[None], gs[None], ys[None], hs[None])[0]))
    return NormEstimate(v, Direction.LOWER, witness=(xs, gs, ys, hs), method="operator-injective:block-ascent",
                        restarts=R, seed=budget.seed)


def _keep(new: np.ndarray, old: np.ndarray) -> np.ndarray:
    return np.where(np.any(new, axis=1)[:, None], new, old)


def operator_tensor_projective_norm(L: OperatorTensor, budget: Budget = DEFAULT_BUDGET, stream: int = 0) -> NormEstimate:
    """Projective norm of ``L`` in ``B[X,V] (x) B[Y,W]``: ``inf sum ||A_j|| ||B_j||``.

    Candidates are the given terms, the singular value decomposition of the
    rearrangement ``sum vec(A_j) vec(B_j)^T`` and random invertible mixings
    ``A' = A M``, ``B' = B M^{-T}`` of both.  The cheapest is returned.  It
    is a certified upper bound when every operator norm is exact.
    """
    X, Y, V, W = L.spaces
    reps = []
    if L.terms:
        reps.append((np.stack([a for a, _ in L.terms]), np.stack([b for _, b in L.terms])))
    Rm = L.rearrangement()
    u, s, vt = np.linalg.svd(Rm, full_matrices=False)
    keep = s > (s[0] * 1e-14 if s.size and s[0] > 0 else np.inf)
    if not np.any(keep):
        return NormEstimate(0.0, Direction.EXACT, witness=[], method="operator-projective:zero")
    svd_rep = ((u[:, keep] * s[keep]).T.reshape(-1, V.dim, X.dim), vt[keep].reshape(-1, W.dim, Y.dim))
    reps.append(svd_rep)

    exact_all = True

    def cost(As, Bs):
        nonlocal exact_all
        na, ea = _operator_norms_batch(As.reshape(-1, V.dim, X.dim), X, V, budget)
        nb, eb = _operator_norms_batch(Bs.reshape(-1, W.dim, Y.dim), Y, W, budget)
        exact_all = exact_all and ea and eb
        return np.sum((na * nb).reshape(As.shape[0], As.shape[1]), axis=1)

    best_val, best_rep = math.inf, None
    for As, Bs in reps:
        c = float(cost(As[None], Bs[None])[0])
        if c < best_val:
            best_val, best_rep = c, (As, Bs)

    samples = 8 * max(budget.restarts, 0)
    for base_index, (As, Bs) in enumerate(reps):
        J = As.shape[0]
        if J < 2 or samples == 0:
            continue
        rng = make_rng(budget.seed, stream, _S_OP_PROJ, base_index)
        Ms = rng.standard_normal((samples, J, J))
        # half of the mixings are small perturbations of the identity
        Ms[: samples // 2] = np.eye(J) + 0.2 * Ms[: samples // 2]
        cond = np.linalg.cond(Ms)
        Ms = Ms[cond < 1e8]
        Minv_T = np.swapaxes(np.linalg.inv(Ms), 1, 2)
        A_mix = np.einsum("jvx,sjk->skvx", As, Ms)
        B_mix = np.einsum("jwy,sjk->skwy", Bs, Minv_T)
        c = cost(A_mix, B_mix)
        k = int(np.argmin(c))
        if c[k] < best_val:
            best_val, best_rep = float(c[k]), (A_mix[k], B_mix[k])
    terms = list(zip(best_rep[0], best_rep[1]))
    residual = float(np.abs(OperatorTensor(terms, X, Y, V, W).rearrangement() - Rm).max())
    return NormEstimate(
        best_val,
        Direction.UPPER if exact_all else Direction.HEURISTIC,
        witness=terms,
        method="operator-projective:representation-search",
        restarts=samples,
        seed=budget.seed,
        info={"representation_residual": residual},
    )


# -- functionals ---------------------------------------------------------------


def functional_operator_dual_norm(phi, X: LpSpace, V: LpSpace, budget: Budget = DEFAULT_BUDGET, stream: int = 0) -> NormEstimate:
    """``sup_{||A||_{X->V} <= 1} sum phi_rc A_rc`` for a pairing matrix ``phi``.

    The operator norm on ``B[X,V]`` is the injective norm of ``V (x) X*``,
    so its dual is the projective norm of ``phi`` in ``V* (x) X``: exact on
    l_2 (the nuclear norm) and with an l_1 factor, an upper bound with a
    dual certificate elsewhere.  ``info["subgradient"]`` is a maximizing
    ``A`` up to the accuracy of that certificate.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (V.dim, X.dim):
        raise DimensionError(f"pairing of shape {phi.shape} for operators from {X} to {V}")
    est = projective_norm(Tensor(phi, V.dual, X), budget, stream)
    return NormEstimate(est.value, est.direction, witness=est.witness, method=f"operator-dual:{est.method}",
                        restarts=est.restarts, seed=est.seed, lower=est.lower, upper=est.upper, info=est.info)


def functional_tensor_norm(
    k: OperatorFunctionalTensor,
    spec: InducedNormSpec,
    X: LpSpace,
    Y: LpSpace,
    V: LpSpace | None = None,
    W: LpSpace | None = None,
    budget: Budget = DEFAULT_BUDGET,
    stream: int = 0,
    max_terms: int = 2,
) -> NormEstimate:
    """``sup |k(L)| / ||L||_spec`` over operator tensors with at most ``max_terms`` terms.

    Ascent on the terms of ``L``; the derivative of ``||L||`` comes from
    the induced-norm witness.  Restart ``r < len(k)`` starts from the single
    term that maximizes the ``r``-th term of ``k``.  A certified lower bound
    needs an upper bound on ``||L||`` (exact for Frobenius specs).  The
    witness is the best ``L``.
    """
    V = X if V is None else V
    W = Y if W is None else W
    shape_a, shape_b = (V.dim, X.dim), (W.dim, Y.dim)
    for phi, eta in k.terms:
        if phi.shape != shape_a or eta.shape != shape_b:
            raise DimensionError("pairing shapes do not match the operator spaces")
    if not k.terms or not any(np.any(p) and np.any(e) for p, e in k.terms):
        return NormEstimate(0.0, Direction.EXACT, method="functional:zero")
    b = budget.scaled(restarts=max(1, min(budget.restarts, 6)), max_iters=min(budget.max_iters, 80))
    T = max(1, max_terms)
    Phi = np.stack([p for p, _ in k.terms])
    Eta = np.stack([e for _, e in k.terms])

    def build(As, Bs):
        return OperatorTensor(list(zip(As, Bs)), X, Y, V, W)

    def kappa(As, Bs):
        a = np.einsum("kvx,jvx->kj", Phi, As)
        c = np.einsum("kwy,jwy->kj", Eta, Bs)
        return float(np.sum(a * c)), a, c

    def norm_and_grad(As, Bs):
        est = induced_crossnorm(build(As, Bs), spec, b, stream * 1000 + _S_FUNCTIONAL)
        F = est.witness
        G = est.info.get("codomain_subgradient")
        if G is None or F is None:
            return est, None, None
        dA = np.einsum("vw,jwy,xy->jvx", G, Bs, F)
        dB = np.einsum("vw,jvx,xy->jwy", G, As, F)
        return est, dA, dB

    def balance(As, Bs):
        na = np.linalg.norm(As.reshape(T, -1), axis=1)
        nb = np.linalg.norm(Bs.reshape(T, -1), axis=1)
        s = np.sqrt(np.where((na > 0) & (nb > 0), nb / np.where(na > 0, na, 1.0), 1.0))
        As, Bs = As * s[:, None, None], Bs / s[:, None, None]
        total = np.sqrt(np.sum(As**2) + np.sum(Bs**2))
        return As / total, Bs / total

    best_val, best_L = -math.inf, None
    for r in range(max(b.restarts, 1)):
        rng = make_rng(b.seed, stream, _S_FUNCTIONAL, r)
        As = np.zeros((T,) + shape_a)
        Bs = np.zeros((T,) + shape_b)
        if r < len(k.terms):
            As[0] = functional_operator_dual_norm(Phi[r], X, V, b).info["subgradient"]
            Bs[0] = functional_operator_dual_norm(Eta[r], Y, W, b).info["subgradient"]
        else:
            As, Bs = rng.standard_normal(As.shape), rng.standard_normal(Bs.shape)
        As, Bs = balance(As, Bs)
        eta = b.step
        local_best, local_L = -math.inf, None
        for _ in range(b.max_iters + 1):
            kv, a, c = kappa(As, Bs)
            if kv < 0:
                Bs = -Bs
                kv, a, c = kappa(As, Bs)
            est, dA, dB = norm_and_grad(As, Bs)
            if est.value <= 0:
                break
            ratio = kv / est.value
            if ratio > local_best:
                local_best, local_L = ratio, (As.copy(), Bs.copy())
            if dA is None:
                break
            gk_A = np.einsum("kj,kvx->jvx", c, Phi)
            gk_B = np.einsum("kj,kwy->jwy", a, Eta)
            gA = (gk_A - ratio * dA) / est.value
            gB = (gk_B - ratio * dB) / est.value
            gn = math.sqrt(np.sum(gA**2) + np.sum(gB**2))
            if gn == 0:
                break
            As, Bs = balance(As + eta * gA / gn, Bs + eta * gB / gn)
            eta *= b.decay
        if local_best > best_val:
            best_val, best_L = local_best, local_L
    L = build(*best_L)
    kv = abs(pair(k, L))
    den = induced_crossnorm(L, spec, budget, stream * 1000 + _S_FUNCTIONAL)
    num = NormEstimate(kv, Direction.EXACT, method="pairing")
    return certified_ratio(num, den, f"functional:ascent(terms<={T})", witness=L, restarts=b.restarts, seed=b.seed,
                           info={"denominator": den})
