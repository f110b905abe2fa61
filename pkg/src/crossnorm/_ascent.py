"""
Maximizing ||M u||_Q over the unit ball of P for a linear map M.

Both the injective norm (M = F^T from X* to Y) and the operator norm
(M = A from X to V) reduce to this problem.  Exact answers come from the
singular value decomposition (P = Q = l_2) or from enumerating the extreme
points of a polyhedral unit ball; otherwise a multi-start normalized
subgradient ascent followed by an alternating polish returns an attained
ratio, which is a certified lower bound.

All restarts run together as the rows of one array.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .estimates import Budget
from .spaces import INF, LpSpace, dual_exponent, make_rng, unit_ball_extreme_points


def row_norms(Z: np.ndarray, p) -> np.ndarray:
    """l_p norm of every row of ``Z``."""
    a = np.abs(Z)
    if p is INF:
        return a.max(axis=1) if a.shape[1] else np.zeros(a.shape[0])
    if p == 1.0:
        return a.sum(axis=1)
    if p == 2.0:
        return np.sqrt(np.einsum("ij,ij->i", Z, Z))
    m = a.max(axis=1)
    safe = np.where(m > 0, m, 1.0)
    return m * np.sum((a / safe[:, None]) ** p, axis=1) ** (1.0 / p)


def row_norming(Z: np.ndarray, p) -> np.ndarray:
    """Row-wise norming functionals: ``||w_i||_{p'} <= 1``, ``w_i . z_i = ||z_i||_p``."""
    if p is INF:
        W = np.zeros_like(Z)
        if Z.shape[1]:
            k = np.argmax(np.abs(Z), axis=1)
            rows = np.arange(Z.shape[0])
            W[rows, k] = np.sign(Z[rows, k])
        return W
    if p == 1.0:
        return np.sign(Z)
    n = row_norms(Z, p)
    safe = np.where(n > 0, n, 1.0)
    if p == 2.0:
        return Z / safe[:, None]
    return np.sign(Z) * (np.abs(Z) / safe[:, None]) ** (p - 1.0)


@dataclass
class LinearMap:
    """A linear map ``R^n_in -> R^n_out`` acting on batches of row vectors."""

    n_in: int
    n_out: int
    forward: Callable[[np.ndarray], np.ndarray]
    backward: Callable[[np.ndarray], np.ndarray]
    matrix: np.ndarray | None = None

    @classmethod
    def from_matrix(cls, M) -> "LinearMap":
        M = np.asarray(M, dtype=float)
        return cls(M.shape[1], M.shape[0], lambda U: U @ M.T, lambda W: W @ M, M)


@dataclass
class AscentResult:
    value: float
    u: np.ndarray  # unit vector of P attaining the value
    w: np.ndarray  # norming functional of M u in Q*, so w . M u = value
    exact: bool
    method: str
    restarts: int = 0
    trace: np.ndarray | None = None  # best value per restart
    candidates: tuple | None = None  # (U, W, values) for every restart or extreme point


def _enumeration_size(s: LpSpace, cap: int) -> int | None:
    if s.p == 1.0:
        return 2 * s.dim
    if s.p is INF and s.dim <= cap:
        return 2 ** s.dim
    return None


def maximize_ratio(
    op: LinearMap,
    P: LpSpace,
    Q: LpSpace,
    budget: Budget,
    stream: int = 0,
    allow_exact: bool = True,
    hints=(),
) -> AscentResult:
    """``sup_{||u||_P <= 1} ||op(u)||_Q`` with a certificate.

    ``hints`` are extra starting points for the ascent, used ahead of the
    random restarts.
    """
    if op.n_in != P.dim or op.n_out != Q.dim:
        raise ValueError("map dimensions do not match the spaces")
    if allow_exact:
        res = _exact(op, P, Q, budget.enum_cap)
        if res is not None:
            return res
    return _ascent(op, P, Q, budget, stream, hints)


def _finish(op: LinearMap, P: LpSpace, Q: LpSpace, u: np.ndarray, exact: bool, method: str, **kw) -> AscentResult:
    u = u / row_norms(u[None, :], P.p)[0]
    y = op.forward(u[None, :])
    value = float(row_norms(y, Q.p)[0])
    w = row_norming(y, Q.p)[0]
    return AscentResult(value, u, w, exact, method, **kw)


def _exact(op: LinearMap, P: LpSpace, Q: LpSpace, cap: int) -> AscentResult | None:
    if op.matrix is not None and not np.any(op.matrix):
        return AscentResult(0.0, np.eye(P.dim)[0], np.zeros(Q.dim), True, "zero")
    if P.p == 2.0 and Q.p == 2.0 and op.matrix is not None:
        _, s, vt = np.linalg.svd(op.matrix)
        return _finish(op, P, Q, vt[0], True, "svd")
    size_in = _enumeration_size(P, cap)
    size_out = _enumeration_size(Q.dual, cap)
    if size_in is None and size_out is None:
        return None
    if size_out is None or (size_in is not None and size_in <= size_out):
        E = unit_ball_extreme_points(P, cap)
        Y = op.forward(E)
        vals = row_norms(Y, Q.p)
        k = int(np.argmax(vals))
        return _finish(op, P, Q, E[k], True, f"enumerate-ext(B_{P})", candidates=(E, row_norming(Y, Q.p), vals))
    # dual side: sup over extreme points g of B_{Q*} of ||op^T g||_{P*}
    G = unit_ball_extreme_points(Q.dual, cap)
    back = op.backward(G)
    vals = row_norms(back, dual_exponent(P.p))
    k = int(np.argmax(vals))
    u = row_norming(back[k : k + 1], dual_exponent(P.p))[0]
    if not np.any(u):
        u = np.eye(P.dim)[0]
    U_all = row_norming(back, dual_exponent(P.p))
    res = _finish(op, P, Q, u, True, f"enumerate-ext(B_{Q.dual})", candidates=(U_all, G, vals))
    # the attained ratio equals the enumerated maximum up to rounding
    if res.value < vals[k]:
        res.value = float(vals[k])
        res.w = G[k]
    return res


def _normalize_rows(U: np.ndarray, p) -> np.ndarray:
    n = row_norms(U, p)
    n = np.where(n > 0, n, 1.0)
    return U / n[:, None]


def starting_points(P: LpSpace, budget: Budget, stream: int, hint: np.ndarray | None = None, extra=()) -> np.ndarray:
    """Restart starts keyed by ``(seed, stream, r)``; restart 0 may use ``hint``.

    Nonzero rows of ``extra`` are prepended to the restarts.
    """
    rows = [np.asarray(h, dtype=float) for h in extra if np.any(h)]
    for r in range(budget.restarts):
        if r == 0 and hint is not None and np.any(hint):
            rows.append(np.asarray(hint, dtype=float))
            continue
        rng = make_rng(budget.seed, stream, r)
        rows.append(rng.standard_normal(P.dim))
    if not rows:
        return np.zeros((0, P.dim))
    return _normalize_rows(np.array(rows), P.p)


def _ascent(op: LinearMap, P: LpSpace, Q: LpSpace, budget: Budget, stream: int, hints=()) -> AscentResult:
    hint = None
    if op.matrix is not None:
        _, _, vt = np.linalg.svd(op.matrix)
        hint = vt[0]
    U = starting_points(P, budget, stream, hint, [np.ravel(h) for h in hints])
    if U.shape[0] == 0:
        U = _normalize_rows(np.ones((1, P.dim)), P.p)
    p_dual = dual_exponent(P.p)

    def ratios(U):
        return row_norms(op.forward(U), Q.p) / row_norms(U, P.p)

    best_val = ratios(U)
    best_U = U.copy()
    eta = budget.step
    for _ in range(budget.max_iters):
        Y = op.forward(U)
        h = row_norms(Y, Q.p)
        g = op.backward(row_norming(Y, Q.p)) - h[:, None] * row_norming(U, P.p)
        gn = np.linalg.norm(g, axis=1)
        move = gn > 0
        U = U.copy()
        U[move] += eta * g[move] / gn[move, None]
        U = _normalize_rows(U, P.p)
        val = ratios(U)
        better = val > best_val
        best_val = np.where(better, val, best_val)
        best_U[better] = U[better]
        eta *= budget.decay

    # alternating polish: w <- norming(M u), u <- norming(M^T w); monotone in w . M u
    U = best_U
    for _ in range(budget.polish_iters):
        Wq = row_norming(op.forward(U), Q.p)
        U_new = row_norming(op.backward(Wq), p_dual)
        U_new = np.where(np.any(U_new, axis=1)[:, None], U_new, U)
        U_new = _normalize_rows(U_new, P.p)
        val = ratios(U_new)
        better = val > best_val
        if not np.any(better & (val > best_val * (1 + 1e-15))):
            best_val = np.where(better, val, best_val)
            best_U[better] = U_new[better]
            break
        best_val = np.where(better, val, best_val)
        best_U[better] = U_new[better]
        U = U_new

    k = int(np.argmax(best_val))  # first index on ties
    W_all = row_norming(op.forward(best_U), Q.p)
    res = _finish(
        op, P, Q, best_U[k], False, "multistart-ascent",
        restarts=U.shape[0], trace=best_val, candidates=(best_U, W_all, best_val),
    )
    return res
