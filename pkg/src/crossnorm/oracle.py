"""
Independent reference values for validating the estimators.

Nothing here calls into :mod:`crossnorm.crossnorms`, :mod:`crossnorm._ascent`
or LAPACK's SVD: singular values come from a one-sided Jacobi iteration,
injective norms from an exhaustive nested grid, and projective norms from
random exactly-feasible decompositions.  These are slow and only meant for
dimensions up to 3 (the Kronecker oracle up to 4 x 4 factors).

Kronecker convention
--------------------
A tensor ``F`` (an ``n x m`` matrix) is flattened column by column, the row
index varying fastest: ``vec(F)[i + j*n] = F[i, j]``, i.e.
``F.ravel(order="F")``.  The same ordering is used on ``V x W``.  With it
``vec(A F B^T) = kron(B, A) vec(F)``, so an operator tensor
``sum_j A_j (x) B_j`` is the matrix ``sum_j kron(B_j, A_j)``.  This is the
only place in the package where that matrix is formed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .exceptions import BudgetError, CapabilityError
from .spaces import INF, LpSpace, dual_exponent
from .tensor_core import OperatorTensor, Tensor

__all__ = [
    "Certainty",
    "OracleResult",
    "jacobi_singular_values",
    "svd_spectral",
    "svd_nuclear",
    "kron_matrix",
    "kron_spectral",
    "grid_injective",
    "random_decomposition_search",
    "closed_form_injective",
    "closed_form_projective",
    "MAX_ORACLE_DIM",
]

MAX_ORACLE_DIM = 3
_BATCH = 256
_ES_BATCH = 32


class Certainty(str, enum.Enum):
    EXACT = "Exact"
    GRID_LOWER = "GridLower"
    SAMPLED_UPPER = "SampledUpper"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class OracleResult:
    value: float
    certainty: Certainty
    resolution: int | None = None
    samples: int | None = None
    witness: Any = None


def _ord(p):
    return np.inf if p is INF else float(p)


def _norms(V: np.ndarray, p, axis: int = -1) -> np.ndarray:
    return np.linalg.norm(V, ord=_ord(p), axis=axis)


# -- singular values -----------------------------------------------------------


def _jacobi(A: np.ndarray, tol: float = 1e-15, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """One-sided (Hestenes) Jacobi: ``A V`` with mutually orthogonal columns.

    Returns ``(A V, V)`` with ``V`` orthogonal, built from plane rotations.
    """
    A = np.array(A, dtype=float)
    n = A.shape[1]
    V = np.eye(n)
    for _ in range(max_sweeps):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                a, b, c = A[:, i] @ A[:, i], A[:, j] @ A[:, j], A[:, i] @ A[:, j]
                if c == 0.0 or abs(c) <= tol * math.sqrt(a * b) or abs(b - a) > 1e300 * abs(c):
                    continue
                rotated = True
                zeta = (b - a) / (2.0 * c)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.hypot(1.0, zeta))
                cs = 1.0 / math.sqrt(1.0 + t * t)
                rot = np.array([[cs, cs * t], [-cs * t, cs]])
                A[:, [i, j]] = A[:, [i, j]] @ rot
                V[:, [i, j]] = V[:, [i, j]] @ rot
        if not rotated:
            break
    return A, V


def jacobi_singular_values(M) -> np.ndarray:
    """Singular values by one-sided Jacobi rotations, descending."""
    A = np.array(M, dtype=float)
    if A.ndim != 2:
        raise ValueError("expected a matrix")
    if A.size == 0:
        return np.zeros(0)
    if A.shape[0] < A.shape[1]:
        A = A.T
    R, _ = _jacobi(A)
    return np.sort(np.sqrt(np.einsum("ij,ij->j", R, R)))[::-1]


def svd_spectral(M) -> float:
    s = jacobi_singular_values(M)
    return float(s[0]) if s.size else 0.0


def svd_nuclear(M) -> float:
    return float(np.sum(jacobi_singular_values(M)))


def kron_matrix(L: OperatorTensor) -> np.ndarray:
    """``sum_j kron(B_j, A_j)``, acting on the column-major ``vec(F)``."""
    K = np.zeros((L.V.dim * L.W.dim, L.X.dim * L.Y.dim))
    for A, B in L.terms:
        K += np.kron(B, A)
    return K


def kron_spectral(L: OperatorTensor) -> OracleResult:
    """Induced norm of ``L`` from Frobenius to Frobenius, i.e. ``||kron||_2``.

    Frobenius is the norm of ``l_2 (x) l_2``, so all four spaces must be l_2.
    """
    if any(s.p != 2.0 for s in L.spaces):
        raise CapabilityError("the Kronecker oracle needs l_2 on all four spaces")
    return OracleResult(svd_spectral(kron_matrix(L)), Certainty.EXACT)


# -- injective: nested grid ----------------------------------------------------


def _direction_grid(dim: int, resolution: int) -> np.ndarray:
    """Directions on the surface of the cube ``[-1, 1]^dim``, one per row.

    Each face carries the tensor grid ``linspace(-1, 1, 2**k + 1)`` with
    ``2**k >= resolution``, so finer resolutions contain the coarser grids,
    and the vertices, edge midpoints and face centres are always present:
    the extreme points of both the l_1 and the l_inf unit balls.  Only the
    faces ``x_i = +1`` are used because every objective here is even.
    """
    k = max(0, math.ceil(math.log2(max(resolution, 1))))
    if dim > MAX_ORACLE_DIM:
        raise BudgetError(f"grid oracle supports dimensions up to {MAX_ORACLE_DIM}, got {dim}")
    if dim == 1:
        return np.ones((1, 1))
    t = np.linspace(-1.0, 1.0, 2**k + 1)
    free = np.stack(np.meshgrid(*([t] * (dim - 1)), indexing="ij"), axis=-1).reshape(-1, dim - 1)
    faces = [np.insert(free, i, 1.0, axis=1) for i in range(dim)]
    return np.concatenate(faces)


def _check_dims(F: Tensor):
    n, m = F.shape
    if n > MAX_ORACLE_DIM or m > MAX_ORACLE_DIM:
        raise BudgetError(f"oracle limited to dims <= {MAX_ORACLE_DIM}, got {n}x{m}")


def grid_injective(F: Tensor, resolution: int = 400) -> OracleResult:
    """``max ||F^T f||_Y`` over a grid of ``f`` on the unit sphere of X*.

    The grid directions are rescaled onto the X* sphere.

    Each grid point is a feasible functional, so the value never exceeds
    the injective norm.
    """
    _check_dims(F)
    if resolution < 1:
        raise ValueError("resolution must be positive")
    q = dual_exponent(F.x_space.p)
    D = _direction_grid(F.x_space.dim, resolution)
    f = D / _norms(D, q)[:, None]
    vals = _norms(f @ F.entries, F.y_space.p)
    k = int(np.argmax(vals))
    return OracleResult(float(vals[k]), Certainty.GRID_LOWER, resolution=resolution, witness=f[k])


# -- projective: sampled feasible decompositions --------------------------------


def _costs(Xs: np.ndarray, Ys: np.ndarray, X: LpSpace, Y: LpSpace) -> np.ndarray:
    """Costs of a batch of decompositions; ``Xs`` is (batch, n, r), ``Ys`` (batch, r, m)."""
    return np.sum(_norms(Xs, X.p, axis=1) * _norms(Ys, Y.p, axis=2), axis=1)


def random_decomposition_search(F: Tensor, samples: int = 10_000, seed: int = 0) -> OracleResult:
    """Cheapest of ``samples`` random exact decompositions ``F = P Q``.

    Sample 0 is the singular value decomposition (from Jacobi rotations of
    the rows of ``F``); samples 1 and 2 are the row and column formulas.  The
    rest draw a random ``n x r`` matrix ``P`` of full row rank and set
    ``Q = P^+ F + (I - P^+ P) Z``, so that ``P Q = F`` exactly.  A quarter
    of the samples are global draws; the rest run a (1 + lambda) evolution
    strategy on ``(P, Z)`` from the cheapest pair found, growing the step
    after a success and shrinking it after a failure.
    """
    _check_dims(F)
    X, Y = F.x_space, F.y_space
    M = F.entries
    n, m = M.shape
    rng = np.random.default_rng([int(seed), 104729])
    best = math.inf
    best_pair = None

    def consider(P, Q):
        nonlocal best, best_pair
        if not np.allclose(P @ Q, M, rtol=0, atol=1e-12 * (1 + np.abs(M).max())):
            return
        c = float(_costs(P[None], Q[None], X, Y)[0])
        if c < best:
            best, best_pair = c, (P, Q)

    def _take_best(P, Z) -> bool:
        """Complete each ``P`` to an exact ``(P, Q)`` and keep the cheapest."""
        nonlocal best, best_pair
        Pp = np.linalg.pinv(P)
        Q = Pp @ M + Z - Pp @ (P @ Z)
        ok = np.all(np.abs(P @ Q - M) <= 1e-10 * (1 + np.abs(M).max()), axis=(1, 2))
        costs = np.where(ok, _costs(P, Q, X, Y), np.inf)
        k = int(np.argmin(costs))
        if costs[k] < best:
            best, best_pair = float(costs[k]), (P[k], Q[k])
            return True
        return False

    fixed = []
    _, U = _jacobi(M.T)  # rows of U^T M are orthogonal
    fixed.append((U, U.T @ M))
    fixed.append((np.eye(n), M.copy()))
    fixed.append((M.copy(), np.eye(m)))
    for P, Q in fixed[: max(samples, 0)]:
        consider(P, Q)

    remaining = max(samples - len(fixed), 0)
    r = n * m
    # phase 1: global draws with a random number of terms
    global_left = remaining // 4
    while global_left > 0:
        size = min(_BATCH, global_left)
        global_left -= size
        remaining -= size
        k = int(rng.integers(n, r + 1))
        P = rng.standard_normal((size, n, k))
        Z = rng.standard_normal((size, k, m)) * rng.uniform(0.0, 1.0, (size, 1, 1))
        _take_best(P, Z)
    # phase 2: (1 + lambda) evolution strategy around the incumbent, padded to n*m terms
    P0, Z0 = np.zeros((n, r)), np.zeros((r, m))
    P0[:, : best_pair[0].shape[1]] = best_pair[0]
    Z0[: best_pair[1].shape[0]] = best_pair[1]
    while remaining > 0:
        size = min(_ES_BATCH, remaining)
        remaining -= size
        scale = (np.abs(P0).max() + np.abs(Z0).max()) / 2 + 1e-12
        steps = scale * np.exp(rng.uniform(np.log(1e-7), 0.0, (size, 1, 1)))
        dP = rng.standard_normal((size, n, r))
        dZ = rng.standard_normal((size, r, m))
        # half the moves touch only a few coordinates, which suits the kinks of l_1 / l_inf costs
        sparse = size // 2
        keep = rng.random((sparse, n * r + r * m)) < 3.0 / (n * r + r * m)
        dP[:sparse] *= keep[:, : n * r].reshape(sparse, n, r)
        dZ[:sparse] *= keep[:, n * r :].reshape(sparse, r, m)
        if _take_best(P0 + steps * dP, Z0 + steps * dZ):
            P0, Z0 = best_pair
    return OracleResult(best, Certainty.SAMPLED_UPPER, samples=samples, witness=best_pair)


# -- closed forms --------------------------------------------------------------


def closed_form_injective(F: Tensor) -> OracleResult | None:
    """Exact injective norm where a textbook formula exists, else ``None``.

    l_2 (x) l_2 is the spectral norm; an l_inf factor on the left (right)
    makes it the largest Y-norm of a row (X-norm of a column).
    """
    X, Y = F.x_space, F.y_space
    M = F.entries
    if X.p == 2.0 and Y.p == 2.0:
        return OracleResult(svd_spectral(M), Certainty.EXACT)
    if X.p is INF:
        return OracleResult(float(_norms(M, Y.p, axis=1).max()), Certainty.EXACT)
    if Y.p is INF:
        return OracleResult(float(_norms(M, X.p, axis=0).max()), Certainty.EXACT)
    return None


def closed_form_projective(F: Tensor) -> OracleResult | None:
    """Exact projective norm for l_2 (x) l_2 (nuclear) or an l_1 factor."""
    X, Y = F.x_space, F.y_space
    M = F.entries
    if X.p == 2.0 and Y.p == 2.0:
        return OracleResult(svd_nuclear(M), Certainty.EXACT)
    if X.p == 1.0:
        return OracleResult(float(_norms(M, Y.p, axis=1).sum()), Certainty.EXACT)
    if Y.p == 1.0:
        return OracleResult(float(_norms(M, X.p, axis=0).sum()), Certainty.EXACT)
    return None
