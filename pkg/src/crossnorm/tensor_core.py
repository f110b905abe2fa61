"""
Elements of X (x) Y and of B[X,V] (x) B[Y,W].

A tensor F = sum_i x_i (x) y_i is stored as the n x m matrix sum_i x_i y_i^T,
which is independent of the chosen representation.  An operator tensor
L = sum_j A_j (x) B_j acts on it by F -> sum_j A_j F B_j^T.  No Kronecker
matrix is formed here; that flattening lives in :mod:`crossnorm.oracle` only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import DimensionError
from .spaces import LpSpace, vector_norm

__all__ = [
    "Tensor",
    "Decomposition",
    "OperatorTensor",
    "OperatorFunctionalTensor",
    "single_tensor",
    "assemble",
    "apply",
    "apply_adjoint",
    "pair",
    "compose",
]


def _frozen(a, ndim: int, what: str) -> np.ndarray:
    a = np.array(a, dtype=float)
    if a.ndim != ndim:
        raise DimensionError(f"{what} must have {ndim} dimensions, got shape {a.shape}")
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Tensor:
    """An element of ``x_space (x) y_space`` held as its coefficient matrix."""

    entries: np.ndarray
    x_space: LpSpace
    y_space: LpSpace

    def __post_init__(self):
        e = _frozen(self.entries, 2, "tensor entries")
        if e.shape != (self.x_space.dim, self.y_space.dim):
            raise DimensionError(
                f"entries of shape {e.shape} do not match {self.x_space} (x) {self.y_space}"
            )
        object.__setattr__(self, "entries", e)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def is_zero(self) -> bool:
        return not np.any(self.entries)

    def with_entries(self, entries) -> "Tensor":
        return Tensor(entries, self.x_space, self.y_space)

    def _check_same(self, other: "Tensor"):
        if (self.x_space, self.y_space) != (other.x_space, other.y_space):
            raise DimensionError("tensors live in different tensor product spaces")

    def __add__(self, other: "Tensor") -> "Tensor":
        self._check_same(other)
        return self.with_entries(self.entries + other.entries)

    def __sub__(self, other: "Tensor") -> "Tensor":
        self._check_same(other)
        return self.with_entries(self.entries - other.entries)

    def __mul__(self, c: float) -> "Tensor":
        return self.with_entries(float(c) * self.entries)

    __rmul__ = __mul__

    def __neg__(self) -> "Tensor":
        return self.with_entries(-self.entries)


@dataclass(frozen=True, eq=False)
class Decomposition:
    """A finite representation ``sum_i x_i (x) y_i``."""

    terms: tuple

    def __init__(self, terms: Sequence = ()):
        frozen = tuple(
            (_frozen(x, 1, "decomposition x"), _frozen(y, 1, "decomposition y")) for x, y in terms
        )
        object.__setattr__(self, "terms", frozen)

    def __len__(self) -> int:
        return len(self.terms)

    def cost(self, x_space: LpSpace, y_space: LpSpace) -> float:
        """The sum of ``||x_i|| ||y_i||``; an upper bound on the projective norm."""
        return float(sum(vector_norm(x, x_space) * vector_norm(y, y_space) for x, y in self.terms))

    def matrix(self, n: int, m: int) -> np.ndarray:
        out = np.zeros((n, m))
        for x, y in self.terms:
            if x.shape[0] != n or y.shape[0] != m:
                raise DimensionError(f"term of shape ({x.shape[0]}, {y.shape[0]}) in a {n}x{m} decomposition")
            out += np.outer(x, y)
        return out


def single_tensor(x, y, x_space: LpSpace, y_space: LpSpace) -> Tensor:
    """The elementary tensor x (x) y, i.e. the outer product x y^T."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (x_space.dim,) or y.shape != (y_space.dim,):
        raise DimensionError(f"vectors of length {x.size}, {y.size} for {x_space} (x) {y_space}")
    return Tensor(np.outer(x, y), x_space, y_space)


def assemble(d: Decomposition, x_space: LpSpace, y_space: LpSpace) -> Tensor:
    return Tensor(d.matrix(x_space.dim, y_space.dim), x_space, y_space)


@dataclass(frozen=True, eq=False)
class OperatorTensor:
    """``L = sum_j A_j (x) B_j`` with ``A_j: X -> V`` and ``B_j: Y -> W``."""

    terms: tuple
    X: LpSpace
    Y: LpSpace
    V: LpSpace
    W: LpSpace

    def __init__(self, terms: Sequence, X: LpSpace, Y: LpSpace, V: LpSpace | None = None, W: LpSpace | None = None):
        V = X if V is None else V
        W = Y if W is None else W
        frozen = []
        for A, B in terms:
            A = _frozen(A, 2, "operator A")
            B = _frozen(B, 2, "operator B")
            if A.shape != (V.dim, X.dim):
                raise DimensionError(f"A has shape {A.shape}, expected {(V.dim, X.dim)}")
            if B.shape != (W.dim, Y.dim):
                raise DimensionError(f"B has shape {B.shape}, expected {(W.dim, Y.dim)}")
            frozen.append((A, B))
        object.__setattr__(self, "terms", tuple(frozen))
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "W", W)

    @classmethod
    def single(cls, A, B, X: LpSpace, Y: LpSpace, V: LpSpace | None = None, W: LpSpace | None = None):
        return cls([(A, B)], X, Y, V, W)

    @classmethod
    def identity(cls, X: LpSpace, Y: LpSpace):
        return cls([(np.eye(X.dim), np.eye(Y.dim))], X, Y)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def spaces(self) -> tuple[LpSpace, LpSpace, LpSpace, LpSpace]:
        return self.X, self.Y, self.V, self.W

    def with_terms(self, terms) -> "OperatorTensor":
        return OperatorTensor(terms, self.X, self.Y, self.V, self.W)

    def __add__(self, other: "OperatorTensor") -> "OperatorTensor":
        if self.spaces != other.spaces:
            raise DimensionError("operator tensors act between different spaces")
        return self.with_terms(self.terms + other.terms)

    def __mul__(self, c: float) -> "OperatorTensor":
        return self.with_terms([(float(c) * A, B) for A, B in self.terms])

    __rmul__ = __mul__

    def __neg__(self) -> "OperatorTensor":
        return self * -1.0

    def __call__(self, F: Tensor) -> Tensor:
        return apply(self, F)

    def matrix_apply(self, F: np.ndarray) -> np.ndarray:
        """Raw action on a coefficient matrix, without space bookkeeping."""
        out = np.zeros((self.V.dim, self.W.dim))
        for A, B in self.terms:
            out += A @ F @ B.T
        return out

    def matrix_adjoint(self, G: np.ndarray) -> np.ndarray:
        """Adjoint action ``G -> sum_j A_j^T G B_j`` under the trace pairing."""
        out = np.zeros((self.X.dim, self.Y.dim))
        for A, B in self.terms:
            out += A.T @ G @ B
        return out

    def rearrangement(self) -> np.ndarray:
        """The matrix ``sum_j vec(A_j) vec(B_j)^T`` (row-major vec).

        Two representations define the same operator tensor exactly when
        their rearrangements agree.
        """
        R = np.zeros((self.V.dim * self.X.dim, self.W.dim * self.Y.dim))
        for A, B in self.terms:
            R += np.outer(A.ravel(), B.ravel())
        return R


def apply(L: OperatorTensor, F: Tensor) -> Tensor:
    """(sum_j A_j (x) B_j)(F) = sum_j A_j F B_j^T over ``(V, W)``."""
    if (F.x_space, F.y_space) != (L.X, L.Y):
        raise DimensionError(f"tensor over {F.x_space} (x) {F.y_space}, operator expects {L.X} (x) {L.Y}")
    return Tensor(L.matrix_apply(F.entries), L.V, L.W)


def apply_adjoint(L: OperatorTensor, G: np.ndarray) -> np.ndarray:
    G = np.asarray(G, dtype=float)
    if G.shape != (L.V.dim, L.W.dim):
        raise DimensionError(f"adjoint input of shape {G.shape}, expected {(L.V.dim, L.W.dim)}")
    return L.matrix_adjoint(G)


def compose(L: OperatorTensor, M: OperatorTensor) -> OperatorTensor:
    """``L o M`` by termwise products ``(A_j A'_k) (x) (B_j B'_k)``."""
    if (M.V, M.W) != (L.X, L.Y):
        raise DimensionError("codomain of the inner operator tensor is not the domain of the outer one")
    terms = [(A @ A2, B @ B2) for A, B in L.terms for A2, B2 in M.terms]
    return OperatorTensor(terms, M.X, M.Y, L.V, L.W)


@dataclass(frozen=True, eq=False)
class OperatorFunctionalTensor:
    """``k = sum_k phi_k (x) eta_k`` acting on operator tensors.

    ``phi`` pairs with ``A`` by the trace pairing ``sum_{r,c} phi_rc A_rc``.
    """

    terms: tuple

    def __init__(self, terms: Sequence):
        frozen = []
        shapes = set()
        for phi, eta in terms:
            phi = _frozen(phi, 2, "phi")
            eta = _frozen(eta, 2, "eta")
            shapes.add((phi.shape, eta.shape))
            frozen.append((phi, eta))
        if len(shapes) > 1:
            raise DimensionError("functional terms of inconsistent shapes")
        object.__setattr__(self, "terms", tuple(frozen))

    def __len__(self) -> int:
        return len(self.terms)

    def __call__(self, L: OperatorTensor) -> float:
        return pair(self, L)


def pair(k: OperatorFunctionalTensor, L: OperatorTensor) -> float:
    """``k(L) = sum_{k,j} phi_k(A_j) eta_k(B_j)``."""
    total = 0.0
    for phi, eta in k.terms:
        for A, B in L.terms:
            if phi.shape != A.shape or eta.shape != B.shape:
                raise DimensionError(
                    f"pairing shapes {phi.shape}, {eta.shape} against operators {A.shape}, {B.shape}"
                )
            total += float(np.sum(phi * A)) * float(np.sum(eta * B))
    return total
