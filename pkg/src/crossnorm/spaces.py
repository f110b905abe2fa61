"""
Finite-dimensional real l_p spaces.

An :class:`LpSpace` is a pair ``(dim, p)`` with ``p`` in ``[1, inf]``.  The
value ``p = inf`` is the distinguished tag :data:`INF`, never a float, so that
``dual_exponent`` cannot silently produce ``nan`` or ``1.0000000002``.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .exceptions import BudgetError, CapabilityError, DimensionError

__all__ = [
    "INF",
    "Exponent",
    "LpSpace",
    "Functional",
    "parse_exponent",
    "dual_exponent",
    "vector_norm",
    "dual_norm",
    "norming_functional",
    "unit_ball_extreme_points",
    "sample_unit_sphere",
    "make_rng",
    "DEFAULT_ENUM_CAP",
]

DEFAULT_ENUM_CAP = 12


class _Infinity(enum.Enum):
    INF = "inf"

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"


INF = _Infinity.INF
Exponent = Union[float, _Infinity]


def parse_exponent(p) -> Exponent:
    """Normalize ``p`` to a float in ``[1, inf)`` or the :data:`INF` tag.

    Accepts numbers, ``math.inf``, ``INF`` and the strings ``"inf"``,
    ``"infinity"`` (any case).
    """
    if p is INF:
        return INF
    if isinstance(p, str):
        token = p.strip().lower()
        if token in ("inf", "infinity", "oo", "∞"):
            return INF
        p = float(token)
    p = float(p)
    if math.isinf(p) and p > 0:
        return INF
    if not p >= 1.0:
        raise ValueError(f"exponent must lie in [1, inf], got {p!r}")
    return p


def dual_exponent(p) -> Exponent:
    """Conjugate exponent ``q`` with ``1/p + 1/q = 1`` (``1 <-> inf``)."""
    p = parse_exponent(p)
    if p is INF:
        return 1.0
    if p == 1.0:
        return INF
    if p == 2.0:
        return 2.0
    return p / (p - 1.0)


def exponent_label(p) -> str:
    p = parse_exponent(p)
    if p is INF:
        return "inf"
    return f"{p:g}"


@dataclass(frozen=True)
class LpSpace:
    """The space R^dim equipped with the l_p norm."""

    dim: int
    p: Exponent = 2.0

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "p", parse_exponent(self.p))

    @property
    def dual(self) -> "LpSpace":
        return LpSpace(self.dim, dual_exponent(self.p))

    @property
    def is_hilbert(self) -> bool:
        return self.p == 2.0

    @property
    def is_polyhedral(self) -> bool:
        """True when the unit ball is a polytope (p = 1 or p = inf)."""
        return self.p is INF or self.p == 1.0

    def norm(self, v) -> float:
        return vector_norm(v, self)

    def __str__(self) -> str:
        return f"l{exponent_label(self.p)}^{self.dim}"


@dataclass(frozen=True, eq=False)
class Functional:
    """A linear functional on ``space``, stored by its coefficient vector."""

    coefficients: np.ndarray
    space: LpSpace

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if c.ndim != 1 or c.shape[0] != self.space.dim:
            raise DimensionError(
                f"functional has {c.size} coefficients, space {self.space} has dim {self.space.dim}"
            )
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    def __call__(self, x) -> float:
        x = _as_vector(x, self.space.dim)
        return float(self.coefficients @ x)


def _as_vector(v, dim: int | None = None) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise DimensionError(f"expected a vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionError(f"vector of length {v.shape[0]} in a space of dim {dim}")
    return v


def _lp_norm(v: np.ndarray, p: Exponent) -> float:
    if v.size == 0:
        return 0.0
    if p is INF:
        return float(np.max(np.abs(v)))
    if p == 1.0:
        return float(np.sum(np.abs(v)))
    if p == 2.0:
        return float(np.linalg.norm(v))
    a = np.abs(v)
    m = a.max()
    if m == 0.0:
        return 0.0
    return float(m * np.sum((a / m) ** p) ** (1.0 / p))


def vector_norm(v, s: LpSpace) -> float:
    """l_p norm of ``v`` in the space ``s``."""
    return _lp_norm(_as_vector(v, s.dim), s.p)


def dual_norm(f: Functional) -> float:
    """Norm of ``f`` in the dual space, i.e. the l_{p'} norm of its coefficients."""
    return _lp_norm(f.coefficients, dual_exponent(f.space.p))


def norming_functional(y, p) -> np.ndarray:
    """Return ``w`` with ``||w||_{p'} <= 1`` and ``w @ y == ||y||_p``.

    This is also a subgradient of the l_p norm at ``y`` (with the convention
    ``sign(0) = 0``; for ``p = inf`` the first maximizing index is used).
    The zero vector maps to the zero vector.
    """
    y = np.asarray(y, dtype=float)
    p = parse_exponent(p)
    w = np.zeros_like(y)
    if not np.any(y):
        return w
    if p is INF:
        k = int(np.argmax(np.abs(y)))
        w[k] = np.sign(y[k])
        return w
    if p == 1.0:
        return np.sign(y)
    a = np.abs(y)
    m = a.max()
    r = a / m
    # w_i = sign(y_i) (|y_i| / ||y||_p)^(p-1), computed on the rescaled vector
    w = np.sign(y) * (r / _lp_norm(r, p)) ** (p - 1.0)
    return w


def unit_ball_extreme_points(s: LpSpace, cap: int = DEFAULT_ENUM_CAP) -> np.ndarray:
    """Extreme points of the closed unit ball of ``s``, one per row.

    Only polyhedral balls have a finite extreme set: ``p = 1`` gives the
    ``2 dim`` signed basis vectors and ``p = inf`` the ``2**dim`` sign vectors,
    the latter limited to ``dim <= cap``.
    """
    if s.p == 1.0:
        eye = np.eye(s.dim)
        return np.concatenate([eye, -eye])
    if s.p is INF:
        if s.dim > cap:
            raise BudgetError(f"2**{s.dim} sign vectors exceed the enumeration cap 2**{cap}")
        return np.array(list(itertools.product((1.0, -1.0), repeat=s.dim)))
    raise CapabilityError(f"the unit ball of {s} has no finite set of extreme points")


def make_rng(seed, *stream) -> np.random.Generator:
    """Generator derived deterministically from ``seed`` and a stream key."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng([int(seed), *(int(k) for k in stream)])


def sample_unit_sphere(s: LpSpace, seed=0) -> np.ndarray:
    """Gaussian direction normalized to unit norm in ``s``."""
    rng = make_rng(seed)
    while True:
        v = rng.standard_normal(s.dim)
        n = vector_norm(v, s)
        if n > 0.0:
            return v / n
