"""
Norm values with certified bound directions.

Every computed norm carries a :class:`Direction`.  Supremum searches can only
certify lower bounds and infimum searches only upper bounds; an optional
``lower``/``upper`` pair records any extra certified bracket (for instance a
dual certificate attached to a primal upper bound).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Any

__all__ = ["Direction", "NormEstimate", "Budget", "product", "reciprocal", "exact"]


class Direction(str, enum.Enum):
    EXACT = "Exact"
    LOWER = "LowerBound"
    UPPER = "UpperBound"
    HEURISTIC = "Heuristic"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Budget:
    """Search budget for multi-start ascent and representation search.

    Restart ``r`` draws its start from a generator keyed by ``(seed, r)`` so
    that adding restarts never changes the earlier ones.
    """

    restarts: int = 32
    max_iters: int = 200
    seed: int = 0
    step: float = 0.5
    decay: float = 0.9
    enum_cap: int = 12
    polish_iters: int = 100

    def __post_init__(self):
        if self.restarts < 0 or self.max_iters < 0:
            raise ValueError("budget counts must be nonnegative")

    def with_seed(self, seed: int) -> "Budget":
        return replace(self, seed=int(seed))

    def scaled(self, restarts: int | None = None, max_iters: int | None = None) -> "Budget":
        return replace(
            self,
            restarts=self.restarts if restarts is None else restarts,
            max_iters=self.max_iters if max_iters is None else max_iters,
        )


@dataclass(frozen=True, eq=False)
class NormEstimate:
    value: float
    direction: Direction
    witness: Any = None
    method: str = ""
    restarts: int = 0
    seed: int | None = None
    lower: float | None = None
    upper: float | None = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "direction", Direction(self.direction))

    @property
    def lo(self) -> float:
        """Largest certified lower bound on the true value."""
        d = self.direction
        if d is Direction.EXACT or d is Direction.LOWER:
            base = self.value
        else:
            base = 0.0
        if self.lower is not None:
            base = max(base, self.lower)
        return base

    @property
    def hi(self) -> float:
        """Smallest certified upper bound on the true value (may be ``inf``)."""
        d = self.direction
        if d is Direction.EXACT or d is Direction.UPPER:
            base = self.value
        else:
            base = math.inf
        if self.upper is not None:
            base = min(base, self.upper)
        return base

    @property
    def certified(self) -> bool:
        return self.direction is not Direction.HEURISTIC

    def to_dict(self) -> dict:
        hi = self.hi
        return {
            "value": self.value,
            "direction": self.direction.value,
            "lo": self.lo,
            "hi": None if math.isinf(hi) else hi,
            "method": self.method,
            "restarts": self.restarts,
            "seed": self.seed,
        }


def exact(value: float, method: str, witness: Any = None) -> NormEstimate:
    return NormEstimate(value, Direction.EXACT, witness=witness, method=method)


def _compose_direction(a: Direction, b: Direction) -> Direction:
    if a is Direction.EXACT:
        return b
    if b is Direction.EXACT:
        return a
    if a is b:
        return a
    return Direction.HEURISTIC


def product(a: NormEstimate, b: NormEstimate, method: str | None = None) -> NormEstimate:
    """Product of two nonnegative estimates with the induced bracket."""
    direction = _compose_direction(a.direction, b.direction)
    lo = a.lo * b.lo
    hi = a.hi * b.hi if not (math.isinf(a.hi) or math.isinf(b.hi)) else math.inf
    if a.hi == 0.0 or b.hi == 0.0:
        hi = 0.0
    return NormEstimate(
        a.value * b.value,
        direction,
        method=method or f"({a.method})*({b.method})",
        lower=lo if lo > 0 else None,
        upper=None if math.isinf(hi) else hi,
    )


def reciprocal(a: NormEstimate, method: str | None = None) -> NormEstimate:
    """``1 / a`` for a positive estimate; flips Lower and Upper."""
    if a.value <= 0.0:
        raise ValueError("reciprocal of a nonpositive estimate")
    flip = {
        Direction.EXACT: Direction.EXACT,
        Direction.LOWER: Direction.UPPER,
        Direction.UPPER: Direction.LOWER,
        Direction.HEURISTIC: Direction.HEURISTIC,
    }[a.direction]
    lo = 1.0 / a.hi if a.hi > 0 and not math.isinf(a.hi) else None
    hi = 1.0 / a.lo if a.lo > 0 else None
    return NormEstimate(
        1.0 / a.value,
        flip,
        witness=a.witness,
        method=method or f"1/({a.method})",
        restarts=a.restarts,
        seed=a.seed,
        lower=lo,
        upper=hi,
    )
