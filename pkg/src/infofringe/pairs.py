from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import DomainError

SUM_TOL = 1e-12


@dataclass(frozen=True)
class ProbabilityPair:
    """Normalized distribution over the two detector outcomes."""

    p1: float
    p2: float

    def __post_init__(self):
        p1, p2 = float(self.p1), float(self.p2)
        if not (0.0 <= p1 <= 1.0 and 0.0 <= p2 <= 1.0):
            raise DomainError(f"probabilities must lie in [0, 1], got ({p1}, {p2})")
        if abs(p1 + p2 - 1.0) > SUM_TOL:
            raise DomainError(f"probabilities must sum to 1, got {p1 + p2!r}")
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "p2", p2)

    @classmethod
    def from_p1(cls, p1: float) -> "ProbabilityPair":
        return cls(p1, 1.0 - p1)

    def swapped(self) -> "ProbabilityPair":
        return ProbabilityPair(self.p2, self.p1)

    def __iter__(self):
        yield self.p1
        yield self.p2

    def isclose(self, other, tol: float = 1e-12) -> bool:
        q1, q2 = other
        return math.isclose(self.p1, q1, abs_tol=tol) and math.isclose(self.p2, q2, abs_tol=tol)
