"""Shared containers and numeric helpers used across the package."""

from __future__ import annotations

import math
from dataclasses import dataclass

# Comparisons of integer-valued data against real thresholds of the form
# m*t snap to the nearest integer when within this slack, so thresholds
# that are integers in exact arithmetic stay integers in floating point.
INTEGER_SNAP_TOL = 1e-9


class SmallnessConditionWarning(UserWarning):
    """Inputs are outside the regime where the coverage theory applies.

    The interval is still computed, but the theoretical guarantees assume
    log(2/alpha)/n + eps_max below a small constant.
    """

    def __init__(self, message, value, threshold):
        super().__init__(message)
        self.value = value
        self.threshold = threshold


class SearchSizeWarning(UserWarning):
    """A combinatorial search hit a configured size cap."""


@dataclass(frozen=True)
class ConfidenceInterval:
    """Closed interval [lower, upper]; empty when lower > upper."""

    lower: float
    upper: float
    alpha: float
    method: str

    @property
    def is_empty(self) -> bool:
        return self.lower > self.upper

    @property
    def length(self) -> float:
        """|B| = U - L for nonempty intervals, 0 for empty ones."""
        return max(self.upper - self.lower, 0.0)

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper


def floor_int(x: float) -> int:
    """floor(x) with a snap so values an ulp below an integer round up."""
    return math.floor(x + INTEGER_SNAP_TOL)


def ceil_int(x: float) -> int:
    """ceil(x) with a snap so values an ulp above an integer round down."""
    return math.ceil(x - INTEGER_SNAP_TOL)
