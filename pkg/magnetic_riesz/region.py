"""Exponent pairs (1/p, 1/q) and the boundedness pentagon of the Bochner-Riesz means."""
from dataclasses import dataclass
from typing import Dict

from .exceptions import InvalidInputError
from .membership import Membership

EPS = 1e-12


@dataclass(frozen=True)
class RegionPoint:
    """A point (1/p, 1/q) of the unit square."""

    inv_p: float
    inv_q: float

    def __post_init__(self):
        for name in ("inv_p", "inv_q"):
            value = float(getattr(self, name))
            if not 0.0 <= value <= 1.0:
                raise InvalidInputError(f"{name} must lie in [0, 1], got {value}")
            object.__setattr__(self, name, value)

    @classmethod
    def from_exponents(cls, p: float, q: float) -> "RegionPoint":
        return cls(1.0 / p, 1.0 / q)

    @property
    def p(self) -> float:
        return float("inf") if self.inv_p == 0 else 1.0 / self.inv_p

    @property
    def q(self) -> float:
        return float("inf") if self.inv_q == 0 else 1.0 / self.inv_q

    @property
    def gap(self) -> float:
        return self.inv_p - self.inv_q

    def as_tuple(self):
        return (self.inv_p, self.inv_q)


def _check_delta(delta: float) -> float:
    delta = float(delta)
    if not 0.0 < delta < 1.5:
        raise InvalidInputError(f"The region is defined for 0 < delta < 3/2, got {delta}")
    return delta


def to_positive_delta(delta_signed: float) -> float:
    """Convert the signed order used by the kernels to the order naming the pentagon."""
    if not -1.5 < delta_signed < 0.0:
        raise InvalidInputError(f"Signed orders lie in (-3/2, 0), got {delta_signed}")
    return -float(delta_signed)


def vertices(delta: float) -> Dict[str, RegionPoint]:
    """The named corners A, A', B, B', D of the pentagon."""
    delta = _check_delta(delta)
    low = 0.25 + 0.5 * delta
    return {
        "A": RegionPoint(low, 0.0),
        "B": RegionPoint(low, 0.25 - delta / 6.0),
        "B'": RegionPoint(0.75 + delta / 6.0, 0.75 - 0.5 * delta),
        "A'": RegionPoint(1.0, 0.75 - 0.5 * delta),
        "D": RegionPoint(1.0, 0.0),
    }


def constraint_margins(delta: float, pt: RegionPoint):
    """Signed slack of the three defining inequalities (gap, lower 1/p, upper 1/q)."""
    delta = _check_delta(delta)
    gap = pt.inv_p - pt.inv_q - 2.0 * delta / 3.0
    left = pt.inv_p - (0.25 + 0.5 * delta)
    top = (0.75 - 0.5 * delta) - pt.inv_q
    return gap, left, top


def region_membership(delta: float, pt: RegionPoint) -> Membership:
    """Classify pt against 1/p - 1/q >= 2 delta/3, 1/p > 1/4 + delta/2 and 1/q < 3/4 - delta/2."""
    gap, left, top = constraint_margins(delta, pt)
    if gap < -EPS or left < -EPS or top < -EPS:
        return Membership.OUTSIDE
    if abs(left) <= EPS or abs(top) <= EPS:
        # the segments AB and A'B' are not part of the region
        return Membership.BOUNDARY_EXCLUDED
    if abs(gap) <= EPS:
        return Membership.BOUNDARY_INCLUDED
    return Membership.INTERIOR
