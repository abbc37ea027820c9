from enum import Enum

class ShapeKind(Enum):
    """Indicator shape enumerator."""

    BALL = "ball"
    ANNULUS = "annulus"
    SECTOR = "sector"
    TUBE = "tube"
