from enum import Enum

class Membership(Enum):
    """Position of an exponent pair relative to the boundedness pentagon."""

    INTERIOR = "interior"
    BOUNDARY_INCLUDED = "boundary_included"
    BOUNDARY_EXCLUDED = "boundary_excluded"
    OUTSIDE = "outside"

    @property
    def is_member(self) -> bool:
        return self in (Membership.INTERIOR, Membership.BOUNDARY_INCLUDED)
