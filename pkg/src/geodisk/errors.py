"""Exception hierarchy for geodisk."""


class GeodiskError(ValueError):
    """Base class for all input and geometry errors raised by geodisk."""


class PolygonError(GeodiskError):
    def __init__(self, message, ring=None):
        if ring is not None:
            message = f"ring {ring}: {message}"
        super().__init__(message)
        self.ring = ring


class SelfIntersection(PolygonError):
    pass


class HoleOutsideOuter(PolygonError):
    pass


class HolesOverlap(PolygonError):
    pass


class DegenerateRing(PolygonError):
    pass


class PointOutsidePolygon(GeodiskError):
    pass


class EmptySet(GeodiskError):
    pass


class NonPositiveRadius(GeodiskError):
    pass


class PolygonHasHoles(GeodiskError):
    pass


class EmptyPolygon(GeodiskError):
    pass


class InvalidK(GeodiskError):
    pass


class TooManyCandidates(GeodiskError):
    pass


class TooManyEdges(GeodiskError):
    pass


class VerticesNotCovered(GeodiskError):
    pass


class DisconnectedSample(GeodiskError):
    pass


class InvariantViolation(AssertionError):
    """An internal geometric invariant failed; indicates a bug, not bad input."""


class InputError(GeodiskError):
    """Malformed input file or argument; ``field`` names the offending entry."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
