"""Exception types shared across the package."""


class FFDynError(Exception):
    """Base class for all errors raised by ffdyn."""


class ZeroInput(FFDynError, ValueError):
    """The valuation of the zero function was requested (it is infinite)."""


class NotSplit(FFDynError):
    """A polynomial does not split into linear factors over Q."""

    def __init__(self, cofactor_degree, places=()):
        self.cofactor_degree = cofactor_degree
        self.places = list(places)
        super().__init__(f"polynomial does not split over Q "
                         f"(cofactor degree {cofactor_degree})")


class AllZero(FFDynError, ValueError):
    """Every homogeneous coordinate is zero."""


class DimensionMismatch(FFDynError, ValueError):
    pass


class IndeterminacyHit(FFDynError):
    """The whole section lies inside the indeterminacy locus of the map.

    Raised by evaluation when every substituted coordinate form vanishes
    identically, i.e. the k(t)-point itself is a point of indeterminacy.
    """

    def __init__(self, step=None):
        self.step = step
        msg = "point lies in the indeterminacy locus"
        if step is not None:
            msg += f" at step {step}"
        super().__init__(msg)


class ResourceLimit(FFDynError):
    """A degree, height or bit-size budget was exceeded.

    ``partial`` carries whatever was computed before the budget ran out.
    """

    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)


class TooShort(FFDynError, ValueError):
    pass


class TooFewPoints(FFDynError, ValueError):
    pass


class SamplingExhausted(FFDynError):
    pass


class DSLError(FFDynError, ValueError):
    """Base class for input-language errors."""


class DSLSyntaxError(DSLError):
    def __init__(self, message, position=None, expected=()):
        self.position = position
        self.expected = tuple(expected)
        text = message
        if position is not None:
            text += f" at position {position}"
        if expected:
            text += f" (expected {', '.join(self.expected)})"
        super().__init__(text)


class NotHomogeneous(DSLError):
    pass


class MixedDegrees(DSLError):
    pass


class UnsupportedExtension(DSLError):
    """The input needs a proper finite extension of Q(t)."""
