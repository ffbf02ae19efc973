"""Exception types shared across the package."""


class GraphFormatError(ValueError):
    """Malformed graph input (bad JSON, bad length string, unknown vertex)."""


class ValenceError(ValueError):
    """Graph violates the model constraints (valence-1 vertex, circle, disconnected)."""


class InsufficientDepth(ValueError):
    """A truncated end is too short to resolve the requested quantity."""


class NotHyperbolic(ValueError):
    pass


class EndOnAxis(ValueError):
    pass


class SharedAxisEnd(ValueError):
    pass


class DegenerateQuadruple(ValueError):
    pass


class EmptyInput(ValueError):
    pass


class BallTooLarge(RuntimeError):
    pass


class SubcriticalS(ValueError):
    pass


class DepthTooShallow(ValueError):
    pass


class OverlappingCylinders(ValueError):
    pass


class InvalidFundDomain(ValueError):
    pass


class NonInvariantH(ValueError):
    pass


class NotCommuting(ValueError):
    pass


class NotMeasurePreserving(ValueError):
    pass
