"""Exception hierarchy shared by all modules."""


class BeltramiError(Exception):
    """Base class for library errors."""


class SingularPoint(BeltramiError, ValueError):
    """A point lies inside a chart's excluded set."""


class UnsupportedChart(BeltramiError, ValueError):
    pass


class HypothesisViolated(BeltramiError, ValueError):
    """Coordinate data fails a metric hypothesis required by a construction."""


class ScaleFactorMismatch(BeltramiError, ValueError):
    pass


class NegativeRadicand(BeltramiError, ValueError):
    pass


class NonOrthogonal(BeltramiError, ValueError):
    pass


class DegeneratePressure(BeltramiError, ValueError):
    """The pressure gradient vanishes on the domain."""


class ConstantViolation(BeltramiError, ValueError):
    """The Bernoulli constant does not exceed the pressure with margin."""


class DegenerateField(BeltramiError, ValueError):
    pass


class DegeneratePair(BeltramiError, ValueError):
    pass


class StencilEscape(BeltramiError, ValueError):
    def __init__(self, msg, point=None):
        super().__init__(msg)
        self.point = point


class CriticalPoint(BeltramiError, ValueError):
    pass


class EscapedDomain(BeltramiError, ValueError):
    pass


class BoundsOutsideDomain(BeltramiError, ValueError):
    pass


class ParamOutOfRange(BeltramiError, ValueError):
    pass
