"""Exception hierarchy shared by all modules."""


class SiegelLabError(Exception):
    pass


class ConfigError(SiegelLabError, ValueError):
    pass


# cfrac
class NotIrrationalAtPrecision(SiegelLabError, ValueError):
    pass


class DepthExceeded(SiegelLabError, IndexError):
    pass


# circlegeo
class DegenerateArc(SiegelLabError, ValueError):
    pass


class NotProperlyContained(SiegelLabError, ValueError):
    pass


class OnCircle(SiegelLabError, ValueError):
    pass


# hypgeo
class NonPositiveT(SiegelLabError, ValueError):
    pass


class NonPositiveModulus(SiegelLabError, ValueError):
    pass


class OutsideDisk(SiegelLabError, ValueError):
    pass


class CoincidentPoints(SiegelLabError, ValueError):
    pass


class OutsideDomain(SiegelLabError, ValueError):
    pass


class ArcTooLong(SiegelLabError, ValueError):
    pass


class EmptyInterior(SiegelLabError, ValueError):
    pass


# blaschke
class AtPole(SiegelLabError, ZeroDivisionError):
    pass


class NotHomeomorphism(SiegelLabError, ValueError):
    pass


class BisectionFailure(SiegelLabError, RuntimeError):
    pass


class NotMonotone(SiegelLabError, RuntimeError):
    pass


class NoBracket(SiegelLabError, RuntimeError):
    pass


class RootFindingFailure(SiegelLabError, RuntimeError):
    pass


# linearize
class NoConvergence(SiegelLabError, RuntimeError):
    pass


class OrderMismatch(SiegelLabError, RuntimeError):
    pass


class DisjointnessViolation(SiegelLabError, RuntimeError):
    pass


# siegel
class SmallDivisorUnderflow(SiegelLabError, ArithmeticError):
    pass


class UnstableEstimate(SiegelLabError, RuntimeError):
    pass


class RadiusTooLarge(SiegelLabError, ValueError):
    pass


class TooFewPoints(SiegelLabError, ValueError):
    pass
