"""Exception hierarchy shared by every layer of the package."""


class SyzError(Exception):
    """Base class for all library errors."""


class NotPrime(SyzError, ValueError):
    pass


class DivisionByZero(SyzError, ZeroDivisionError):
    pass


class CtxMismatch(SyzError, TypeError):
    """Operands live in different finite fields."""


class ZeroPolynomial(SyzError, ValueError):
    pass


class ShapeError(SyzError, ValueError):
    pass


class NoInterpolant(SyzError, ValueError):
    """No rational function inside the degree bounds fits the samples."""


class BadSamples(SyzError, ValueError):
    pass


class NotOnCurve(SyzError, ValueError):
    pass


class TooLarge(SyzError, ValueError):
    pass


class BadTorsionOrder(SyzError, ValueError):
    pass


class BadLambda(SyzError, ValueError):
    """lambda must avoid 0 and 1 (and lie in the prime field where required)."""


class DegenerateDivisionPoly(SyzError, ArithmeticError):
    """psi_n vanished identically; callers should fall back to interpolation."""


class ConstructionError(SyzError, RuntimeError):
    pass


class SplitAnomaly(SyzError, RuntimeError):
    """The destabilising sub-line-bundle system did not have a 1-dim solution space."""


class FlowDegenerate(SyzError, RuntimeError):
    pass


class StructureError(SyzError, ValueError):
    pass


class Inconclusive(SyzError, RuntimeError):
    pass


class BadInput(SyzError, ValueError):
    pass
