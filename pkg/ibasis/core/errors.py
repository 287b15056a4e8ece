"""Exception hierarchy. `exit_code` is what the CLI returns for an uncaught error of that class."""


class IBasisError(Exception):
    exit_code = 1


# -----------------------------------------------------------
# MATHEMATICAL REJECTION (exit 2)
# -----------------------------------------------------------
class MathematicalRejection(IBasisError):
    exit_code = 2


class IrregularSingularity(MathematicalRejection):
    def __init__(self, point: str):
        super().__init__(f"irregular singular point at {point}")
        self.point = point


class UnsupportedExponent(MathematicalRejection):
    pass


class NotAnOperator(MathematicalRejection):
    pass


# -----------------------------------------------------------
# RESOURCE CAPS (exit 3)
# -----------------------------------------------------------
class ResourceCap(IBasisError):
    exit_code = 3


class CannotBoundWronskian(ResourceCap):
    def __init__(self, point: str, terms: int):
        super().__init__(f"wronskian valuation at {point} not visible within {terms} terms")
        self.point = point
        self.terms = terms


class DegreeCap(ResourceCap):
    def __init__(self, what: str, degree: int, cap: int):
        super().__init__(f"{what} needs degree {degree}, above the cap {cap}")
        self.degree = degree
        self.cap = cap


# -----------------------------------------------------------
# USAGE / INPUT
# -----------------------------------------------------------
class UsageError(IBasisError):
    pass


class InvalidPolicy(IBasisError):
    pass


class OperatorSyntaxError(IBasisError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


# -----------------------------------------------------------
# ALGEBRA
# -----------------------------------------------------------
class ZeroPolynomial(IBasisError, ValueError):
    pass


class DivisionByZero(IBasisError, ZeroDivisionError):
    pass


class ShapeMismatch(IBasisError, ValueError):
    pass


class ZeroOperator(IBasisError, ValueError):
    pass


class PointMismatch(IBasisError, ValueError):
    pass


class TruncationTooShort(IBasisError):
    pass


class NotABasis(IBasisError, ValueError):
    pass


class BadDenominatorShape(IBasisError, ValueError):
    pass


class ReductionObstruction(IBasisError):
    """The mod-v system of a Hermite step has no solution. `partial` holds (g, h) so far."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class InvariantViolation(IBasisError, AssertionError):
    pass
