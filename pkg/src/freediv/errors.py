"""Exception types raised across the engine."""

from __future__ import annotations


class FreeDivError(Exception):
    """Base class for all engine errors."""


# polynomial layer
class ZeroPolynomial(FreeDivError, ValueError):
    pass


class NonSquare(FreeDivError, ValueError):
    pass


class NotSkewSymmetric(FreeDivError, ValueError):
    pass


class UnassignedVariable(FreeDivError, KeyError):
    pass


class IndexOutOfRange(FreeDivError, IndexError):
    pass


class NotExactDivision(FreeDivError, ArithmeticError):
    pass


# families / Lie algebras
class SizeTooSmall(FreeDivError, ValueError):
    pass


class UnknownFamily(FreeDivError, KeyError):
    pass


class NotClosedUnderBracket(FreeDivError):
    pass


# vector fields
class ShapeMismatch(FreeDivError, ValueError):
    pass


class ValueNotInSpace(FreeDivError, AssertionError):
    pass


class SpaceMismatch(FreeDivError, ValueError):
    pass


class ClosureFailure(FreeDivError):
    def __init__(self, pair, residual):
        super().__init__(f"bracket {pair[0]} , {pair[1]} not in module; residual {residual}")
        self.pair = pair
        self.residual = residual


# Saito matrices
class BlockViolation(FreeDivError):
    def __init__(self, row: int, col: int, entry):
        super().__init__(f"nonzero entry above the diagonal blocks at ({row}, {col}): {entry}")
        self.row = row
        self.col = col
        self.entry = entry


class NotATower(FreeDivError, ValueError):
    pass


class NotLinearInY(FreeDivError, ValueError):
    pass


# numerical factorizations
class ExistenceConditionViolated(FreeDivError, ArithmeticError):
    def __init__(self, minor: str, value: complex | None = None):
        super().__init__(f"existence condition violated: {minor} vanishes (value {value})")
        self.minor = minor
        self.value = value


class ShapeError(FreeDivError, ValueError):
    pass


class NotSymmetric(FreeDivError, ValueError):
    pass


class NotSkew(FreeDivError, ValueError):
    pass
