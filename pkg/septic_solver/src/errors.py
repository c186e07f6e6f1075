"""
Exception hierarchy for the septic collocation solver.

Everything derives from ValueError so callers that only know about
invalid-input errors still catch them.
"""

from typing import Iterable, Optional


class SepticSolverError(ValueError):
    """Base class for every error raised by the solver."""


# --- Grid and basis ---

class InvalidGridError(SepticSolverError):
    pass


class KnotRangeError(SepticSolverError, IndexError):
    """A basis index needs knots outside the grid's stored range."""


class InvalidDerivativeOrderError(SepticSolverError):
    pass


# --- Expressions ---

class ExpressionError(SepticSolverError):
    pass


class ExpressionSyntaxError(ExpressionError):
    """Parse failure at a byte offset of the source text."""

    def __init__(self, message: str, offset: int, expected: Iterable[str] = ()):
        self.offset = offset
        self.expected = tuple(sorted(set(expected)))
        detail = f"{message} at byte {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class UnknownIdentifierError(ExpressionError):
    def __init__(self, name: str, offset: int, functions: Iterable[str]):
        self.name = name
        self.offset = offset
        self.functions = tuple(functions)
        super().__init__(
            f"unknown identifier '{name}' at byte {offset}; "
            f"the variable is 'x' and valid functions are: {', '.join(self.functions)}"
        )


class ExpressionDomainError(ExpressionError):
    """Evaluation left the real domain (division by zero, log of x <= 0, ...)."""

    def __init__(self, message: str, x: Optional[float] = None):
        self.x = x
        super().__init__(message if x is None else f"{message} at x={x!r}")


# --- Problems ---

class ProblemDefinitionError(SepticSolverError):
    pass


class InconsistentProblemError(ProblemDefinitionError):
    """The exact solution disagrees with a boundary value or the ODE."""

    def __init__(self, message: str, condition: Optional[int] = None):
        self.condition = condition
        super().__init__(message)


class ProblemFileError(ProblemDefinitionError):
    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        super().__init__(message if field is None else f"field '{field}': {message}")


class MissingExactSolutionError(ProblemDefinitionError):
    pass


class UnknownProblemError(ProblemDefinitionError):
    pass


# --- Linear algebra ---

class AssemblyError(SepticSolverError):
    pass


class BandStructureError(SepticSolverError):
    pass


class SingularMatrixError(SepticSolverError):
    def __init__(self, message: str, pivot_index: Optional[int] = None):
        self.pivot_index = pivot_index
        super().__init__(message)


class RankDeficientError(SepticSolverError):
    def __init__(self, message: str, column: Optional[int] = None):
        self.column = column
        super().__init__(message)


# --- Analysis and configuration ---

class OutOfDomainError(SepticSolverError):
    pass


class ConvergenceError(SepticSolverError):
    def __init__(self, message: str, n: int):
        self.n = n
        super().__init__(f"n={n}: {message}")


class ConfigError(SepticSolverError):
    pass
