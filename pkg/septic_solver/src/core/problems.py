"""
Problem constructors: the built-in example, manufactured polynomial
problems, and problem documents loaded from JSON.
"""

import json
import logging
import math
from pathlib import Path
from typing import Union

from numpy.polynomial import Polynomial

from ..errors import (
    ExpressionError,
    MissingExactSolutionError,
    ProblemDefinitionError,
    ProblemFileError,
    UnknownProblemError,
)
from ..models import BOUNDARY_CONDITIONS, LinearBvp7, ProblemDocument
from .expression import Expression, parse_expression

logger = logging.getLogger(__name__)

MAX_MANUFACTURED_DEGREE = 7


# --- example1: y^(7) = y - 7 e^x on [0, 1], y = (1 - x) e^x ---

def _one(x: float) -> float:
    return 1.0


def _example1_forcing(x: float) -> float:
    return -7.0 * math.exp(x)


def _example1_exact(x: float, k: int) -> float:
    # y^(k) = (1 - x - k) e^x
    return (1.0 - x - k) * math.exp(x)


def example1() -> LinearBvp7:
    """
    y^(7) = y - 7 e^x on [0, 1] with exact solution (1 - x) e^x.

    Boundary values are read off the exact solution:
    y(0)=1, y'(0)=0, y''(0)=-1, y'''(0)=-2, y(1)=0, y'(1)=-e, y''(1)=-2e.
    """
    e = math.e
    return LinearBvp7(
        g=_one,
        q=_example1_forcing,
        a=0.0,
        b=1.0,
        bc=(1.0, 0.0, -1.0, -2.0, 0.0, -e, -2.0 * e),
        exact=_example1_exact,
        name='example1',
    )


# --- Manufactured polynomial problems ---

class _PolynomialSolution:
    """exact(x, k) for a polynomial, derivatives precomputed."""

    def __init__(self, poly: Polynomial):
        self.derivatives = tuple(poly.deriv(k) for k in range(MAX_MANUFACTURED_DEGREE + 1))

    def __call__(self, x: float, k: int) -> float:
        return float(self.derivatives[k](x))


class _ConstantFunction:
    def __init__(self, value: float):
        self.value = value

    def __call__(self, x: float) -> float:
        return self.value


def manufactured(coeffs, a: float = 0.0, b: float = 1.0, name: str = 'manufactured') -> LinearBvp7:
    """
    Problem with g = 0 whose exact solution is the polynomial
    p(x) = coeffs[0] + coeffs[1] x + ... (degree <= 7), so q = p^(7) is the
    constant 5040 * coeffs[7].
    """
    coeffs = [float(c) for c in coeffs]
    if not coeffs:
        raise ProblemDefinitionError("need at least one polynomial coefficient")
    if len(coeffs) > MAX_MANUFACTURED_DEGREE + 1:
        raise ProblemDefinitionError(
            f"degree must be at most {MAX_MANUFACTURED_DEGREE}, got {len(coeffs) - 1}"
        )
    if b <= a:
        raise ProblemDefinitionError(f"need b > a, got a={a!r}, b={b!r}")
    solution = _PolynomialSolution(Polynomial(coeffs))
    forcing = solution(a, MAX_MANUFACTURED_DEGREE)
    bc = tuple(solution(a if side == 'a' else b, order) for side, order in BOUNDARY_CONDITIONS)
    return LinearBvp7(
        g=_ConstantFunction(0.0),
        q=_ConstantFunction(forcing),
        a=float(a),
        b=float(b),
        bc=bc,
        exact=solution,
        name=name,
    )


def monomial(k: int) -> LinearBvp7:
    """x^k on [0, 1]."""
    return manufactured([0.0] * k + [1.0], 0.0, 1.0, name=f'poly{k}')


# --- Built-ins ---

BUILTIN_PROBLEMS: tuple[str, ...] = ('example1',) + tuple(
    f'poly{k}' for k in range(MAX_MANUFACTURED_DEGREE + 1)
)


def builtin_problem(name: str) -> LinearBvp7:
    if name == 'example1':
        return example1()
    if name in BUILTIN_PROBLEMS:
        return monomial(int(name[len('poly'):]))
    raise UnknownProblemError(
        f"unknown built-in problem '{name}'; available: {', '.join(BUILTIN_PROBLEMS)}"
    )


# --- Problem documents ---

class _ExpressionSolution:
    """Exact solution given as an expression: value only, no derivatives."""

    def __init__(self, expression: Expression):
        self.expression = expression

    def __call__(self, x: float, k: int) -> float:
        if k != 0:
            raise MissingExactSolutionError(
                f"an exact solution from a problem file has no derivative of order {k}"
            )
        return self.expression(x)


def _parse_field(document: ProblemDocument, name: str) -> Expression:
    try:
        return parse_expression(getattr(document, name))
    except ExpressionError as err:
        raise ProblemFileError(str(err), field=name) from err


def build_problem(document: ProblemDocument, name: str = 'custom') -> LinearBvp7:
    """Turn a problem document into a LinearBvp7, running its consistency gates."""
    g = _parse_field(document, 'g')
    q = _parse_field(document, 'q')
    exact = None
    if document.exact is not None:
        exact = _ExpressionSolution(_parse_field(document, 'exact'))
    return LinearBvp7(
        g=g,
        q=q,
        a=document.a,
        b=document.b,
        bc=tuple(document.bc),
        exact=exact,
        exact_max_order=0,
        name=name,
    )


def load_problem(data: bytes, name: str = 'custom') -> LinearBvp7:
    """
    Parse a UTF-8 JSON problem document:
    {"a", "b", "g", "q", "bc": [k1..k7], "exact"?}. Unknown fields are rejected.

    Args:
        data: raw document bytes.
        name: problem name used in logs and reports.

    Returns:
        The validated LinearBvp7.

    Raises:
        ProblemFileError: bad encoding, malformed JSON or a bad field;
            `field` names the offending entry when there is one.
        InconsistentProblemError: `exact` disagrees with bc or the ODE.
    """
    try:
        text = data.decode('utf-8')
    except UnicodeDecodeError as err:
        raise ProblemFileError(f"problem document is not valid UTF-8: {err}") from err
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise ProblemFileError(f"malformed problem document: {err}") from err
    document = ProblemDocument.from_dict(raw)
    problem = build_problem(document, name=name)
    logger.debug("loaded problem '%s' on [%r, %r]", name, problem.a, problem.b)
    return problem


def load_problem_file(file_path: Union[str, Path]) -> LinearBvp7:
    """
    Load a problem file.

    Raises:
        FileNotFoundError: If the file doesn't exist
        ProblemFileError: If the document is invalid
    """
    path = Path(file_path)
    if not path.exists():
        raise FileNotFoundError(f"File not found: {file_path}")
    return load_problem(path.read_bytes(), name=path.stem)
