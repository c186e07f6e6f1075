import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Optional

import numpy as np

from ..errors import InconsistentProblemError, MissingExactSolutionError, ProblemDefinitionError, ProblemFileError

CoefficientFunction = Callable[[float], float]
ExactSolution = Callable[[float, int], float]

# (endpoint, derivative order) of k1 ... k7
BOUNDARY_CONDITIONS: tuple[tuple[Literal['a', 'b'], int], ...] = (
    ('a', 0), ('a', 1), ('a', 2), ('a', 3),
    ('b', 0), ('b', 1), ('b', 2),
)

BC_TOLERANCE = 1e-10
RESIDUAL_TOLERANCE = 1e-8
RESIDUAL_PROBES = 33


@dataclass(frozen=True)
class LinearBvp7:
    """
    y^(7)(x) = g(x) y(x) + q(x) on [a, b] with
    y(a), y'(a), y''(a), y'''(a), y(b), y'(b), y''(b) = bc.

    `exact(x, k)` is the k-th derivative of a known solution, defined up
    to `exact_max_order`. When present it must match the boundary values
    and (for exact_max_order = 7) satisfy the ODE; both are checked here.
    """
    g: CoefficientFunction
    q: CoefficientFunction
    a: float
    b: float
    bc: tuple[float, ...]
    exact: Optional[ExactSolution] = field(default=None, compare=False)
    exact_max_order: int = 7
    name: str = "custom"

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ProblemDefinitionError(f"endpoints must be finite, got a={self.a!r}, b={self.b!r}")
        if self.b <= self.a:
            raise ProblemDefinitionError(f"need b > a, got a={self.a!r}, b={self.b!r}")
        if len(self.bc) != len(BOUNDARY_CONDITIONS):
            raise ProblemDefinitionError(f"need 7 boundary values, got {len(self.bc)}")
        object.__setattr__(self, 'bc', tuple(float(k) for k in self.bc))
        for index, k in enumerate(self.bc, start=1):
            if not math.isfinite(k):
                raise ProblemDefinitionError(f"boundary value k{index} is not finite: {k!r}")
        if self.exact is not None:
            self._check_boundary_consistency()
            if self.exact_max_order >= 7:
                self._check_residual()

    @property
    def has_exact(self) -> bool:
        return self.exact is not None

    def endpoint(self, side: str) -> float:
        return self.a if side == 'a' else self.b

    def exact_value(self, x: float, order: int = 0) -> float:
        if self.exact is None:
            raise MissingExactSolutionError(f"problem '{self.name}' has no exact solution")
        if order > self.exact_max_order:
            raise MissingExactSolutionError(
                f"exact solution of '{self.name}' only provides derivatives up to order "
                f"{self.exact_max_order}, asked for {order}"
            )
        return float(self.exact(x, order))

    def residual_probes(self) -> np.ndarray:
        return np.linspace(self.a, self.b, RESIDUAL_PROBES)

    # --- Consistency gates ---

    def _check_boundary_consistency(self) -> None:
        for index, ((side, order), k) in enumerate(zip(BOUNDARY_CONDITIONS, self.bc), start=1):
            if order > self.exact_max_order:
                continue
            value = self.exact_value(self.endpoint(side), order)
            if abs(value - k) > BC_TOLERANCE * max(1.0, abs(k)):
                raise InconsistentProblemError(
                    f"boundary condition k{index} (order {order} at {side}) is {k!r} "
                    f"but the exact solution gives {value!r}",
                    condition=index,
                )

    def _check_residual(self) -> None:
        worst = 0.0
        worst_x = self.a
        q_scale = 1.0
        for x in self.residual_probes():
            x = float(x)
            qx = self.q(x)
            q_scale = max(q_scale, abs(qx))
            r = abs(self.exact_value(x, 7) - self.g(x) * self.exact_value(x, 0) - qx)
            if r > worst:
                worst, worst_x = r, x
        if worst > RESIDUAL_TOLERANCE * q_scale:
            raise InconsistentProblemError(
                f"exact solution misses the ODE by {worst!r} at x={worst_x!r}"
            )


@dataclass
class ProblemDocument:
    """
    Text form of a problem, as stored in a problem file.
    """
    a: float
    b: float
    g: str                      # expression in x
    q: str                      # expression in x
    bc: list[float]
    exact: Optional[str] = None # expression in x, optional

    REQUIRED = ('a', 'b', 'g', 'q', 'bc')
    OPTIONAL = ('exact',)

    def to_dict(self) -> dict:
        data = {
            'a': self.a,
            'b': self.b,
            'g': self.g,
            'q': self.q,
            'bc': list(self.bc),
        }
        if self.exact is not None:
            data['exact'] = self.exact
        return data

    @classmethod
    def from_dict(cls, data: dict) -> 'ProblemDocument':
        if not isinstance(data, dict):
            raise ProblemFileError(f"problem document must be a JSON object, got {type(data).__name__}")
        unknown = sorted(set(data) - set(cls.REQUIRED) - set(cls.OPTIONAL))
        if unknown:
            raise ProblemFileError(f"unknown field(s): {', '.join(unknown)}")
        for name in cls.REQUIRED:
            if name not in data:
                raise ProblemFileError("missing required field", field=name)

        bc = data['bc']
        if not isinstance(bc, list) or len(bc) != 7:
            raise ProblemFileError("expected a list of 7 numbers", field='bc')
        exact = data.get('exact')
        if exact is not None and not isinstance(exact, str):
            raise ProblemFileError("expected an expression string", field='exact')
        return cls(
            a=_number(data['a'], 'a'),
            b=_number(data['b'], 'b'),
            g=_text(data['g'], 'g'),
            q=_text(data['q'], 'q'),
            bc=[_number(k, f'bc[{i}]') for i, k in enumerate(bc)],
            exact=exact,
        )


def _number(value, name: str) -> float:
    # bool is an int subclass; reject it explicitly
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProblemFileError(f"expected a number, got {value!r}", field=name)
    try:
        return float(value)
    except OverflowError as err:
        raise ProblemFileError(f"number is too large for a double: {err}", field=name) from err


def _text(value, name: str) -> str:
    if not isinstance(value, str):
        raise ProblemFileError(f"expected an expression string, got {value!r}", field=name)
    return value
