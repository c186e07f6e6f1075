from dataclasses import dataclass, field
from enum import Enum
from typing import Literal, Optional

import numpy as np

from .grid import KnotGrid
from .system import CollocationSystem, Scheme

SampleKind = Literal['knots', 'knots_and_midpoints']

# solve_residual above this fraction of ||rhs|| is reported as a warning
QUALITY_THRESHOLD = 1e-4

# normal-equation solves with cond(A^T A) estimated above this are flagged
NORMAL_CONDITION_LIMIT = 1e10


class SolverChoice(Enum):
    BAND_LU = 'band-lu'
    NORMAL = 'normal'
    BAND_QR = 'band-qr'
    DENSE = 'dense'

    @classmethod
    def default_for(cls, scheme: Scheme) -> 'SolverChoice':
        return cls.BAND_LU if scheme.is_square else cls.BAND_QR


@dataclass(eq=False)
class SolveResult:
    """Solution vector of a linear system plus its residual norm ||A x - b||_2."""
    x: np.ndarray
    residual_norm: float
    method: str
    used_fallback: bool = False
    condition_estimate: Optional[float] = None

    @property
    def ill_conditioned(self) -> bool:
        if self.used_fallback:
            return True
        return self.condition_estimate is not None and self.condition_estimate > NORMAL_CONDITION_LIMIT


@dataclass(frozen=True, eq=False)
class SplineSolution:
    """Coefficients alpha_j, j = -3 ... n+3, of the collocation spline."""
    grid: KnotGrid
    alpha: np.ndarray = field(repr=False)
    scheme: Scheme
    solver: SolverChoice
    solve_residual: float
    rhs_norm: float
    system: Optional[CollocationSystem] = field(default=None, repr=False)
    ill_conditioned: bool = False

    @property
    def quality_warning(self) -> bool:
        return self.ill_conditioned or self.solve_residual > QUALITY_THRESHOLD * self.rhs_norm

    def coefficient(self, j: int) -> float:
        return float(self.alpha[j + 3])


@dataclass
class ErrorReport:
    """Pointwise |y_exact - y_spline| over a sample set."""
    sample: SampleKind
    points: list[float] = field(default_factory=list)
    abs_errors: list[float] = field(default_factory=list)

    @property
    def max_abs_error(self) -> float:
        return max(self.abs_errors, default=0.0)

    @property
    def location_of_max(self) -> Optional[float]:
        if not self.abs_errors:
            return None
        return self.points[int(np.argmax(self.abs_errors))]


@dataclass(frozen=True)
class ConvergenceRecord:
    n: int
    h: float
    max_abs_error: float
    solve_residual: float
    wall_time: float  # seconds


@dataclass
class ConvergenceReport:
    """
    Per-mesh errors, sorted by n, with the fitted order of
    log(error) against log(h) and pairwise orders for mesh doublings.
    """
    records: list[ConvergenceRecord] = field(default_factory=list)
    fitted_order: Optional[float] = None
    pairwise_orders: list[Optional[float]] = field(default_factory=list)

    @property
    def errors(self) -> list[float]:
        return [r.max_abs_error for r in self.records]
