"""
End-to-end solve, evaluation of the collocation spline, and error
measurement against exact solutions.
"""

import logging
import math
import time
from typing import Iterable, Optional

import numpy as np

from ..errors import ConvergenceError, MissingExactSolutionError, OutOfDomainError, SepticSolverError
from ..models import (
    ConvergenceRecord,
    ConvergenceReport,
    ErrorReport,
    KnotGrid,
    LinearBvp7,
    SampleKind,
    Scheme,
    SolverChoice,
    SplineSolution,
    uniform_grid,
)
from .assembly import assemble
from .band_linalg import solve_system
from .spline_basis import DEGREE, active_indices, septic_eval

logger = logging.getLogger(__name__)

# Errors at or below this count as exact; they are left out of order fits
EXACT_ERROR_FLOOR = 1e-12
MIN_FIT_POINTS = 3


def solve(p: LinearBvp7, n: int, scheme: Scheme = Scheme.LEAST_SQUARES,
          solver: Optional[SolverChoice] = None) -> SplineSolution:
    """
    Collocate `p` on n uniform intervals and solve for the spline coefficients.

    Args:
        p: the boundary-value problem.
        n: number of intervals; at least MIN_INTERVALS.
        scheme: how the n + 8 conditions meet the n + 7 unknowns.
        solver: linear solver; defaults to band-lu for square schemes
            and band-qr for least squares.

    Returns:
        The SplineSolution, with `quality_warning` set when the solve
        residual is large or the normal equations were ill-conditioned.

    Raises:
        InvalidGridError: n is below the mesh gate.
        SingularMatrixError, RankDeficientError: the system is degenerate.
        ExpressionDomainError: g or q cannot be evaluated at a collocation point.
    """
    solver = solver or SolverChoice.default_for(scheme)
    grid = uniform_grid(p.a, p.b, n)
    system = assemble(p, grid, scheme)
    result = solve_system(system, solver)
    solution = SplineSolution(
        grid=grid,
        alpha=result.x,
        scheme=scheme,
        solver=solver,
        solve_residual=result.residual_norm,
        rhs_norm=float(np.linalg.norm(system.rhs)),
        system=system,
        ill_conditioned=result.ill_conditioned,
    )
    if solution.ill_conditioned:
        logger.warning(
            "solution may be inaccurate: %s solve was ill-conditioned (n=%d, %s)",
            solver.value, n, scheme.value,
        )
    elif solution.quality_warning:
        logger.warning(
            "solve residual %.3g is large relative to ||rhs|| = %.3g (n=%d, %s, %s)",
            solution.solve_residual, solution.rhs_norm, n, scheme.value, solver.value,
        )
    return solution


def _clamp(x: float, grid: KnotGrid) -> float:
    """Pull x onto [a, b] when it misses by at most 4 ulp of the endpoint."""
    x = float(x)
    if not math.isfinite(x):
        raise OutOfDomainError(f"cannot evaluate the solution at x={x!r}")
    a, b = grid.a, grid.b
    width = b - a
    if x < a and a - x <= 4 * math.ulp(max(abs(a), width)):
        return a
    if x > b and x - b <= 4 * math.ulp(max(abs(b), width)):
        return b
    if not grid.contains(x):
        raise OutOfDomainError(f"x={x!r} is outside [{a!r}, {b!r}]")
    return x


def eval_solution(s: SplineSolution, x: float, d: int = 0) -> float:
    """
    d-th derivative of the spline at x in [a, b].

    Points within a few ulp outside [a, b] are pulled onto the endpoint.
    The seventh derivative uses right limits at interior knots and the
    left limit at b.

    Raises:
        OutOfDomainError: x is non-finite or outside [a, b].
        InvalidDerivativeOrderError: d is not in 0..7.
    """
    grid = s.grid
    x = _clamp(x, grid)
    total = 0.0
    for j in active_indices(x, grid):
        total += s.coefficient(j) * septic_eval(j, x, grid, d)
    return total


def sample_points(s: SplineSolution, sample: SampleKind) -> list[float]:
    knots = list(s.grid.interior_knots())
    if sample == 'knots':
        return knots
    if sample == 'knots_and_midpoints':
        points = []
        for knot, mid in zip(knots, s.grid.midpoints()):
            points.extend((knot, mid))
        points.append(knots[-1])
        return points
    raise ValueError(f"unknown sample kind '{sample}'")


def error_report(s: SplineSolution, p: LinearBvp7, sample: SampleKind = 'knots') -> ErrorReport:
    if not p.has_exact:
        raise MissingExactSolutionError("exact solution required for an error report")
    report = ErrorReport(sample=sample)
    for x in sample_points(s, sample):
        report.points.append(x)
        report.abs_errors.append(abs(p.exact_value(x, 0) - eval_solution(s, x, 0)))
    return report


def ode_residual(s: SplineSolution, p: LinearBvp7, m: int) -> float:
    """
    max |S^(7) - g S - q| over m interval midpoints (cycling through the
    intervals), divided by max(1, max |q|) over the same points.
    """
    if m < 1:
        raise ValueError(f"need at least one probe point, got m={m}")
    midpoints = s.grid.midpoints()
    worst = 0.0
    q_scale = 1.0
    for t in range(m):
        x = midpoints[t % len(midpoints)]
        qx = p.q(x)
        q_scale = max(q_scale, abs(qx))
        r = eval_solution(s, x, DEGREE) - p.g(x) * eval_solution(s, x, 0) - qx
        worst = max(worst, abs(r))
    return worst / q_scale


def fitted_order(hs: Iterable[float], errors: Iterable[float]) -> Optional[float]:
    """Slope of log(error) against log(h), or None with fewer than 3 usable errors."""
    pairs = [(h, e) for h, e in zip(hs, errors) if e > EXACT_ERROR_FLOOR]
    if len(pairs) < MIN_FIT_POINTS:
        return None
    log_h = np.log([h for h, _ in pairs])
    log_e = np.log([e for _, e in pairs])
    slope, _ = np.polyfit(log_h, log_e, 1)
    return float(slope)


def pairwise_orders(records: list[ConvergenceRecord]) -> list[Optional[float]]:
    """log2(e_k / e_{k+1}) where n doubles between neighbours; None elsewhere."""
    orders: list[Optional[float]] = [None]
    for prev, cur in zip(records, records[1:]):
        if (cur.n == 2 * prev.n and prev.max_abs_error > EXACT_ERROR_FLOOR
                and cur.max_abs_error > EXACT_ERROR_FLOOR):
            orders.append(math.log2(prev.max_abs_error / cur.max_abs_error))
        else:
            orders.append(None)
    return orders


def convergence_study(p: LinearBvp7, ns: Iterable[int], scheme: Scheme = Scheme.LEAST_SQUARES,
                      solver: Optional[SolverChoice] = None) -> ConvergenceReport:
    """Solve at every n (sorted, duplicates dropped) and fit the empirical order."""
    if not p.has_exact:
        raise MissingExactSolutionError("exact solution required for a convergence study")
    meshes = sorted(set(ns))
    if not meshes:
        raise ValueError("need at least one mesh size")

    report = ConvergenceReport()
    for n in meshes:
        started = time.perf_counter()
        try:
            solution = solve(p, n, scheme, solver)
            errors = error_report(solution, p, 'knots')
        except SepticSolverError as err:
            raise ConvergenceError(str(err), n) from err
        elapsed = time.perf_counter() - started
        report.records.append(ConvergenceRecord(
            n=n,
            h=solution.grid.h,
            max_abs_error=errors.max_abs_error,
            solve_residual=solution.solve_residual,
            wall_time=elapsed,
        ))
        logger.debug("n=%d: max error %.3g in %.3f s", n, errors.max_abs_error, elapsed)

    report.fitted_order = fitted_order([r.h for r in report.records], report.errors)
    report.pairwise_orders = pairwise_orders(report.records)
    return report
