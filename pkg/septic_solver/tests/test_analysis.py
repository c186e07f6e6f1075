"""
End-to-end solves: accuracy on the built-in problems, evaluation of the
spline, residual diagnostics and convergence studies.
"""

import math

import numpy as np
import pytest

from src.core.analysis import (
    convergence_study,
    error_report,
    eval_solution,
    fitted_order,
    ode_residual,
    pairwise_orders,
    sample_points,
    solve,
)
from src.core.problems import example1, load_problem, monomial
from src.errors import (
    ConvergenceError,
    InvalidGridError,
    MissingExactSolutionError,
    OutOfDomainError,
)
from src.models import ConvergenceRecord, Scheme, SolverChoice, SplineSolution

NO_EXACT = b'{"a": 0, "b": 1, "g": "x", "q": "cos(x) - 1", "bc": [1, 0, 0, 0, 1, 0, 0]}'


@pytest.fixture(scope='module')
def example_solution() -> SplineSolution:
    return solve(example1(), 20)


class TestSolve:

    def test_defaults(self, example_solution):
        assert example_solution.scheme is Scheme.LEAST_SQUARES
        assert example_solution.solver is SolverChoice.BAND_QR
        assert len(example_solution.alpha) == 27
        assert not example_solution.quality_warning

    def test_example1_error_ceiling(self):
        problem = example1()
        report = error_report(solve(problem, 80), problem)
        assert report.max_abs_error <= 3.1e-4

    def test_errors_decrease_under_refinement(self):
        problem = example1()
        errors = [error_report(solve(problem, n), problem).max_abs_error for n in (20, 40, 60, 80)]
        assert all(e1 > e2 for e1, e2 in zip(errors, errors[1:]))

    def test_mesh_gate(self):
        with pytest.raises(InvalidGridError, match="at least 8"):
            solve(example1(), 7)

    def test_deterministic(self):
        first, second = solve(example1(), 30), solve(example1(), 30)
        np.testing.assert_array_equal(first.alpha, second.alpha)

    def test_square_scheme_uses_band_lu(self):
        solution = solve(example1(), 20, Scheme.SQUARE_DROP_LAST)
        assert solution.solver is SolverChoice.BAND_LU
        assert len(solution.alpha) == 27

    def test_schemes_agree(self):
        problem = example1()
        full = solve(problem, 40)
        square = solve(problem, 40, Scheme.SQUARE_DROP_LAST)
        largest = max(error_report(full, problem).max_abs_error, error_report(square, problem).max_abs_error)
        knots = sample_points(full, 'knots')
        difference = max(abs(eval_solution(full, x) - eval_solution(square, x)) for x in knots)
        assert difference <= 10 * largest

    def test_drop_first_is_singular_without_coefficient(self):
        # with g = 0 the rows at x_{n-1} and x_n coincide
        with pytest.raises(ConvergenceError, match="n=8"):
            convergence_study(monomial(7), [8, 16], Scheme.SQUARE_DROP_FIRST)

    def test_quality_warning_flag(self, example_solution):
        noisy = SplineSolution(
            grid=example_solution.grid,
            alpha=example_solution.alpha,
            scheme=example_solution.scheme,
            solver=example_solution.solver,
            solve_residual=1.0,
            rhs_norm=1.0,
        )
        assert noisy.quality_warning

    def test_ill_conditioned_normal_equations_warn(self):
        solution = solve(example1(), 40, solver=SolverChoice.NORMAL)
        assert solution.ill_conditioned
        assert solution.quality_warning

    def test_band_qr_is_not_flagged(self):
        solution = solve(example1(), 40)
        assert not solution.ill_conditioned
        assert not solution.quality_warning


class TestPolynomialExactness:

    @pytest.mark.parametrize("k", range(8))
    @pytest.mark.parametrize("n", [8, 16, 32])
    def test_monomials(self, k, n):
        problem = monomial(k)
        report = error_report(solve(problem, n), problem, 'knots_and_midpoints')
        assert report.max_abs_error <= 1e-6

    def test_constant(self):
        problem = monomial(0)
        assert error_report(solve(problem, 10), problem).max_abs_error <= 1e-9

    def test_boundary_values_reproduced(self):
        problem = monomial(5)
        solution = solve(problem, 16)
        orders = [('a', 0), ('a', 1), ('a', 2), ('a', 3), ('b', 0), ('b', 1), ('b', 2)]
        for (side, d), k in zip(orders, problem.bc):
            x = problem.a if side == 'a' else problem.b
            assert abs(eval_solution(solution, x, d) - k) <= 1e-6 * max(1.0, abs(k))


class TestEvalSolution:

    def test_left_boundary_value(self, example_solution):
        assert eval_solution(example_solution, 0.0) == pytest.approx(1.0, abs=1e-6)

    def test_cubic_derivative(self):
        solution = solve(monomial(3), 16)
        assert eval_solution(solution, 0.5, 1) == pytest.approx(0.75, abs=1e-6)

    def test_seventh_derivative_is_finite(self, example_solution):
        assert math.isfinite(eval_solution(example_solution, 0.525, 7))

    def test_clamps_rounding_at_endpoints(self, example_solution):
        assert eval_solution(example_solution, 1.0 + 2e-16) == eval_solution(example_solution, 1.0)
        assert eval_solution(example_solution, -1e-300) == eval_solution(example_solution, 0.0)

    @pytest.mark.parametrize("x", [-0.01, 1.5, math.nan, math.inf])
    def test_out_of_domain(self, example_solution, x):
        with pytest.raises(OutOfDomainError):
            eval_solution(example_solution, x)

    @pytest.mark.parametrize("d", range(5))
    def test_derivatives_consistent(self, example_solution, d):
        x = 0.3125
        exact = eval_solution(example_solution, x, d + 1)
        errors = []
        for step in (0.004, 0.002, 0.001):
            fd = (eval_solution(example_solution, x + step, d)
                  - eval_solution(example_solution, x - step, d)) / (2 * step)
            errors.append(abs(fd - exact))
        assert math.log2(errors[0] / errors[1]) >= 1.8
        assert math.log2(errors[1] / errors[2]) >= 1.8


class TestErrorReport:

    def test_sample_sets(self, example_solution):
        assert len(sample_points(example_solution, 'knots')) == 21
        points = sample_points(example_solution, 'knots_and_midpoints')
        assert len(points) == 41
        assert points == sorted(points)

    def test_superset_error_is_larger(self, example_solution):
        problem = example1()
        knots = error_report(example_solution, problem, 'knots')
        both = error_report(example_solution, problem, 'knots_and_midpoints')
        assert both.max_abs_error >= knots.max_abs_error
        assert knots.location_of_max in knots.points
        assert min(knots.abs_errors) >= 0.0

    def test_needs_exact(self):
        problem = load_problem(NO_EXACT)
        with pytest.raises(MissingExactSolutionError, match="exact solution required"):
            error_report(solve(problem, 10), problem)


class TestOdeResidual:

    def test_polynomial_is_small(self):
        problem = monomial(7)
        assert ode_residual(solve(problem, 8), problem, 8) <= 1e-4

    def test_decreases_with_refinement(self):
        problem = example1()
        residuals = [ode_residual(solve(problem, n), problem, n) for n in (10, 20, 40)]
        assert all(r > 0.0 and math.isfinite(r) for r in residuals)
        assert residuals[0] > residuals[1] > residuals[2]

    def test_problem_without_exact(self):
        problem = load_problem(NO_EXACT)
        assert math.isfinite(ode_residual(solve(problem, 12), problem, 30))

    def test_needs_a_probe(self, example_solution):
        with pytest.raises(ValueError):
            ode_residual(example_solution, example1(), 0)


class TestConvergence:

    def test_example1_study(self):
        report = convergence_study(example1(), [40, 10, 20])
        assert [r.n for r in report.records] == [10, 20, 40]
        errors = report.errors
        assert errors[0] > errors[1] > errors[2]
        assert report.fitted_order is not None and report.fitted_order >= 0.7
        assert report.pairwise_orders[0] is None
        assert all(order is not None for order in report.pairwise_orders[1:])

    def test_needs_exact(self):
        with pytest.raises(MissingExactSolutionError):
            convergence_study(load_problem(NO_EXACT), [10, 20])

    def test_needs_meshes(self):
        with pytest.raises(ValueError):
            convergence_study(example1(), [])

    def test_fitted_order_of_power_law(self):
        hs = [0.1, 0.05, 0.025, 0.0125]
        assert fitted_order(hs, [3.0 * h ** 4 for h in hs]) == pytest.approx(4.0)

    def test_fitted_order_skips_roundoff(self):
        assert fitted_order([0.1, 0.05, 0.025], [1e-13, 1e-14, 2e-13]) is None
        assert fitted_order([0.1, 0.05], [1e-3, 1e-4]) is None

    def test_pairwise_orders_only_for_doublings(self):
        records = [
            ConvergenceRecord(n=n, h=1.0 / n, max_abs_error=e, solve_residual=0.0, wall_time=0.0)
            for n, e in ((10, 8e-3), (20, 1e-3), (30, 5e-4), (60, 1.25e-4))
        ]
        orders = pairwise_orders(records)
        assert orders[0] is None
        assert orders[1] == pytest.approx(3.0)
        assert orders[2] is None
        assert orders[3] == pytest.approx(2.0)
