from .spline_basis import (
    truncated_power, bspline_by_differences, cox_de_boor, septic_eval,
    knot_stencil, exact_knot_stencil, stencil_discrepancies, active_indices,
    piece_coefficients, REFERENCE_STENCILS, DEGREE, FACTORIAL,
)
from .expression import Expression, parse_expression, eval_expression, format_expression, FUNCTIONS
from .problems import (
    example1, manufactured, monomial, builtin_problem, build_problem,
    load_problem, load_problem_file, BUILTIN_PROBLEMS,
)
from .assembly import collocation_row, boundary_rows, assemble
from .band_linalg import band_lu_solve, band_qr_solve, normal_solve, dense_solve_oracle, solve_system
from .analysis import (
    solve, eval_solution, error_report, ode_residual, convergence_study,
    fitted_order, pairwise_orders, sample_points,
)
from .selftest import run_selftest, SelftestReport, GroupResult

__all__ = [
    'truncated_power', 'bspline_by_differences', 'cox_de_boor', 'septic_eval',
    'knot_stencil', 'exact_knot_stencil', 'stencil_discrepancies', 'active_indices',
    'piece_coefficients', 'REFERENCE_STENCILS', 'DEGREE', 'FACTORIAL',
    'Expression', 'parse_expression', 'eval_expression', 'format_expression', 'FUNCTIONS',
    'example1', 'manufactured', 'monomial', 'builtin_problem', 'build_problem',
    'load_problem', 'load_problem_file', 'BUILTIN_PROBLEMS',
    'collocation_row', 'boundary_rows', 'assemble',
    'band_lu_solve', 'band_qr_solve', 'normal_solve', 'dense_solve_oracle', 'solve_system',
    'solve', 'eval_solution', 'error_report', 'ode_residual', 'convergence_study',
    'fitted_order', 'pairwise_orders', 'sample_points',
    'run_selftest', 'SelftestReport', 'GroupResult',
]
