"""
Command handlers. Each takes a validated CliConfig and returns an exit code.
Data goes to stdout or --output; summaries and diagnostics go to stderr.
"""

import logging
import sys
from typing import Callable

from ..errors import MissingExactSolutionError
from ..models import CliConfig, LinearBvp7
from ..core import (
    DEGREE,
    builtin_problem,
    convergence_study,
    eval_solution,
    knot_stencil,
    load_problem_file,
    run_selftest as run_oracle_suite,
    sample_points,
    solve,
    stencil_discrepancies,
)
from ..utils import format_float, open_output, write_convergence, write_solution, write_stencils, write_system

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_WARNING = 2

# Failure messages shown per selftest group
MAX_LISTED_FAILURES = 5


def _load_problem(cfg: CliConfig) -> LinearBvp7:
    if cfg.builtin is not None:
        return builtin_problem(cfg.builtin)
    return load_problem_file(cfg.problem_path)


def _summary(**fields) -> None:
    for key, value in fields.items():
        print(f"{key}={value}", file=sys.stderr)


def run_solve(cfg: CliConfig) -> int:
    problem = _load_problem(cfg)
    solution = solve(problem, cfg.n, cfg.scheme, cfg.effective_solver)

    rows = []
    for x in sample_points(solution, cfg.sample):
        y = eval_solution(solution, x)
        if problem.has_exact:
            y_exact = problem.exact_value(x)
            rows.append((x, y, y_exact, abs(y_exact - y)))
        else:
            rows.append((x, y, None, None))

    with open_output(cfg.output) as stream:
        write_solution(stream, rows)
    if cfg.dump_system:
        with open_output(cfg.dump_system) as stream:
            write_system(stream, solution.system)

    max_error = max(row[3] for row in rows) if problem.has_exact else float('nan')
    _summary(
        max_abs_error=format_float(max_error),
        solve_residual=format_float(solution.solve_residual),
        scheme=solution.scheme.value,
        n=cfg.n,
    )
    return EXIT_WARNING if solution.quality_warning else EXIT_OK


def run_converge(cfg: CliConfig) -> int:
    problem = _load_problem(cfg)
    if not problem.has_exact:
        raise MissingExactSolutionError(f"exact solution required for converge (problem '{problem.name}')")
    report = convergence_study(problem, cfg.ns, cfg.scheme, cfg.effective_solver)
    with open_output(cfg.output) as stream:
        write_convergence(stream, report)
    _summary(
        fitted_order='nan' if report.fitted_order is None else format_float(report.fitted_order),
        scheme=cfg.scheme.value,
    )
    return EXIT_OK


def run_basis_table(cfg: CliConfig) -> int:
    stencils = [knot_stencil(d, cfg.limit if d == DEGREE else None) for d in range(DEGREE + 1)]
    notes = []
    for stencil in stencils:
        for offset, value, reference in stencil_discrepancies(stencil):
            notes.append(
                f"d={stencil.deriv_order} v_{offset}: computed {value} differs from table value {reference}"
            )
    with open_output(cfg.output) as stream:
        write_stencils(stream, stencils, notes)
    return EXIT_OK


def run_selftest(cfg: CliConfig) -> int:
    report = run_oracle_suite(cfg.inject_fault)
    for group in report.groups:
        status = 'PASS' if group.passed else 'FAIL'
        print(f"{status} {group.name} ({group.elapsed:.2f} s)")
        for failure in group.failures[:MAX_LISTED_FAILURES]:
            print(f"  - {failure}")
    budget = 'within' if report.within_budget else 'over'
    print(f"runtime {report.elapsed:.2f} s ({budget} the 30 s budget)")
    if not report.is_valid:
        logger.error("selftest failed: %s", ', '.join(report.failed_groups))
        return EXIT_ERROR
    return EXIT_OK


COMMAND_HANDLERS: dict[str, Callable[[CliConfig], int]] = {
    'solve': run_solve,
    'converge': run_converge,
    'basis-table': run_basis_table,
    'selftest': run_selftest,
}
