"""
Built-in oracle suite behind the `selftest` command.

Each group returns a list of failure messages; an empty list is a pass.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..models import BandMatrix, Stencil, uniform_grid
from .analysis import error_report, solve
from .band_linalg import band_lu_solve, band_qr_solve, dense_solve_oracle, normal_solve
from .problems import MAX_MANUFACTURED_DEGREE, monomial
from .spline_basis import (
    DEGREE,
    FACTORIAL,
    active_indices,
    bspline_by_differences,
    cox_de_boor,
    exact_knot_stencil,
    knot_stencil,
    septic_eval,
    stencil_discrepancies,
)

logger = logging.getLogger(__name__)

TIME_BUDGET = 30.0  # seconds, reported rather than enforced
FAULTS = ('stencil',)

StencilSource = Callable[..., Stencil]


@dataclass
class GroupResult:
    name: str
    failures: list[str] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class SelftestReport:
    groups: list[GroupResult] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def is_valid(self) -> bool:
        return all(group.passed for group in self.groups)

    @property
    def failed_groups(self) -> list[str]:
        return [group.name for group in self.groups if not group.passed]

    @property
    def within_budget(self) -> bool:
        return self.elapsed <= TIME_BUDGET


# --- Groups ---

def _corrupted_stencil(d: int, limit=None) -> Stencil:
    stencil = knot_stencil(d, limit)
    if d != 4:
        return stencil
    values = list(stencil.values)
    values[4] += 1
    return Stencil(stencil.deriv_order, tuple(values), stencil.limit)


def check_stencils(source: StencilSource = knot_stencil) -> list[str]:
    failures = []
    for d in range(DEGREE + 1):
        computed = source(d)
        if computed.values != exact_knot_stencil(d).values:
            failures.append(f"d={d}: {computed.values} differs from exact integer stencil")
        if d < DEGREE and not computed.is_symmetric:
            failures.append(f"d={d}: stencil is not {'odd' if d % 2 else 'even'}-symmetric")
        if 3 <= d < DEGREE:
            for offset, value, reference in stencil_discrepancies(computed):
                failures.append(f"d={d} v_{offset}: computed {value}, table {reference}")

    right, left = source(DEGREE, 'right'), source(DEGREE, 'left')
    if right.mirrored().values != left.values:
        failures.append("d=7: right-limit stencil does not mirror onto the left-limit stencil")
    flagged = [offset for offset, _, _ in stencil_discrepancies(left)]
    if flagged != [1, 2, 3]:
        failures.append(f"d=7: expected table disagreements at v_1, v_2, v_3, found {flagged}")
    return failures


def _random_grid(rng: np.random.Generator):
    a = rng.uniform(-1.0, 1.0)
    width = rng.uniform(0.5, 2.0)
    n = int(rng.integers(8, 41))
    return uniform_grid(a, a + width, n)


def check_basis(samples: int = 10_000, seed: int = 7) -> list[str]:
    rng = np.random.default_rng(seed)
    grids = [_random_grid(rng) for _ in range(50)]
    tol = 1e-9 * FACTORIAL
    failures = []
    for _ in range(samples):
        grid = grids[int(rng.integers(len(grids)))]
        j = int(rng.integers(-3, grid.n + 4))
        x = rng.uniform(grid.knot(j - 4), grid.knot(j + 4))
        closed = septic_eval(j, x, grid, 0)
        differences = bspline_by_differences(j, DEGREE, x, grid)
        recursion = FACTORIAL * cox_de_boor(j, DEGREE, x, grid)
        if abs(closed - differences) > tol or abs(closed - recursion) > tol:
            failures.append(
                f"j={j}, x={x!r}: closed form {closed!r}, differences {differences!r}, "
                f"recursion {recursion!r}"
            )
            if len(failures) >= 5:
                break
    return failures


def check_partition(points: int = 1000) -> list[str]:
    grid = uniform_grid(0.0, 1.0, 20)
    failures = []
    for x in np.linspace(grid.a, grid.b, points):
        total = sum(septic_eval(j, x, grid, 0) for j in active_indices(x, grid)) / FACTORIAL
        if abs(total - 1.0) > 1e-12:
            failures.append(f"x={x!r}: basis sums to {total!r}")
            if len(failures) >= 5:
                break
    return failures


def random_band_system(rng: np.random.Generator, size: int, kl: int, ku: int):
    """Diagonally dominant band matrix with entries in [-1, 1] and a random rhs."""
    dense = np.zeros((size, size))
    for i in range(size):
        for j in range(max(0, i - kl), min(size, i + ku + 1)):
            dense[i, j] = rng.uniform(-1.0, 1.0)
        dense[i, i] = np.sum(np.abs(dense[i])) + 1.0
    return BandMatrix.from_dense(dense, kl, ku), dense, rng.uniform(-1.0, 1.0, size)


def check_solvers(systems: int = 100, seed: int = 11) -> list[str]:
    rng = np.random.default_rng(seed)
    failures = []
    for _ in range(systems):
        size = int(rng.integers(2, 51))
        kl = int(rng.integers(0, min(8, size - 1) + 1))
        ku = int(rng.integers(0, min(8, size - 1) + 1))
        band, dense, rhs = random_band_system(rng, size, kl, ku)
        reference = dense_solve_oracle(dense, rhs)
        scale = np.max(np.abs(reference))
        for name, x, tol in (
            ('band-lu', band_lu_solve(band, rhs), 1e-10),
            ('band-qr', band_qr_solve(band, rhs).x, 1e-10),
            ('normal', normal_solve(band, rhs).x, 1e-8),
        ):
            error = np.max(np.abs(x - reference))
            if error > tol * scale:
                failures.append(f"{name} on {size}x{size} (kl={kl}, ku={ku}): error {error:.3g}")
    return failures


def check_exactness(meshes: tuple[int, ...] = (8, 16, 32)) -> list[str]:
    failures = []
    for k in range(MAX_MANUFACTURED_DEGREE + 1):
        problem = monomial(k)
        for n in meshes:
            report = error_report(solve(problem, n), problem, 'knots_and_midpoints')
            if report.max_abs_error > 1e-6:
                failures.append(f"x^{k}, n={n}: max error {report.max_abs_error:.3g}")
    return failures


def run_selftest(fault: Optional[str] = None) -> SelftestReport:
    """Run every group; `fault` deliberately breaks one group to test the harness."""
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault '{fault}'; available: {', '.join(FAULTS)}")
    source = _corrupted_stencil if fault == 'stencil' else knot_stencil
    groups = (
        ('stencil', lambda: check_stencils(source)),
        ('basis', check_basis),
        ('partition', check_partition),
        ('solver', check_solvers),
        ('exactness', check_exactness),
    )

    report = SelftestReport()
    started = time.perf_counter()
    for name, check in groups:
        group_started = time.perf_counter()
        result = GroupResult(name=name)
        try:
            result.failures = check()
        except Exception as err:  # a crash inside a group is a failure of that group
            result.failures = [f"{type(err).__name__}: {err}"]
        result.elapsed = time.perf_counter() - group_started
        logger.debug("group %s: %d failure(s)", name, len(result.failures))
        report.groups.append(result)
    report.elapsed = time.perf_counter() - started
    return report
