"""
Collocation system assembly.

Unknowns are alpha_j, j = -3 ... n+3 (column j + 3). Rows are ordered for
band locality: the four conditions at a, collocation rows by increasing i,
then the three conditions at b. Every row is divided by its max-abs entry.
"""

import logging
import math

import numpy as np

from ..errors import AssemblyError, ExpressionDomainError
from ..models import (
    BOUNDARY_CONDITIONS,
    COLUMN_OFFSET,
    AssembledRow,
    BandMatrix,
    CollocationSystem,
    KnotGrid,
    LinearBvp7,
    RowOrigin,
    Scheme,
)
from .spline_basis import DEGREE, active_indices, septic_eval

logger = logging.getLogger(__name__)


def num_unknowns(grid: KnotGrid) -> int:
    return grid.n + 7


def _evaluate(func, x: float, what: str, where: str) -> float:
    try:
        value = float(func(x))
    except ExpressionDomainError as err:
        located = ExpressionDomainError(f"{what} failed at {where}: {err}")
        located.x = x
        raise located from err
    if not math.isfinite(value):
        raise AssemblyError(f"{what} is not finite at {where} (x={x!r})")
    return value


def collocation_row(p: LinearBvp7, grid: KnotGrid, i: int) -> AssembledRow:
    """
    Row for the ODE at x_i: B_j^(7)(x_i) - g(x_i) B_j(x_i) per active j,
    right-hand side q(x_i).
    """
    if not 0 <= i <= grid.n:
        raise AssemblyError(f"collocation index {i} outside 0..{grid.n}")
    x = grid.knot(i)
    where = f"collocation point x{i}"
    gx = _evaluate(p.g, x, "g", where)
    qx = _evaluate(p.q, x, "q", where)

    entries = {}
    for j in active_indices(x, grid):
        value = septic_eval(j, x, grid, DEGREE) - gx * septic_eval(j, x, grid, 0)
        if value != 0.0:
            entries[j] = value
    return AssembledRow(RowOrigin('collocation', i), entries, qx)


def boundary_rows(p: LinearBvp7, grid: KnotGrid) -> list[AssembledRow]:
    """
    The seven rows sum_j alpha_j B_j^(d)(x*) = k for
    (x*, d) = (a,0) (a,1) (a,2) (a,3) (b,0) (b,1) (b,2).
    """
    rows = []
    for index, ((side, order), k) in enumerate(zip(BOUNDARY_CONDITIONS, p.bc), start=1):
        x = grid.a if side == 'a' else grid.b
        entries = {}
        for j in active_indices(x, grid):
            value = septic_eval(j, x, grid, order)
            if value != 0.0:
                entries[j] = value
        rows.append(AssembledRow(RowOrigin('boundary', index), entries, k))
    return rows


def _ordered_rows(p: LinearBvp7, grid: KnotGrid, scheme: Scheme) -> list[AssembledRow]:
    boundary = boundary_rows(p, grid)
    collocation = [collocation_row(p, grid, i) for i in scheme.collocation_indices(grid.n)]
    return boundary[:4] + collocation + boundary[4:]


def assemble(p: LinearBvp7, grid: KnotGrid, scheme: Scheme = Scheme.LEAST_SQUARES) -> CollocationSystem:
    """
    Stack, equilibrate and band-pack the rows for `scheme`.

    Args:
        p: the boundary-value problem; its interval must match the grid's.
        grid: uniform knot grid on [p.a, p.b].
        scheme: which collocation rows enter the system.

    Returns:
        A CollocationSystem with rows k1..k4, the collocation rows, then
        k5..k7, each scaled to max |entry| = 1 (the scales are
        kept in `row_scales`).

    Raises:
        AssemblyError: interval mismatch, or a row that is all zero or
            not finite.
        ExpressionDomainError: g or q fails at a collocation point.
    """
    if (p.a, p.b) != (grid.a, grid.b):
        raise AssemblyError(
            f"grid [{grid.a!r}, {grid.b!r}] does not match problem interval [{p.a!r}, {p.b!r}]"
        )
    rows = _ordered_rows(p, grid, scheme)
    ncols = num_unknowns(grid)

    scales = np.empty(len(rows))
    kl = ku = 0
    for r, row in enumerate(rows):
        scale = row.max_abs
        if scale == 0.0:
            raise AssemblyError(f"row {row.origin.label} is all zero")
        if not math.isfinite(scale):
            raise AssemblyError(f"row {row.origin.label} has a non-finite entry")
        scales[r] = scale
        for j in row.entries:
            c = j + COLUMN_OFFSET
            kl = max(kl, r - c)
            ku = max(ku, c - r)

    matrix = BandMatrix(len(rows), ncols, kl, ku)
    rhs = np.empty(len(rows))
    for r, row in enumerate(rows):
        for j, value in row.entries.items():
            matrix.set(r, j + COLUMN_OFFSET, value / scales[r])
        rhs[r] = row.rhs / scales[r]

    logger.debug(
        "assembled %s system %dx%d, kl=%d, ku=%d",
        scheme.value, matrix.nrows, matrix.ncols, kl, ku,
    )
    return CollocationSystem(
        grid=grid,
        scheme=scheme,
        matrix=matrix,
        rhs=rhs,
        row_scales=scales,
        row_map=tuple(row.origin for row in rows),
    )
