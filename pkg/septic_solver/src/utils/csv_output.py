"""
Deterministic CSV output: 17 significant digits, '.' decimal point,
'\\n' line endings.
"""

import csv
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional, TextIO, Union

from ..models import CollocationSystem, ConvergenceReport, Stencil

FLOAT_FORMAT = '.17g'


def format_float(value: Optional[float]) -> str:
    """17 significant digits; None becomes an empty cell."""
    if value is None:
        return ''
    return format(float(value), FLOAT_FORMAT)


@contextmanager
def open_output(path: Optional[Union[str, Path]]) -> Iterator[TextIO]:
    """Yield a text stream for `path`, or stdout when path is None or '-'."""
    if path is None or str(path) == '-':
        yield sys.stdout
        return
    with open(path, 'w', encoding='utf-8', newline='') as stream:
        yield stream


def _writer(stream: TextIO):
    return csv.writer(stream, lineterminator='\n')


def write_solution(stream: TextIO, rows: list[tuple[float, float, Optional[float], Optional[float]]]) -> None:
    writer = _writer(stream)
    writer.writerow(['x', 'y_spline', 'y_exact', 'abs_error'])
    for row in rows:
        writer.writerow([format_float(v) for v in row])


def write_convergence(stream: TextIO, report: ConvergenceReport) -> None:
    writer = _writer(stream)
    writer.writerow(['n', 'h', 'max_abs_error', 'solve_residual', 'pairwise_order', 'wall_time_ms'])
    for record, order in zip(report.records, report.pairwise_orders):
        writer.writerow([
            record.n,
            format_float(record.h),
            format_float(record.max_abs_error),
            format_float(record.solve_residual),
            format_float(order),
            format(record.wall_time * 1000.0, '.3f'),
        ])
    fitted = 'nan' if report.fitted_order is None else format_float(report.fitted_order)
    stream.write(f"# fitted_order={fitted}\n")


def write_stencils(stream: TextIO, stencils: list[Stencil], notes: list[str]) -> None:
    writer = _writer(stream)
    writer.writerow(['d'] + [f'v_{offset}' for offset in range(-4, 5)])
    for stencil in stencils:
        writer.writerow(stencil.as_row())
    for note in notes:
        stream.write(f"# {note}\n")


def write_system(stream: TextIO, system: CollocationSystem) -> None:
    """Equilibrated dense matrix and rhs, one row per equation, provenance first."""
    writer = _writer(stream)
    first = -3
    header = ['row'] + [f'alpha_{first + c}' for c in range(system.num_unknowns)] + ['rhs']
    writer.writerow(header)
    dense = system.to_dense()
    for origin, values, rhs in zip(system.row_map, dense, system.rhs):
        writer.writerow([origin.label] + [format_float(v) for v in values] + [format_float(rhs)])
