from .csv_output import (
    format_float, open_output, write_solution, write_convergence,
    write_stencils, write_system, FLOAT_FORMAT,
)

__all__ = [
    'format_float', 'open_output', 'write_solution', 'write_convergence',
    'write_stencils', 'write_system', 'FLOAT_FORMAT',
]
