from .grid import KnotGrid, uniform_grid, EXTENSION, MIN_INTERVALS
from .stencil import Stencil, Limit, OFFSETS
from .band_matrix import BandMatrix
from .problem import LinearBvp7, ProblemDocument, BOUNDARY_CONDITIONS
from .system import Scheme, RowOrigin, AssembledRow, CollocationSystem, COLUMN_OFFSET
from .solution import (
    SolverChoice, SolveResult, SplineSolution, ErrorReport,
    ConvergenceRecord, ConvergenceReport, SampleKind, QUALITY_THRESHOLD, NORMAL_CONDITION_LIMIT,
)
from .settings import CliConfig, COMMANDS

__all__ = [
    'KnotGrid', 'uniform_grid', 'EXTENSION', 'MIN_INTERVALS',
    'Stencil', 'Limit', 'OFFSETS',
    'BandMatrix',
    'LinearBvp7', 'ProblemDocument', 'BOUNDARY_CONDITIONS',
    'Scheme', 'RowOrigin', 'AssembledRow', 'CollocationSystem', 'COLUMN_OFFSET',
    'SolverChoice', 'SolveResult', 'SplineSolution', 'ErrorReport',
    'ConvergenceRecord', 'ConvergenceReport', 'SampleKind', 'QUALITY_THRESHOLD', 'NORMAL_CONDITION_LIMIT',
    'CliConfig', 'COMMANDS',
]
