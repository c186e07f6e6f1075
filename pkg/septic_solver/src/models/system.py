from dataclasses import dataclass, field
from enum import Enum
from typing import Literal

import numpy as np

from .band_matrix import BandMatrix
from .grid import KnotGrid

# Unknown alpha_j (j = -3 ... n+3) sits in column j + COLUMN_OFFSET
COLUMN_OFFSET = 3


class Scheme(Enum):
    """Which collocation rows enter the system."""
    LEAST_SQUARES = 'least_squares'            # all n+1 collocation rows, n+8 x n+7
    SQUARE_DROP_FIRST = 'square_drop_first'    # omit the row at x_0
    SQUARE_DROP_LAST = 'square_drop_last'      # omit the row at x_n

    @property
    def is_square(self) -> bool:
        return self is not Scheme.LEAST_SQUARES

    def collocation_indices(self, n: int) -> range:
        if self is Scheme.SQUARE_DROP_FIRST:
            return range(1, n + 1)
        if self is Scheme.SQUARE_DROP_LAST:
            return range(0, n)
        return range(0, n + 1)


@dataclass(frozen=True)
class RowOrigin:
    """Logical identity of an assembled row."""
    kind: Literal['boundary', 'collocation']
    index: int     # k-index 1..7 for boundary rows, i for the point x_i

    @property
    def label(self) -> str:
        return f"k{self.index}" if self.kind == 'boundary' else f"x{self.index}"


@dataclass
class AssembledRow:
    """One equation before equilibration: sum_j entries[j] * alpha_j = rhs."""
    origin: RowOrigin
    entries: dict[int, float]  # basis index j -> coefficient
    rhs: float

    @property
    def max_abs(self) -> float:
        return max((abs(v) for v in self.entries.values()), default=0.0)

    @property
    def span(self) -> int:
        """Number of columns between the first and last nonzero, inclusive."""
        if not self.entries:
            return 0
        return max(self.entries) - min(self.entries) + 1


@dataclass(frozen=True, eq=False)
class CollocationSystem:
    """
    Equilibrated system A alpha = X.

    Row r of `matrix` and `rhs` has been divided by row_scales[r].
    """
    grid: KnotGrid
    scheme: Scheme
    matrix: BandMatrix
    rhs: np.ndarray = field(repr=False)
    row_scales: np.ndarray = field(repr=False)
    row_map: tuple[RowOrigin, ...] = field(repr=False)

    @property
    def num_rows(self) -> int:
        return self.matrix.nrows

    @property
    def num_unknowns(self) -> int:
        return self.matrix.ncols

    def to_dense(self) -> np.ndarray:
        return self.matrix.to_dense()

    def row_index(self, origin: RowOrigin) -> int:
        return self.row_map.index(origin)
