from dataclasses import dataclass, field

import numpy as np

from ..errors import BandStructureError


@dataclass(eq=False)
class BandMatrix:
    """
    Band-stored matrix in LAPACK general-band layout.

    Logical entry (i, j) with -ku <= i - j <= kl lives at
    storage[ku + i - j, j]. Works for rectangular (tall) matrices too.
    """
    nrows: int
    ncols: int
    kl: int      # lower bandwidth
    ku: int      # upper bandwidth
    storage: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if min(self.nrows, self.ncols) <= 0:
            raise BandStructureError(f"empty shape {self.nrows}x{self.ncols}")
        if self.kl < 0 or self.ku < 0:
            raise BandStructureError(f"bandwidths must be non-negative, got kl={self.kl}, ku={self.ku}")
        shape = (self.kl + self.ku + 1, self.ncols)
        if self.storage is None:
            self.storage = np.zeros(shape)
        elif self.storage.shape != shape:
            raise BandStructureError(f"storage shape {self.storage.shape} does not match {shape}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def in_band(self, i: int, j: int) -> bool:
        return -self.ku <= i - j <= self.kl

    def _check_index(self, i: int, j: int) -> None:
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(f"entry ({i}, {j}) outside {self.nrows}x{self.ncols} matrix")

    def get(self, i: int, j: int) -> float:
        self._check_index(i, j)
        if not self.in_band(i, j):
            return 0.0
        return float(self.storage[self.ku + i - j, j])

    def set(self, i: int, j: int, value: float) -> None:
        self._check_index(i, j)
        if not self.in_band(i, j):
            raise BandStructureError(
                f"entry ({i}, {j}) lies outside the band (kl={self.kl}, ku={self.ku})"
            )
        self.storage[self.ku + i - j, j] = value

    def row_columns(self, i: int) -> range:
        """Columns that row i can occupy."""
        return range(max(0, i - self.kl), min(self.ncols, i + self.ku + 1))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.storage))) if self.storage.size else 0.0

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.nrows, self.ncols))
        for i in range(self.nrows):
            for j in self.row_columns(i):
                dense[i, j] = self.storage[self.ku + i - j, j]
        return dense

    @classmethod
    def from_dense(cls, dense: np.ndarray, kl: int, ku: int) -> 'BandMatrix':
        dense = np.asarray(dense, dtype=float)
        nrows, ncols = dense.shape
        matrix = cls(nrows, ncols, kl, ku)
        for i, j in zip(*np.nonzero(dense)):
            matrix.set(int(i), int(j), dense[i, j])
        return matrix

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.ncols,):
            raise ValueError(f"vector of length {self.ncols} expected, got shape {x.shape}")
        out = np.zeros(self.nrows)
        for i in range(self.nrows):
            cols = self.row_columns(i)
            if len(cols):
                j = np.arange(cols.start, cols.stop)
                out[i] = self.storage[self.ku + i - j, j] @ x[j]
        return out
