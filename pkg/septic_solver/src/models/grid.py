import math
from dataclasses import dataclass

from ..errors import InvalidGridError, KnotRangeError

# Extension knots stored on each side of [a, b]
EXTENSION = 7
MIN_INTERVALS = 8


@dataclass(frozen=True)
class KnotGrid:
    """
    Uniform knot sequence x_{-7} ... x_{n+7} on [a, b] with spacing h.

    Knot i lives at knots[i + EXTENSION]; x_0 == a and x_n == b exactly.
    """
    a: float
    b: float
    n: int
    h: float
    knots: tuple[float, ...]

    @property
    def first_index(self) -> int:
        return -EXTENSION

    @property
    def last_index(self) -> int:
        return self.n + EXTENSION

    def knot(self, i: int) -> float:
        """Return x_i, raising KnotRangeError outside the stored range."""
        if not self.first_index <= i <= self.last_index:
            raise KnotRangeError(
                f"knot index {i} outside stored range "
                f"[{self.first_index}, {self.last_index}]"
            )
        return self.knots[i + EXTENSION]

    def interior_knots(self) -> tuple[float, ...]:
        """The collocation points x_0 ... x_n."""
        return self.knots[EXTENSION:EXTENSION + self.n + 1]

    def midpoints(self) -> tuple[float, ...]:
        inner = self.interior_knots()
        return tuple(0.5 * (left + right) for left, right in zip(inner, inner[1:]))

    def contains(self, x: float) -> bool:
        return self.a <= x <= self.b

    def interval_index(self, x: float) -> int:
        """Index i of the interval [x_i, x_{i+1}) holding x, clamped to 0..n-1."""
        i = math.floor((x - self.a) / self.h)
        i = min(max(i, 0), self.n - 1)
        # floor may land one off next to a knot
        if x < self.knot(i) and i > 0:
            i -= 1
        elif i < self.n - 1 and x >= self.knot(i + 1):
            i += 1
        return i


def uniform_grid(a: float, b: float, n: int) -> KnotGrid:
    """
    Build the uniform grid on [a, b] with n sub-intervals.

    Knots come from index arithmetic (a + i*h), never repeated addition,
    with x_0 and x_n pinned to a and b.
    """
    if isinstance(n, bool) or not isinstance(n, int):
        raise InvalidGridError(f"n must be an integer, got {n!r}")
    if not (math.isfinite(a) and math.isfinite(b)):
        raise InvalidGridError(f"endpoints must be finite, got a={a!r}, b={b!r}")
    if b <= a:
        raise InvalidGridError(f"need b > a, got a={a!r}, b={b!r}")
    if n < MIN_INTERVALS:
        raise InvalidGridError(
            f"n must be at least {MIN_INTERVALS} (seven boundary rows plus an "
            f"interior collocation row), got n={n}"
        )

    a = float(a)
    b = float(b)
    h = (b - a) / n
    knots = [a + i * h for i in range(-EXTENSION, n + EXTENSION + 1)]
    knots[EXTENSION] = a
    knots[EXTENSION + n] = b
    return KnotGrid(a=a, b=b, n=n, h=h, knots=tuple(knots))
