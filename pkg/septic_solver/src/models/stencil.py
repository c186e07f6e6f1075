from dataclasses import dataclass
from typing import Literal, Optional

Limit = Literal['left', 'right']

# Offsets of the nine support knots relative to the centre
OFFSETS: tuple[int, ...] = tuple(range(-4, 5))
_OPPOSITE = {'left': 'right', 'right': 'left'}


@dataclass(frozen=True)
class Stencil:
    """
    Values of B^(d) at the nine support knots x_{j-4} ... x_{j+4}, scaled by h^d.

    At h = 1 the values are integers. `limit` names the one-sided limit used
    for d = 7 and is None for the continuous orders.
    """
    deriv_order: int
    values: tuple[int, ...]
    limit: Optional[Limit] = None

    def __post_init__(self):
        if len(self.values) != len(OFFSETS):
            raise ValueError(f"stencil needs {len(OFFSETS)} values, got {len(self.values)}")

    def value_at(self, offset: int) -> int:
        """Value at knot x_{j+offset}."""
        return self.values[offset + 4]

    def mirrored(self) -> 'Stencil':
        """Reflect about the centre: reverse, and negate for odd orders."""
        sign = -1 if self.deriv_order % 2 else 1
        flipped = _OPPOSITE.get(self.limit)
        return Stencil(
            deriv_order=self.deriv_order,
            values=tuple(sign * v for v in reversed(self.values)),
            limit=flipped,
        )

    @property
    def is_symmetric(self) -> bool:
        """Even/odd symmetry about the centre; d = 7 is never, see mirrored()."""
        if self.deriv_order == 7:
            return False
        return self.mirrored().values == self.values

    def as_row(self) -> list[int]:
        return [self.deriv_order, *self.values]
