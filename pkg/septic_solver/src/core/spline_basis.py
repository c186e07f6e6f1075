"""
Septic (degree 7) B-spline basis on uniform knots.

Three independent constructions of the same function:
    - bspline_by_differences: 8th forward difference of truncated powers
    - cox_de_boor: the normalized two-term recursion (B = 7! * N)
    - septic_eval: closed-form integer piece polynomials, any derivative 0..7

Basis function B_j is centred on x_j with support [x_{j-4}, x_{j+4}].
"""

import math
import sys
from typing import Optional

from numpy.polynomial import Polynomial

from ..errors import InvalidDerivativeOrderError, KnotRangeError, OutOfDomainError
from ..models import KnotGrid, Limit, OFFSETS, Stencil, uniform_grid

DEGREE = 7
FACTORIAL = math.factorial(DEGREE)  # 5040, the B = 7! * N normalization
SUPPORT_HALF_WIDTH = 4

# A point counts as sitting on a knot when it misses it by no more than
# this many ulps of the knot coordinate (in mesh units)
KNOT_SNAP_ULPS = 64

# Reference knot tables for orders 3..7, used to flag disagreements.
# The order-7 row is known to carry sign errors on its right half.
REFERENCE_STENCILS: dict[int, tuple[int, ...]] = {
    3: (0, 210, 1680, -3990, 0, 3990, -1680, -210, 0),
    4: (0, 840, 0, -7560, 13440, -7560, 0, 840, 0),
    5: (0, 2520, -10080, 12600, 0, -12600, 10080, -2520, 0),
    6: (0, 5040, -30240, 75600, -100800, 75600, -30240, 5040, 0),
    7: (0, 5040, -35280, 105840, -176400, -176400, 105840, -35280, 0),
}

# Offsets compared against REFERENCE_STENCILS; the one-sided order-7 row
# is only meaningful away from the support ends.
COMPARED_OFFSETS: dict[int, tuple[int, ...]] = {
    d: (tuple(range(-3, 4)) if d == DEGREE else OFFSETS) for d in REFERENCE_STENCILS
}


# --- Integer piece polynomials ---

def _left_piece(m: int) -> list[int]:
    """Coefficients (ascending in s) of B on [x_{j-4+m}, x_{j-3+m}], h = 1."""
    coeffs = [0] * (DEGREE + 1)
    for k in range(m + 1):
        weight = (-1) ** k * math.comb(DEGREE + 1, k)
        shift = m - k
        for power in range(DEGREE + 1):
            coeffs[power] += weight * math.comb(DEGREE, power) * shift ** (DEGREE - power)
    return coeffs


def _reflect(coeffs: list[int]) -> list[int]:
    """Coefficients of P(1 - s) given those of P(s)."""
    out = [0] * len(coeffs)
    for i, a in enumerate(coeffs):
        for power in range(i + 1):
            out[power] += a * math.comb(i, power) * (-1) ** power
    return out


def _build_pieces() -> tuple[tuple[int, ...], ...]:
    left = [_left_piece(m) for m in range(4)]
    # Right half by even symmetry about x_j
    right = [_reflect(left[DEGREE - m]) for m in range(4, 8)]
    return tuple(tuple(c) for c in left + right)


PIECE_COEFFICIENTS = _build_pieces()

# _PIECES[d][m] is the d-th derivative of piece m in the local variable s
_PIECES: tuple[tuple[Polynomial, ...], ...] = tuple(
    tuple(Polynomial(coeffs).deriv(d) for coeffs in PIECE_COEFFICIENTS)
    for d in range(DEGREE + 1)
)


def piece_coefficients() -> tuple[tuple[int, ...], ...]:
    """The eight integer piece polynomials of B (h = 1), ascending powers of s."""
    return PIECE_COEFFICIENTS


# --- Constructions ---

def truncated_power(x: float, t: float, m: int) -> float:
    """(x - t)_+^m: (x - t)^m for x >= t, else 0. m = 0 gives the unit step."""
    if not (math.isfinite(x) and math.isfinite(t)):
        raise ValueError(f"truncated_power needs finite input, got x={x!r}, t={t!r}")
    if m < 0:
        raise ValueError(f"exponent must be non-negative, got {m}")
    if x < t:
        return 0.0
    if m == 0:
        return 1.0
    return (x - t) ** m


def _support_start(i: int, m: int) -> int:
    return i - (m + 1) // 2


def bspline_by_differences(i: int, m: int, t: float, grid: KnotGrid) -> float:
    """
    B_i^m(t) = (1/h^m) * Delta^{m+1} (x_s - t)_+^m, s = i - (m+1)//2.

    Non-negative on its support; for m = 7 this is the 7! normalization.
    """
    if m < 1:
        raise ValueError(f"order must be positive, got {m}")
    start = _support_start(i, m)
    lo = grid.knot(start)
    hi = grid.knot(start + m + 1)
    if t <= lo or t >= hi:
        return 0.0
    total = 0.0
    for k in range(m + 2):
        sign = -1 if (m + 1 - k) % 2 else 1
        total += sign * math.comb(m + 1, k) * truncated_power(grid.knot(start + k), t, m)
    return total / grid.h ** m


def _ratio(num: float, den: float) -> float:
    # 0/0 terms of the recursion are defined as 0
    if den == 0.0:
        return 0.0
    return num / den


def cox_de_boor(i: int, p: int, u: float, grid: KnotGrid) -> float:
    """
    Normalized basis value N_{i,p}(u) by the Cox-de Boor recursion.

    Uses the centred index: N_{i,p} starts at knot i - (p+1)//2. The base
    case is the half-open indicator of [t_k, t_{k+1}).
    """
    if not 0 <= p <= DEGREE:
        raise ValueError(f"degree must be in 0..{DEGREE}, got {p}")
    if not grid.knot(grid.first_index) <= u <= grid.knot(grid.last_index):
        raise KnotRangeError(f"u={u!r} outside the stored knot range")
    start = _support_start(i, p)
    t = [grid.knot(start + k) for k in range(p + 2)]

    values = [1.0 if t[k] <= u < t[k + 1] else 0.0 for k in range(p + 1)]
    for q in range(1, p + 1):
        for k in range(p + 1 - q):
            left = _ratio(u - t[k], t[k + q] - t[k]) * values[k]
            right = _ratio(t[k + q + 1] - u, t[k + q + 1] - t[k + 1]) * values[k + 1]
            values[k] = left + right
    return values[0]


def septic_eval(center_j: int, x: float, grid: KnotGrid, d: int = 0,
                limit: Optional[Limit] = None) -> float:
    """
    d-th derivative of B_j at x from the closed-form pieces.

    At a knot the right-limit piece is used, except at x = b where the
    left limit keeps every row inside [a, b]. `limit` overrides that choice.
    Only d = 7 actually differs between the two sides.
    """
    if not 0 <= d <= DEGREE:
        raise InvalidDerivativeOrderError(f"derivative order must be in 0..{DEGREE}, got {d}")
    if not math.isfinite(x):
        raise OutOfDomainError(f"cannot evaluate the basis at x={x!r}")

    t = (x - grid.a) / grid.h
    u = t - (center_j - SUPPORT_HALF_WIDTH)
    k = round(u)
    snap = KNOT_SNAP_ULPS * sys.float_info.epsilon * (abs(t) + (abs(x) + abs(grid.a)) / grid.h)
    on_knot = abs(u - k) <= snap
    if on_knot:
        u = float(k)
    if u < 0.0 or u > 2 * SUPPORT_HALF_WIDTH:
        return 0.0

    if on_knot:
        global_index = center_j - SUPPORT_HALF_WIDTH + k
        side = limit or ('left' if global_index == grid.n else 'right')
        piece, s = (k, 0.0) if side == 'right' else (k - 1, 1.0)
        if not 0 <= piece <= DEGREE:
            return 0.0
    else:
        piece = math.floor(u)
        s = u - piece

    return float(_PIECES[d][piece](s)) / grid.h ** d


def active_indices(x: float, grid: KnotGrid) -> range:
    """Basis indices j whose support can be nonzero at x in [a, b]."""
    i = grid.interval_index(x)
    return range(max(-3, i - 3), min(grid.n + 3, i + 4) + 1)


# --- Stencils ---

# h = 1 grid whose knot 8 sits at 0, far from both ends
_STENCIL_GRID = uniform_grid(-8.0, 8.0, 16)
_STENCIL_CENTRE = 8


def knot_stencil(d: int, limit: Optional[Limit] = None) -> Stencil:
    """
    Dimensionless values of B^(d) at its nine support knots, via septic_eval.

    For d = 7 the value at a knot is one-sided; `limit` defaults to 'right'.
    """
    if not 0 <= d <= DEGREE:
        raise InvalidDerivativeOrderError(f"derivative order must be in 0..{DEGREE}, got {d}")
    side = (limit or 'right') if d == DEGREE else None
    values = []
    for offset in OFFSETS:
        x = _STENCIL_GRID.knot(_STENCIL_CENTRE + offset)
        v = septic_eval(_STENCIL_CENTRE, x, _STENCIL_GRID, d, limit=side or 'right')
        nearest = round(v)
        if abs(v - nearest) > 1e-6:
            raise ArithmeticError(f"stencil value {v!r} for d={d} is not an integer")
        values.append(int(nearest))
    return Stencil(deriv_order=d, values=tuple(values), limit=side)


def exact_knot_stencil(d: int, limit: Optional[Limit] = None) -> Stencil:
    """Same table as knot_stencil, computed in exact integer arithmetic."""
    if not 0 <= d <= DEGREE:
        raise InvalidDerivativeOrderError(f"derivative order must be in 0..{DEGREE}, got {d}")
    side = (limit or 'right') if d == DEGREE else None
    values = []
    for k in range(2 * SUPPORT_HALF_WIDTH + 1):
        if side == 'left':
            piece = k - 1
            if piece < 0:
                values.append(0)
                continue
            coeffs = PIECE_COEFFICIENTS[piece]
            # d-th derivative at s = 1
            values.append(sum(
                a * math.perm(power, d) for power, a in enumerate(coeffs) if power >= d
            ))
        else:
            if k > DEGREE:
                values.append(0)
                continue
            # d-th derivative at s = 0
            values.append(math.factorial(d) * PIECE_COEFFICIENTS[k][d])
    return Stencil(deriv_order=d, values=tuple(values), limit=side)


def stencil_discrepancies(stencil: Stencil) -> list[tuple[int, int, int]]:
    """(offset, computed, reference) for each compared cell that disagrees."""
    reference = REFERENCE_STENCILS.get(stencil.deriv_order)
    if reference is None:
        return []
    return [
        (offset, stencil.value_at(offset), reference[offset + 4])
        for offset in COMPARED_OFFSETS[stencil.deriv_order]
        if stencil.value_at(offset) != reference[offset + 4]
    ]
