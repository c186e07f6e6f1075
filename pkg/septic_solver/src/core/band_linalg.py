"""
Solvers for band-stored systems.

    band_lu_solve      square, LAPACK banded LU with partial pivoting
    band_qr_solve      least squares, Givens rotations row by row
    normal_solve       least squares via banded A^T A (Cholesky, LDL^T fallback)
    dense_solve_oracle dense reference used by tests and --solver dense
"""

import logging
import math
import warnings

import numpy as np
import scipy.linalg
import scipy.linalg.lapack

from ..errors import BandStructureError, RankDeficientError, SingularMatrixError
from ..models import NORMAL_CONDITION_LIMIT, BandMatrix, CollocationSystem, SolveResult, SolverChoice

logger = logging.getLogger(__name__)

PIVOT_TOLERANCE = 1e-14
RANK_TOLERANCE = 1e-14
INVERSE_ITERATION_STEPS = 4


def _as_rhs(A: BandMatrix, rhs) -> np.ndarray:
    b = np.array(rhs, dtype=float)
    if b.shape != (A.nrows,):
        raise ValueError(f"right-hand side of length {A.nrows} expected, got shape {b.shape}")
    return b


def residual_norm(A: BandMatrix, x: np.ndarray, rhs: np.ndarray) -> float:
    return float(np.linalg.norm(A.matvec(x) - rhs))


# --- Square: banded LU ---

def band_lu_solve(A: BandMatrix, rhs) -> np.ndarray:
    """
    Solve A x = rhs for square band A with LAPACK's banded LU (dgbtrf/dgbtrs).

    Args:
        A: square band matrix; it is copied, never modified.
        rhs: right-hand side of length A.nrows.

    Returns:
        The solution vector x.

    Raises:
        BandStructureError: A is not square.
        SingularMatrixError: a pivot of U is at most PIVOT_TOLERANCE * max|A|;
            `pivot_index` names the first such column.
    """
    if not A.is_square:
        raise BandStructureError(f"band LU needs a square matrix, got {A.nrows}x{A.ncols}")
    b = _as_rhs(A, rhs)
    kl, ku = A.kl, A.ku

    # kl extra leading rows take the fill that row interchanges create
    ab = np.zeros((2 * kl + ku + 1, A.ncols))
    ab[kl:, :] = A.storage
    lu, piv, info = scipy.linalg.lapack.dgbtrf(ab, kl, ku)
    if info < 0:
        raise BandStructureError(f"dgbtrf rejected argument {-info}")

    pivots = np.abs(lu[kl + ku])
    tol = PIVOT_TOLERANCE * A.max_abs()
    small = np.flatnonzero(pivots <= tol)
    if len(small):
        k = int(small[0])
        raise SingularMatrixError(
            f"matrix is singular to working precision at pivot {k} "
            f"(|pivot| = {pivots[k]:.3g}, tolerance {tol:.3g})",
            pivot_index=k,
        )
    x, info = scipy.linalg.lapack.dgbtrs(lu, kl, ku, b, piv)
    if info < 0:
        raise BandStructureError(f"dgbtrs rejected argument {-info}")
    return x


# --- Least squares: Givens QR ---

def band_qr_solve(A: BandMatrix, rhs) -> SolveResult:
    """
    Least-squares solution of A x ~ rhs (nrows >= ncols) by rotating each
    row of A into an upper-band R of width kl + ku.
    """
    if A.nrows < A.ncols:
        raise BandStructureError(f"least squares needs nrows >= ncols, got {A.nrows}x{A.ncols}")
    b = _as_rhs(A, rhs)
    n = A.ncols
    width = A.kl + A.ku
    R = np.zeros((n, width + 1))  # R[c, t] holds R_{c, c+t}
    d = np.zeros(n)

    for i in range(A.nrows):
        cols = A.row_columns(i)
        if not len(cols):
            continue
        v = np.zeros(n)
        j = np.arange(cols.start, cols.stop)
        v[j] = A.storage[A.ku + i - j, j]
        beta = b[i]
        last = cols.stop - 1
        c = cols.start
        while c <= last:
            if v[c] != 0.0:
                stop = min(n, c + width + 1)
                length = stop - c
                r_row = R[c, :length].copy()
                v_seg = v[c:stop].copy()
                radius = math.hypot(r_row[0], v_seg[0])
                cs, sn = r_row[0] / radius, v_seg[0] / radius
                R[c, :length] = cs * r_row + sn * v_seg
                v[c:stop] = -sn * r_row + cs * v_seg
                v[c] = 0.0
                d[c], beta = cs * d[c] + sn * beta, -sn * d[c] + cs * beta
                last = max(last, stop - 1)
            c += 1

    diagonal = np.abs(R[:, 0])
    scale = float(diagonal.max())
    weakest = int(np.argmin(diagonal))
    if scale == 0.0 or diagonal[weakest] <= RANK_TOLERANCE * scale:
        raise RankDeficientError(
            f"least-squares matrix is rank deficient at column {weakest} "
            f"(|R_cc| = {diagonal[weakest]:.3g}, largest {scale:.3g})",
            column=weakest,
        )

    x = np.zeros(n)
    for c in range(n - 1, -1, -1):
        stop = min(n, c + width + 1)
        total = d[c] - R[c, 1:stop - c] @ x[c + 1:stop]
        x[c] = total / R[c, 0]
    return SolveResult(x=x, residual_norm=residual_norm(A, x, b), method='band-qr')


# --- Least squares: normal equations ---

def _normal_equations(A: BandMatrix, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """A^T A in scipy's upper band form (entry (p, q), p <= q, at [w + p - q, q]) and A^T b."""
    n = A.ncols
    w = A.kl + A.ku
    upper = np.zeros((w + 1, n))
    atb = np.zeros(n)
    for i in range(A.nrows):
        cols = A.row_columns(i)
        if not len(cols):
            continue
        j = np.arange(cols.start, cols.stop)
        values = A.storage[A.ku + i - j, j]
        atb[j] += values * b[i]
        for t, p in enumerate(j):
            q = j[t:]
            upper[w + p - q, q] += values[t] * values[t:]
    return upper, atb


def _ldlt_solve(upper: np.ndarray, rhs: np.ndarray, tol: float) -> np.ndarray:
    """Banded L D L^T without pivoting; pivots <= tol mean rank deficiency."""
    w = upper.shape[0] - 1
    n = upper.shape[1]
    L = np.zeros((n, w + 1))  # L[i, i - m] holds L_{i, m}; unit diagonal implied
    d = np.zeros(n)

    for k in range(n):
        ms = np.arange(max(0, k - w), k)
        d[k] = upper[w, k] - np.sum(L[k, k - ms] ** 2 * d[ms])
        if d[k] <= tol:
            raise RankDeficientError(
                f"normal equations are rank deficient at column {k} (pivot {d[k]:.3g})",
                column=k,
            )
        for i in range(k + 1, min(n - 1, k + w) + 1):
            ms_i = np.arange(max(0, i - w), k)
            total = upper[w + k - i, i] - np.sum(L[i, i - ms_i] * L[k, k - ms_i] * d[ms_i])
            L[i, i - k] = total / d[k]

    z = np.zeros(n)
    for k in range(n):
        ms = np.arange(max(0, k - w), k)
        z[k] = rhs[k] - L[k, k - ms] @ z[ms]
    y = z / d
    x = np.zeros(n)
    for k in range(n - 1, -1, -1):
        rows = np.arange(k + 1, min(n - 1, k + w) + 1)
        x[k] = y[k] - L[rows, rows - k] @ x[rows]
    return x


def _inverse_norm_estimate(factor: np.ndarray) -> float:
    """Lower bound on ||(A^T A)^-1||_2 from a few steps of inverse iteration."""
    v = np.random.default_rng(0).standard_normal(factor.shape[1])
    v /= np.linalg.norm(v)
    growth = 0.0
    for _ in range(INVERSE_ITERATION_STEPS):
        v = scipy.linalg.cho_solve_banded((factor, False), v)
        growth = float(np.linalg.norm(v))
        if not math.isfinite(growth) or growth == 0.0:
            break
        v /= growth
    return growth


def normal_solve(A: BandMatrix, rhs) -> SolveResult:
    """
    Least squares through the banded normal equations A^T A x = A^T rhs.

    Tries Cholesky first; when a pivot is not positive it falls back to
    LDL^T, which reports rank deficiency instead of failing obscurely.
    The result carries a condition estimate of A^T A and is flagged
    ill_conditioned past NORMAL_CONDITION_LIMIT or whenever LDL^T ran.
    """
    if A.nrows < A.ncols:
        raise BandStructureError(f"least squares needs nrows >= ncols, got {A.nrows}x{A.ncols}")
    b = _as_rhs(A, rhs)
    upper, atb = _normal_equations(A, b)
    w = upper.shape[0] - 1
    tol = RANK_TOLERANCE * float(upper[w].max())

    used_fallback = False
    condition = None
    try:
        factor = scipy.linalg.cholesky_banded(upper, lower=False)
    except np.linalg.LinAlgError:
        logger.warning("Cholesky of the normal equations failed, falling back to LDL^T")
        x = _ldlt_solve(upper, atb, tol)
        used_fallback = True
    else:
        pivots = factor[w] ** 2
        weakest = int(np.argmin(pivots))
        if pivots[weakest] <= tol:
            raise RankDeficientError(
                f"normal equations are rank deficient at column {weakest} "
                f"(pivot {pivots[weakest]:.3g}, tolerance {tol:.3g})",
                column=weakest,
            )
        x = scipy.linalg.cho_solve_banded((factor, False), atb)
        condition = float(upper[w].max()) * _inverse_norm_estimate(factor)
    result = SolveResult(
        x=x, residual_norm=residual_norm(A, x, b), method='normal',
        used_fallback=used_fallback, condition_estimate=condition,
    )
    if result.ill_conditioned:
        logger.warning(
            "normal equations are ill-conditioned (estimate %s, limit %.0e); prefer band-qr",
            'n/a' if condition is None else f"{condition:.3g}", NORMAL_CONDITION_LIMIT,
        )
    return result


# --- Dense oracle ---

def dense_solve_oracle(A, rhs) -> np.ndarray:
    """
    Dense reference: LU with partial pivoting for square A,
    scipy least squares for tall A.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(rhs, dtype=float)
    nrows, ncols = A.shape
    if nrows < ncols:
        raise ValueError(f"system is underdetermined ({nrows}x{ncols})")
    if nrows == ncols:
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', scipy.linalg.LinAlgWarning)
            lu, piv = scipy.linalg.lu_factor(A)
        pivots = np.abs(np.diag(lu))
        weakest = int(np.argmin(pivots))
        tol = PIVOT_TOLERANCE * float(np.max(np.abs(A)))
        if pivots[weakest] <= tol:
            raise SingularMatrixError(
                f"matrix is singular to working precision at pivot {weakest}",
                pivot_index=weakest,
            )
        return scipy.linalg.lu_solve((lu, piv), b)
    x, _, rank, _ = scipy.linalg.lstsq(A, b)
    if rank < ncols:
        raise RankDeficientError(f"least-squares matrix has rank {rank} < {ncols}")
    return x


def solve_system(system: CollocationSystem, solver: SolverChoice) -> SolveResult:
    """Solve an assembled system with the chosen solver."""
    A = system.matrix
    b = system.rhs
    logger.debug("solving %dx%d system with %s", A.nrows, A.ncols, solver.value)
    if solver is SolverChoice.BAND_QR:
        return band_qr_solve(A, b)
    if solver is SolverChoice.NORMAL:
        return normal_solve(A, b)
    if solver is SolverChoice.BAND_LU:
        x = band_lu_solve(A, b)
    else:
        x = dense_solve_oracle(A.to_dense(), b)
    return SolveResult(x=x, residual_norm=residual_norm(A, x, b), method=solver.value)
