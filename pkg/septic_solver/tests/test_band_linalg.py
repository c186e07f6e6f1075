import numpy as np
import pytest
import scipy.linalg

from src.core.assembly import assemble
from src.core.band_linalg import (
    _ldlt_solve,
    band_lu_solve,
    band_qr_solve,
    dense_solve_oracle,
    normal_solve,
    solve_system,
)
from src.core.problems import example1
from src.core.selftest import random_band_system
from src.errors import BandStructureError, RankDeficientError, SingularMatrixError
from src.models import NORMAL_CONDITION_LIMIT, BandMatrix, Scheme, SolverChoice, uniform_grid


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)


def _poisson(size: int) -> BandMatrix:
    dense = 2.0 * np.eye(size) - np.eye(size, k=1) - np.eye(size, k=-1)
    return BandMatrix.from_dense(dense, 1, 1)


def _tall(rng, size=20, kl=3, ku=2):
    """Square banded system plus one extra in-band row."""
    _, dense, rhs = random_band_system(rng, size, kl, ku)
    extra = np.zeros((1, size))
    extra[0, size - kl:] = rng.uniform(-1.0, 1.0, kl)
    tall = np.vstack([dense, extra])
    return BandMatrix.from_dense(tall, kl, ku), tall, np.append(rhs, rng.uniform(-1.0, 1.0))


class TestBandMatrix:

    def test_storage_layout(self):
        matrix = BandMatrix(5, 5, kl=1, ku=2)
        matrix.set(3, 2, 7.0)
        matrix.set(1, 3, -2.0)
        assert matrix.storage[matrix.ku + 1, 2] == 7.0
        assert matrix.storage[matrix.ku - 2, 3] == -2.0
        assert matrix.get(3, 2) == 7.0
        assert matrix.get(4, 0) == 0.0

    def test_write_outside_band(self):
        matrix = BandMatrix(5, 5, kl=1, ku=1)
        with pytest.raises(BandStructureError, match="outside the band"):
            matrix.set(3, 0, 1.0)

    def test_index_outside_matrix(self):
        with pytest.raises(IndexError):
            BandMatrix(3, 3, 1, 1).get(3, 0)

    def test_dense_conversion(self, rng):
        band, dense, _ = random_band_system(rng, 12, 3, 2)
        np.testing.assert_array_equal(band.to_dense(), dense)
        again = BandMatrix.from_dense(band.to_dense(), 3, 2)
        np.testing.assert_array_equal(again.storage, band.storage)

    def test_out_of_band_dense_entries_are_zero(self, rng):
        band, _, _ = random_band_system(rng, 10, 2, 1)
        dense = band.to_dense()
        for i in range(10):
            for j in range(10):
                if not band.in_band(i, j):
                    assert dense[i, j] == 0.0

    def test_rectangular(self):
        matrix = BandMatrix(6, 4, kl=2, ku=1)
        assert matrix.shape == (6, 4)
        assert not matrix.is_square
        assert matrix.row_columns(5) == range(3, 4)

    def test_matvec(self, rng):
        band, dense, rhs = random_band_system(rng, 15, 2, 4)
        np.testing.assert_allclose(band.matvec(rhs), dense @ rhs, rtol=1e-14, atol=1e-14)

    def test_bad_shapes(self):
        with pytest.raises(BandStructureError):
            BandMatrix(0, 3, 1, 1)
        with pytest.raises(BandStructureError):
            BandMatrix(3, 3, -1, 1)
        with pytest.raises(BandStructureError):
            BandMatrix(3, 3, 1, 1, storage=np.zeros((2, 3)))


class TestBandLU:

    def test_identity(self):
        identity = BandMatrix.from_dense(np.eye(6), 0, 0)
        rhs = np.arange(6.0)
        np.testing.assert_array_equal(band_lu_solve(identity, rhs), rhs)

    def test_poisson(self):
        x = band_lu_solve(_poisson(10), np.ones(10))
        i = np.arange(1, 11)
        np.testing.assert_allclose(x, i * (11 - i) / 2, rtol=1e-12)
        np.testing.assert_allclose(x, dense_solve_oracle(_poisson(10).to_dense(), np.ones(10)), rtol=1e-12)

    def test_needs_pivoting(self):
        swap = BandMatrix.from_dense(np.array([[0.0, 1.0], [1.0, 0.0]]), 1, 1)
        np.testing.assert_allclose(band_lu_solve(swap, [3.0, 5.0]), [5.0, 3.0])

    def test_does_not_modify_input(self):
        matrix = _poisson(6)
        before = matrix.storage.copy()
        band_lu_solve(matrix, np.ones(6))
        np.testing.assert_array_equal(matrix.storage, before)

    def test_zero_matrix(self):
        with pytest.raises(SingularMatrixError) as info:
            band_lu_solve(BandMatrix(4, 4, 1, 1), np.ones(4))
        assert info.value.pivot_index == 0

    def test_singular(self):
        dense = np.array([[1.0, 2.0, 0.0], [2.0, 4.0, 0.0], [0.0, 1.0, 1.0]])
        with pytest.raises(SingularMatrixError):
            band_lu_solve(BandMatrix.from_dense(dense, 1, 1), np.ones(3))

    def test_rejects_rectangular(self):
        with pytest.raises(BandStructureError, match="square"):
            band_lu_solve(BandMatrix(5, 4, 1, 1), np.ones(5))

    def test_rhs_length(self):
        with pytest.raises(ValueError, match="length 4"):
            band_lu_solve(_poisson(4), np.ones(3))

    def test_random_systems_match_dense(self, rng):
        for _ in range(100):
            size = int(rng.integers(2, 51))
            kl = int(rng.integers(0, min(8, size - 1) + 1))
            ku = int(rng.integers(0, min(8, size - 1) + 1))
            band, dense, rhs = random_band_system(rng, size, kl, ku)
            reference = dense_solve_oracle(dense, rhs)
            x = band_lu_solve(band, rhs)
            assert np.max(np.abs(x - reference)) <= 1e-10 * np.max(np.abs(reference))

    def test_matches_scipy_banded_solver(self, rng):
        band, _, rhs = random_band_system(rng, 30, 7, 6)
        expected = scipy.linalg.solve_banded((7, 6), band.storage, rhs)
        np.testing.assert_allclose(band_lu_solve(band, rhs), expected, rtol=1e-12, atol=1e-14)

    def test_singular_pivot_index(self):
        dense = np.diag([2.0, 1.0, 0.0, 3.0])
        with pytest.raises(SingularMatrixError) as info:
            band_lu_solve(BandMatrix.from_dense(dense, 1, 1), np.ones(4))
        assert info.value.pivot_index == 2


class TestLeastSquares:

    @pytest.mark.parametrize("solve", [band_qr_solve, normal_solve])
    def test_square_matches_lu(self, rng, solve):
        for _ in range(20):
            size = int(rng.integers(2, 40))
            band, _, rhs = random_band_system(rng, size, 3, 5)
            expected = band_lu_solve(band, rhs)
            result = solve(band, rhs)
            np.testing.assert_allclose(result.x, expected, rtol=1e-8, atol=1e-12)
            assert result.residual_norm <= 1e-10 * np.linalg.norm(rhs)

    @pytest.mark.parametrize("solve", [band_qr_solve, normal_solve])
    def test_duplicated_row_is_consistent(self, rng, solve):
        _, dense, rhs = random_band_system(rng, 20, 3, 2)
        tall = np.vstack([dense, dense[-1:]])
        band = BandMatrix.from_dense(tall, 4, 2)
        result = solve(band, np.append(rhs, rhs[-1]))
        np.testing.assert_allclose(result.x, dense_solve_oracle(dense, rhs), rtol=1e-8, atol=1e-12)
        assert result.residual_norm <= 1e-10 * np.linalg.norm(rhs)

    @pytest.mark.parametrize("solve", [band_qr_solve, normal_solve])
    def test_matches_dense_least_squares(self, rng, solve):
        band, tall, rhs = _tall(rng)
        expected, *_ = scipy.linalg.lstsq(tall, rhs)
        result = solve(band, rhs)
        np.testing.assert_allclose(result.x, expected, rtol=1e-8, atol=1e-12)
        np.testing.assert_allclose(result.residual_norm, np.linalg.norm(tall @ expected - rhs), rtol=1e-6)

    @pytest.mark.parametrize("solve", [band_qr_solve, normal_solve])
    def test_zero_column(self, rng, solve):
        _, dense, rhs = random_band_system(rng, 10, 2, 2)
        dense[:, 4] = 0.0
        tall = np.vstack([dense, np.zeros((1, 10))])
        with pytest.raises(RankDeficientError) as info:
            solve(BandMatrix.from_dense(tall, 2, 2), np.append(rhs, 0.0))
        assert info.value.column == 4

    @pytest.mark.parametrize("solve", [band_qr_solve, normal_solve])
    def test_rejects_wide(self, solve):
        with pytest.raises(BandStructureError, match="nrows >= ncols"):
            solve(BandMatrix(3, 4, 1, 1), np.ones(3))

    def test_qr_reports_method(self, rng):
        band, _, rhs = random_band_system(rng, 8, 1, 1)
        result = band_qr_solve(band, rhs)
        assert result.method == 'band-qr'
        assert not result.used_fallback
        assert result.condition_estimate is None

    def test_normal_condition_estimate_on_well_conditioned_system(self, rng):
        band, _, rhs = random_band_system(rng, 30, 3, 3)
        result = normal_solve(band, rhs)
        expected = np.linalg.cond(band.to_dense()) ** 2
        assert 0.01 * expected <= result.condition_estimate <= 1.01 * expected
        assert not result.ill_conditioned

    def test_normal_flags_ill_conditioned_system(self):
        dense = np.diag([1.0, 1e-6, 1.0])
        result = normal_solve(BandMatrix.from_dense(dense, 1, 1), np.ones(3))
        assert result.condition_estimate > NORMAL_CONDITION_LIMIT
        assert result.ill_conditioned
        np.testing.assert_allclose(result.x, [1.0, 1e6, 1.0], rtol=1e-6)

    def test_ldlt_on_banded_spd(self, rng):
        size, w = 12, 3
        _, dense, rhs = random_band_system(rng, size, w, 0)
        spd = dense @ dense.T
        upper = np.zeros((2 * w + 1, size))
        for p in range(size):
            for q in range(p, min(size, p + 2 * w + 1)):
                upper[2 * w + p - q, q] = spd[p, q]
        x = _ldlt_solve(upper, rhs, tol=1e-14)
        np.testing.assert_allclose(x, np.linalg.solve(spd, rhs), rtol=1e-9)


class TestDenseOracle:

    def test_diagonal(self):
        np.testing.assert_allclose(dense_solve_oracle([[2.0, 0.0], [0.0, 4.0]], [2.0, 8.0]), [1.0, 2.0])

    def test_singular(self):
        with pytest.raises(SingularMatrixError):
            dense_solve_oracle([[1.0, 2.0], [2.0, 4.0]], [1.0, 1.0])

    def test_underdetermined(self):
        with pytest.raises(ValueError, match="underdetermined"):
            dense_solve_oracle(np.ones((2, 3)), np.ones(2))

    def test_tall_rank_deficient(self):
        with pytest.raises(RankDeficientError):
            dense_solve_oracle(np.ones((4, 2)), np.ones(4))


class TestSolveSystem:

    @pytest.fixture
    def square_system(self):
        return assemble(example1(), uniform_grid(0.0, 1.0, 16), Scheme.SQUARE_DROP_LAST)

    @pytest.fixture
    def ls_system(self):
        return assemble(example1(), uniform_grid(0.0, 1.0, 16))

    def test_square_solvers_agree(self, square_system):
        lu = solve_system(square_system, SolverChoice.BAND_LU)
        dense = solve_system(square_system, SolverChoice.DENSE)
        assert lu.method == 'band-lu'
        np.testing.assert_allclose(lu.x, dense.x, rtol=1e-6, atol=1e-9 * np.max(np.abs(dense.x)))
        assert lu.residual_norm <= 1e-8 * np.linalg.norm(square_system.rhs)

    def test_least_squares_solvers_agree(self, ls_system):
        qr = solve_system(ls_system, SolverChoice.BAND_QR)
        dense = solve_system(ls_system, SolverChoice.DENSE)
        np.testing.assert_allclose(qr.x, dense.x, rtol=1e-6, atol=1e-9 * np.max(np.abs(dense.x)))

    def test_band_lu_rejects_least_squares(self, ls_system):
        with pytest.raises(BandStructureError):
            solve_system(ls_system, SolverChoice.BAND_LU)
