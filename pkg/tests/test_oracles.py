import numpy as np
import pytest

from qpbeam.errors import DenseCapError
from qpbeam.fourier import NormSpec, galerkin_project, sobolev_norm, zero_field
from qpbeam.linear_solvers import DiagonalSymbol, linearized_apply
from qpbeam.oracles import (
    basis_vector_to_field,
    field_to_basis_vector,
    finite_difference_check,
    galerkin_basis,
    linearized_matrix,
    random_field,
    solve_dense,
)

EPS = 0.0375
DELTA = 0.05


def norm0s(u, s=2.0):
    return sobolev_norm(u, NormSpec(0.0, s))


class TestDenseLinearized:
    def test_zero_v_is_diagonal(self, box, omega):
        matrix, basis = linearized_matrix(zero_field(box), omega, EPS, box.cutoff)
        symbol = DiagonalSymbol(EPS, 0.0, tuple(omega.values), DELTA)
        diag = np.array([symbol.value(k, j) for k, j in basis])
        off = matrix - np.diag(diag)
        assert float(np.abs(off).max()) < 1e-14

    def test_matrix_vector_matches_operator(self, box, omega, rng):
        v = random_field(box, rng, support=3, norm=0.3)
        matrix, basis = linearized_matrix(v, omega, EPS, box.cutoff)
        h = galerkin_project(
            random_field(box, rng, support=8, norm=1.0), box.cutoff, "low"
        )
        vec = field_to_basis_vector(h, basis)
        op = linearized_apply(v, omega, EPS, box.cutoff)
        applied = op(h)
        image = matrix @ vec
        reconstructed = basis_vector_to_field(box, basis, image)
        assert norm0s(reconstructed - applied) < 1e-12 * max(1.0, norm0s(applied))

    def test_conjugate_pattern(self, box, omega, rng):
        # reality: entries pair up under simultaneous mode negation
        v = random_field(box, rng, support=2, norm=0.3)
        matrix, basis = linearized_matrix(v, omega, EPS, 4)
        index = {mode: i for i, mode in enumerate(basis)}
        for a, (k1, j1) in enumerate(basis[:40]):
            for b, (k2, j2) in enumerate(basis[:40]):
                neg_a = index[(tuple(-x for x in k1), tuple(-x for x in j1))]
                neg_b = index[(tuple(-x for x in k2), tuple(-x for x in j2))]
                assert matrix[neg_a, neg_b] == pytest.approx(
                    np.conj(matrix[a, b]), abs=1e-13
                )

    def test_cap_enforced(self):
        from qpbeam.fourier import TruncationBox

        wide = TruncationBox(2, 1, 16, 2)
        with pytest.raises(DenseCapError):
            galerkin_basis(wide, 16, (16,))


class TestDenseSolve:
    def test_identity(self):
        rhs = np.array([1.0, 2.0, 3.0], dtype=complex)
        assert np.allclose(solve_dense(np.eye(3, dtype=complex), rhs), rhs)

    def test_diagonal_matches_invert_diagonal(self, box, omega, rng):
        from qpbeam.linear_solvers import invert_diagonal

        symbol = DiagonalSymbol(EPS, 0.0, tuple(omega.values), DELTA)
        basis = galerkin_basis(box, 4, (1,))
        matrix = np.diag([symbol.value(k, j) for k, j in basis])
        h = galerkin_project(random_field(box, rng, support=4, norm=1.0), 4, "low")
        dense = basis_vector_to_field(
            box, basis, solve_dense(matrix, field_to_basis_vector(h, basis))
        )
        fast = invert_diagonal(symbol, h)
        assert norm0s(dense - fast) < 1e-12

    def test_singular_matrix_raises(self):
        singular = np.zeros((2, 2), dtype=complex)
        with pytest.raises(np.linalg.LinAlgError):
            solve_dense(singular, np.array([1.0, 0.0], dtype=complex))


class TestFiniteDifference:
    def test_richardson_sweep(self, box, omega, rng):
        v = random_field(box, rng, support=3, norm=0.6)
        h = random_field(box, rng, support=3, norm=0.5)
        errors = [finite_difference_check(v, h, omega, t) for t in (1e-3, 2.5e-4)]
        ratio = errors[0] / errors[1]
        assert 12.0 <= ratio <= 20.0

    def test_zero_base_exact(self, box, omega, rng):
        h = random_field(box, rng, support=3, norm=0.5)
        # DN(0)[h] = 0 and the central difference of a cubic at 0 is t^2-exact
        err = finite_difference_check(zero_field(box), h, omega, 1e-5)
        assert err < 1e-6

    def test_zero_direction_exact(self, box, omega, rng):
        v = random_field(box, rng, support=3, norm=0.5)
        assert finite_difference_check(v, zero_field(box), omega, 1e-4) == 0.0
