# -*- coding: utf-8 -*-
import numpy as np
import pytest
from hypothesis import given, settings

from cfrac_spectra.hermitize import (
    BlockSecular, Mat2, SearchInterval, assemble, block_form, double, evaluate_block, inertia_count, interleave_permutation,
    mcf_ascend, mcf_descend, permutation_matrix, relative_determinant, secular_block, singular_value_bound, singular_values,
)
from cfrac_spectra.operators import FiniteTridiagonal, WindowError, bose_hubbard, non_bh_k5, singh_like_source, snapshot
from cfrac_spectra.oracle import jacobi_eigen, svd_oracle

from conftest import tridiagonals


def test_mat2_algebra():
    a = np.array([[1, 2j], [3, 4]])
    b = np.array([[0.5, -1], [1j, 2]])
    left, right = Mat2.from_array(a), Mat2.from_array(b)
    np.testing.assert_allclose((left @ right).to_array(), a @ b)
    np.testing.assert_allclose((left + right).to_array(), a + b)
    np.testing.assert_allclose((left - right).to_array(), a - b)
    np.testing.assert_allclose((2 * left).to_array(), 2 * a)
    np.testing.assert_allclose(left.inverse().to_array(), np.linalg.inv(a))
    np.testing.assert_allclose(left.adjoint.to_array(), a.conj().T)
    assert left.det() == pytest.approx(np.linalg.det(a))
    assert left.trace() == 5
    np.testing.assert_allclose(left.shift(1.).to_array(), a - np.eye(2))
    np.testing.assert_allclose((left @ Mat2.identity()).to_array(), a)


def test_mat2_stack():
    sigma = np.array([0., 0.5, 2.])
    stack = Mat2.from_array([[0, 1], [1, 0]]).shift(sigma)
    array = stack.to_array()
    assert array.shape == (2, 2, 3)
    np.testing.assert_allclose(array[:, :, 2], [[-2, 1], [1, -2]])
    np.testing.assert_array_equal(stack.negative_count(), [1, 1, 2])


def test_mat2_singular_inverse():
    inverse = Mat2(1., 1., 1., 1.).inverse(eps=1e-14)
    assert np.all(np.isnan(inverse.to_array()))
    inverse = Mat2(1e-8, 0., 0., 1e-8).inverse()
    np.testing.assert_allclose(inverse.to_array(), 1e8 * np.eye(2))


def test_mat2_negative_count():
    assert Mat2(2., 0., 0., 3.).negative_count() == 0
    assert Mat2(-2., 1j, -1j, 3.).negative_count() == 1
    assert Mat2(-2., 0.5, 0.5, -3.).negative_count() == 2
    assert Mat2(-1., 0., 0., 0.).negative_count() == 1
    assert Mat2(0., 0., 0., 1.).negative_count() == 0
    assert Mat2(0., 0., 0., 0.).negative_count() == 0
    assert Mat2(1., 1j, -1j, 2.).is_hermitian()
    assert not Mat2(1., 1j, 1j, 2.).is_hermitian()


def test_interleave_permutation_of_two():
    np.testing.assert_array_equal(interleave_permutation(2), [0, 2, 1, 3])
    with pytest.raises(ValueError):
        interleave_permutation(0)


@settings(max_examples=100, deadline=None)
@given(tridiagonals())
def test_doubled_spectrum_is_symmetric(matrix):
    doubled = double(matrix)
    eigenvalues = jacobi_eigen(doubled)
    np.testing.assert_allclose(eigenvalues, -eigenvalues[::-1], atol=1e-10 * (1 + matrix.max_abs()))


@settings(max_examples=100, deadline=None)
@given(tridiagonals())
def test_interleaving_gives_block_tridiagonal(matrix):
    permutation = permutation_matrix(interleave_permutation(matrix.dim))
    permuted = permutation.T @ double(matrix) @ permutation
    blocks = block_form(matrix.to_source())
    np.testing.assert_array_equal(permuted, assemble(blocks, matrix.offset, matrix.last))
    for k in matrix.indices:
        assert blocks.A(k).to_array()[0, 0] == 0 and blocks.A(k).to_array()[1, 1] == 0
        if k < matrix.last:
            np.testing.assert_array_equal(blocks.C(k + 1).to_array(), blocks.B(k).adjoint.to_array())


def test_mcf_branches_match_dense_inverse():
    matrix = FiniteTridiagonal([1, 2j, -1, 0.5], [1, 0.5, 2], [2, 1j, -1], offset=-1)
    blocks = block_form(matrix.to_source())
    sigma = 0.37
    dense = assemble(blocks, -1, 2) - sigma * np.eye(8)
    f_down, evaluation = mcf_descend(blocks, sigma, start=0)
    np.testing.assert_allclose(f_down.to_array(), np.linalg.inv(dense[2:, 2:])[:2, :2], rtol=1e-12)
    assert evaluation.depth_down == 3
    f_up, evaluation = mcf_ascend(blocks, sigma, start=1)
    np.testing.assert_allclose(f_up.to_array(), np.linalg.inv(dense[:6, :6])[-2:, -2:], rtol=1e-12)
    assert evaluation.depth_up == 3
    secular, determinant = secular_block(blocks, sigma, center=0)
    np.testing.assert_allclose(secular.to_array(), np.linalg.inv(np.linalg.inv(dense)[2:4, 2:4]), rtol=1e-10)
    assert isinstance(determinant, float)


def test_mcf_outside_window():
    blocks = block_form(snapshot(bose_hubbard(2, 0.5)).to_source())
    with pytest.raises(WindowError):
        mcf_descend(blocks, 0.5, start=3)


def test_inertia_counts_eigenvalues():
    matrix = non_bh_k5(0.7)
    blocks = block_form(matrix.to_source())
    sigma = svd_oracle(matrix)
    gap = int(np.argmax(np.diff(sigma)))
    between = 0.5 * (sigma[gap] + sigma[gap + 1])
    assert inertia_count(blocks, between) == matrix.dim + gap + 1
    assert inertia_count(blocks, 1.01 * singular_value_bound(matrix)) == 2 * matrix.dim
    assert BlockSecular(blocks).inertia(between) == matrix.dim + gap + 1


def test_singular_values_closed_form():
    result = singular_values(bose_hubbard(1, 0.3))
    np.testing.assert_allclose(result.values().real, [0.7, 1.3], atol=1e-10)
    assert result.count_by_inertia == 2
    assert not result.warnings


def test_singular_value_at_a_singular_pivot():
    # sigma = 0.5 = |a_k| makes the pivot of the single-row branch singular
    blocks = block_form(bose_hubbard(1, 0.5))
    assert evaluate_block(blocks, 0.5).conditioning < 1e-12
    assert evaluate_block(blocks, 0.7).conditioning > 1e-3
    result = singular_values(bose_hubbard(1, 0.5))
    np.testing.assert_allclose(result.values().real, [0.5, 1.5], atol=1e-10)
    assert [root.multiplicity_hint for root in result.roots] == [1, 1]
    assert result.count_by_inertia == result.total_multiplicity == 2


def test_degenerate_and_zero_singular_values():
    result = singular_values(bose_hubbard(4, 0.))
    assert result.roots[0].z == 0
    np.testing.assert_allclose(result.values().real, [0, 2, 4], atol=1e-10)
    assert [root.multiplicity_hint for root in result.roots] == [1, 2, 2]
    assert result.count_by_inertia == 5
    result = singular_values(bose_hubbard(3, 0.))
    np.testing.assert_allclose(result.values(expand=True).real, [1, 1, 3, 3], atol=1e-10)


def test_singular_values_need_finite_window():
    with pytest.raises(WindowError):
        singular_values(singh_like_source())
    with pytest.raises(ValueError):
        singular_values(bose_hubbard(1, 0.5), search=SearchInterval(-1., 1., 100))


def test_singular_values_on_subinterval():
    result = singular_values(bose_hubbard(1, 0.5), search=SearchInterval(1., 2., 500))
    np.testing.assert_allclose(result.values().real, [1.5], atol=1e-10)
    assert result.count_by_inertia == 1


def _zoo():
    for n_bosons in range(1, 11):
        for gamma in (0., 0.3, 0.7):
            yield f'bose-hubbard-{n_bosons}-{gamma}', snapshot(bose_hubbard(n_bosons, gamma))
    for gamma in (0., 0.3, 0.7):
        yield f'non-bh-k5-{gamma}', non_bh_k5(gamma)


@pytest.mark.parametrize('name, matrix', list(_zoo()), ids=[name for name, _ in _zoo()])
def test_singular_values_match_oracle(name, matrix):  # pylint: disable=unused-argument
    result = singular_values(matrix.to_source())
    found = np.sort(result.values(expand=True).real)
    expected = svd_oracle(matrix)
    assert len(found) == len(expected)
    np.testing.assert_allclose(found, expected, atol=1e-8)
    assert result.count_by_inertia == result.total_multiplicity == matrix.dim
    assert len(np.unique(result.values().real)) == len(result.roots)


@settings(max_examples=25, deadline=None)
@given(tridiagonals(hermitian=True))
def test_hermitian_singular_values_are_absolute_eigenvalues(matrix):
    result = singular_values(matrix.to_source())
    expected = np.sort(np.abs(jacobi_eigen(matrix.to_dense())))
    found = np.sort(result.values(expand=True).real)
    assert len(found) == len(expected)
    np.testing.assert_allclose(found, expected, atol=1e-9 * max(1., matrix.max_abs()))


@settings(max_examples=50, deadline=None)
@given(tridiagonals(min_dim=2, max_dim=10))
def test_matrix_fractions_stay_hermitian(matrix):
    blocks = block_form(matrix.to_source())
    sigma = 0.37 * singular_value_bound(matrix)
    for f, _ in (mcf_descend(blocks, sigma, start=matrix.offset), mcf_ascend(blocks, sigma, start=matrix.last)):
        array = f.to_array()
        np.testing.assert_allclose(array, array.conj().T, rtol=0, atol=1e-10 * np.max(np.abs(array)))


@settings(max_examples=50, deadline=None)
@given(tridiagonals(min_dim=3, max_dim=10))
def test_block_determinant_factorizes_at_the_center(matrix):
    blocks = block_form(matrix.to_source())
    sigma = 0.37 * singular_value_bound(matrix)
    center = matrix.offset + matrix.dim // 2

    def det(lo, hi):
        dense = assemble(blocks, lo, hi)
        return np.linalg.det(dense - sigma * np.eye(len(dense))).real

    _, determinant = secular_block(blocks, sigma, center=center)
    expected = det(matrix.offset, matrix.last)
    assert determinant * det(center + 1, matrix.last) * det(matrix.offset, center - 1) == pytest.approx(expected, rel=1e-6)


def test_relative_determinant():
    assert relative_determinant(Mat2(1., 0., 0., 1.)) == pytest.approx(1.)
    assert relative_determinant(Mat2(1e-3, 0., 0., 1.)) == pytest.approx(2e-3, rel=1e-5)
    assert relative_determinant(Mat2(0., 0., 0., 0.)) == 0
