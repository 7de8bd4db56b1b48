# -*- coding: utf-8 -*-
import math

import numpy as np
import pytest
from hypothesis import given, settings

from cfrac_spectra.cfrac import BreakdownError
from cfrac_spectra.factor import (
    Layout, Normalization, factorize, left_eigenvector, polish_eigenvalue, verify, wavefunction_one_sided, wavefunction_two_sided,
)
from cfrac_spectra.operators import FiniteTridiagonal, WindowError, bose_hubbard, non_bh_k5, snapshot
from cfrac_spectra.oracle import lu_det

from conftest import matrices_with_probe


def _centers(matrix):
    return sorted({matrix.offset, matrix.offset + matrix.dim // 2, matrix.last})


@settings(max_examples=200, deadline=None)
@given(matrices_with_probe())
def test_reconstruction(case):
    matrix, z = case
    dense = matrix.to_dense() - z * np.eye(matrix.dim)
    for center in _centers(matrix):
        factors = factorize(matrix, z, center=center)
        error = np.max(np.abs(factors.reconstruct() - dense)) / (1 + matrix.max_abs())
        assert error <= 1e-12


@settings(max_examples=200, deadline=None)
@given(matrices_with_probe())
def test_determinant(case):
    matrix, z = case
    expected = lu_det(matrix, z)
    for center in _centers(matrix):
        assert abs(factorize(matrix, z, center=center).determinant() - expected) <= 1e-10 * abs(expected)


def test_factor_structure():
    matrix = FiniteTridiagonal([1, 2, 3, 4], [1, 2, 3], [4, 5, 6], offset=-1)
    factors = factorize(matrix, 0.5j, center=1)
    assert factors.layout is Layout.TWO_SIDED_CENTER
    assert factors.center == 1 and factors.offset == -1
    for triangle in (factors.upper(), factors.lower()):
        np.testing.assert_array_equal(np.diag(triangle), 1)
        assert np.linalg.det(triangle) == pytest.approx(1)
    np.testing.assert_allclose(factors.f, 1 / factors.pivots)
    assert factorize(matrix, 0.5j, center=-1).layout is Layout.ONE_SIDED
    assert factorize(matrix, 0.5j).center == 0


def test_one_sided_triangles():
    matrix = FiniteTridiagonal([1, 2, 3], [1, 2], [4, 5])
    factors = factorize(matrix, 0.25, center=0)
    assert np.allclose(np.tril(factors.upper(), -1), 0)
    assert np.allclose(np.triu(factors.lower(), 1), 0)


def test_factorize_breakdown():
    matrix = FiniteTridiagonal([1, 0], [1], [1])
    with pytest.raises(BreakdownError):
        factorize(matrix, 0., center=0)
    with pytest.raises(WindowError):
        factorize(matrix, 0., center=2)


def test_wavefunction_two_level():
    matrix = snapshot(bose_hubbard(1, 0.5))
    energy = math.sqrt(0.75)
    for psi in (wavefunction_one_sided(matrix, energy), wavefunction_two_sided(matrix, energy)):
        assert psi.offset == -1
        assert psi.residual < 1e-12
    psi = wavefunction_two_sided(matrix, energy)
    assert psi.normalization is Normalization.PSI0
    assert psi.values[1] == 1
    assert wavefunction_one_sided(matrix, energy).normalization is Normalization.PSI1


def test_left_equals_right_for_complex_symmetric():
    matrix = snapshot(bose_hubbard(2, 0.5))
    energy = 2 * math.sqrt(0.75)
    right = wavefunction_two_sided(matrix, energy)
    left = left_eigenvector(matrix, energy)
    np.testing.assert_allclose(left.values, right.values, rtol=1e-13)
    assert left.residual < 1e-12


def test_left_eigenvector_of_general_matrix():
    matrix = FiniteTridiagonal([1, 2j, -1], [1, 0.5], [2, 1j])
    energy = complex(np.linalg.eigvals(matrix.to_dense())[0])
    energy = polish_eigenvalue(matrix, energy, center=0, steps=3)
    phi = left_eigenvector(matrix, energy, center=0)
    assert phi.residual < 1e-10
    assert verify(matrix, phi, energy, left=False).residual > 1e-6


def test_polish_eigenvalue():
    matrix = non_bh_k5(0.5)
    exact = complex(np.linalg.eigvals(matrix.to_dense())[0])
    polished = polish_eigenvalue(matrix, exact + 1e-5, center=matrix.offset, steps=5)
    assert abs(polished - exact) < 1e-10


def test_wavefunction_with_vanishing_center_entry():
    # E = 0 of the three-level model at gamma = 0 has the eigenvector (1, 0, -1)
    matrix = snapshot(bose_hubbard(2, 0.))
    with pytest.raises(BreakdownError):
        factorize(matrix, 0.)
    psi = wavefunction_two_sided(matrix, 0.)
    assert psi.normalization is Normalization.PEAK
    np.testing.assert_allclose(psi.values, [1, 0, -1], atol=1e-14)
    assert psi.residual < 1e-14
    psi = wavefunction_one_sided(matrix, 0.)
    assert psi.normalization is Normalization.PSI1
    np.testing.assert_allclose(psi.values, [1, 0, -1], atol=1e-14)
    assert left_eigenvector(matrix, 0.).residual < 1e-14


def test_polish_eigenvalue_next_to_a_pole():
    # the secular function matched at row 0 has a pole at the eigenvalue 0
    matrix = snapshot(bose_hubbard(2, 0.))
    assert abs(polish_eigenvalue(matrix, 1e-9, center=0, steps=3)) < 1e-13
    assert abs(polish_eigenvalue(matrix, 0., center=0)) < 1e-13


def _zoo_eigenpairs():
    for n_bosons in range(1, 11):
        for gamma in (0., 0.3, 0.7):
            matrix = snapshot(bose_hubbard(n_bosons, gamma))
            for k in range(n_bosons + 1):
                yield f'bose-hubbard-{n_bosons}-{gamma}-{k}', matrix, (n_bosons - 2 * k) * math.sqrt(1 - gamma**2)


@pytest.mark.parametrize('name, matrix, energy', list(_zoo_eigenpairs()), ids=[name for name, _, _ in _zoo_eigenpairs()])
def test_one_and_two_sided_wavefunctions_agree(name, matrix, energy):  # pylint: disable=unused-argument
    limit = 1e-8 * (1 + matrix.max_abs())
    one = wavefunction_one_sided(matrix, energy)
    two = wavefunction_two_sided(matrix, energy)
    assert one.residual <= limit
    assert two.residual <= limit
    overlap = abs(np.vdot(one.values, two.values))
    assert overlap >= (1 - 1e-8) * np.linalg.norm(one.values) * np.linalg.norm(two.values)


@pytest.mark.parametrize('matrix', [snapshot(bose_hubbard(4, 0.5)), FiniteTridiagonal([1, 2j, -1, 0.5], [1, 0.5, 2], [2, 1j, -1])], ids=['bose-hubbard', 'general'])
def test_left_and_right_eigenvectors_are_biorthogonal(matrix):
    energies = np.linalg.eigvals(matrix.to_dense())
    right = [np.asarray(wavefunction_two_sided(matrix, energy).values) for energy in energies]
    left = [np.asarray(left_eigenvector(matrix, energy).values) for energy in energies]
    for i, phi in enumerate(left):
        for j, psi in enumerate(right):
            scale = np.linalg.norm(phi) * np.linalg.norm(psi)
            if i == j:
                assert abs(phi @ psi) > 1e-6 * scale
            else:
                assert abs(phi @ psi) <= 1e-8 * scale
