# -*- coding: utf-8 -*-
import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings

from cfrac_spectra.cfrac import (
    CfOptions, DepthGrowth, SecularFunction, SecularMode, ascend, default_center, descend, detect_termination, one_sided_green,
    recurrence, secular_one_sided, secular_two_sided,
)
from cfrac_spectra.operators import CoefficientSource, FiniteTridiagonal, WindowError, bose_hubbard, free_lattice_source, singh_like_source

from conftest import matrices_with_probe


def test_recurrence_two_levels():
    z = 0.3 + 0.2j
    branch = recurrence(np.array([1., 2.]), np.array([0.5]), z, 1e-14)
    assert branch.f == pytest.approx(1 / (1 - z - 0.5 / (2 - z)))
    assert not branch.breakdown
    assert branch.pivots is None


def test_recurrence_vectorized():
    z = np.array([0.1, 0.2j, -1.5])
    branch = recurrence(np.array([1., 2., 3.]), np.array([0.5, 0.25]), z, 1e-14, keep_pivots=True)
    assert branch.f.shape == z.shape
    assert branch.pivots.shape == (3, 3)
    np.testing.assert_allclose(branch.f, 1 / branch.pivots[0])


def test_recurrence_breakdown():
    branch = recurrence(np.array([0., 1.]), np.array([1.]), 1., 1e-14)
    assert branch.breakdown


def test_cf_options():
    options = CfOptions(depth_growth='fixed')
    assert options.depth_growth is DepthGrowth.FIXED
    with pytest.raises(ValueError):
        CfOptions(tol_tail=0.)
    with pytest.raises(ValueError):
        CfOptions(max_depth=0)
    with pytest.raises(ValueError):
        CfOptions(depth_growth='tripling')


def test_default_center():
    assert default_center(bose_hubbard(4, 0.5)) == 0
    assert default_center(singh_like_source()) == 1


@settings(max_examples=100, deadline=None)
@given(matrices_with_probe())
def test_green_function_identity(case):
    matrix, z = case
    source = matrix.to_source()
    resolvent = np.linalg.inv(matrix.to_dense() - z * np.eye(matrix.dim))
    for center in (matrix.offset, matrix.last, matrix.offset + matrix.dim // 2):
        evaluation = secular_two_sided(source, z, center=center)
        position = center - matrix.offset
        assert evaluation.value == pytest.approx(1 / resolvent[position, position], rel=1e-9)
        assert evaluation.converged and evaluation.tail_estimate == 0


@settings(max_examples=100, deadline=None)
@given(matrices_with_probe())
def test_log_det_is_determinant(case):
    matrix, z = case
    evaluation = secular_two_sided(matrix.to_source(), z, center=matrix.offset + matrix.dim // 2)
    expected = np.linalg.det(matrix.to_dense() - z * np.eye(matrix.dim))
    assert np.exp(evaluation.log_det) == pytest.approx(expected, rel=1e-9)


@settings(max_examples=50, deadline=None)
@given(matrices_with_probe(min_dim=3))
def test_descend_and_ascend(case):
    matrix, z = case
    source = matrix.to_source()
    dense = matrix.to_dense() - z * np.eye(matrix.dim)
    f_down, evaluation = descend(source, z, start=matrix.offset + 1)
    assert f_down == pytest.approx(np.linalg.inv(dense[1:, 1:])[0, 0], rel=1e-9)
    assert evaluation.value == pytest.approx(1 / f_down)
    assert evaluation.depth_down == matrix.dim - 1 and evaluation.depth_up == 0
    f_up, evaluation = ascend(source, z, start=matrix.last - 1)
    assert f_up == pytest.approx(np.linalg.inv(dense[:-1, :-1])[-1, -1], rel=1e-9)
    assert evaluation.depth_up == matrix.dim - 1


def test_branch_outside_window():
    source = bose_hubbard(2, 0.5)
    with pytest.raises(WindowError):
        descend(source, 0.1, start=2)
    with pytest.raises(WindowError):
        ascend(source, 0.1, start=-2)
    with pytest.raises(WindowError):
        secular_two_sided(source, 0.1, center=5)


def test_reflection_invariance():
    source = bose_hubbard(4, 0.3)
    z = np.array([0.2 + 0.1j, -1.3 + 0.4j])
    np.testing.assert_allclose(secular_two_sided(source.reflected(), z, center=-1).value, secular_two_sided(source, z, center=1).value, rtol=1e-12)


def test_one_sided_is_edge_centered():
    matrix = FiniteTridiagonal([1, 2, 3], [1, 1], [2, 2], offset=1)
    source = matrix.to_source()
    z = 0.5 + 0.5j
    assert secular_one_sided(source, z).value == pytest.approx(secular_two_sided(source, z, center=1).value)
    assert one_sided_green(source, z) == pytest.approx(1 / secular_one_sided(source, z).value)
    with pytest.raises(WindowError):
        one_sided_green(bose_hubbard(2, 0.5), z)


def test_secular_function_handle():
    source = FiniteTridiagonal([0., 0.], [1.], [1.]).to_source()
    secular = SecularFunction(source)
    assert secular.center == 0 and secular.mode is SecularMode.TWO_SIDED
    # the single pivot below the center vanishes at z = 0
    assert np.isnan(secular(0.))
    assert secular(2.) == pytest.approx(-2 - 1 / -2)
    values = secular(np.array([1j, 2.]))
    assert values.shape == (2,)
    assert secular.characteristic(2.) == pytest.approx(3.)


def test_secular_function_through_a_tiny_pivot():
    source = FiniteTridiagonal([0., 0., 0.], [math.sqrt(2), math.sqrt(2)], [math.sqrt(2), math.sqrt(2)]).to_source()
    secular = SecularFunction(source, center=0)
    assert secular.evaluate(1e-20).breakdown
    assert secular(1e-20) == pytest.approx(-2e-20, rel=1e-12)


def test_secular_function_one_sided():
    source = bose_hubbard(2, 0.5)
    secular = SecularFunction(source, mode='one-sided')
    assert secular.center == -1
    with pytest.raises(WindowError):
        SecularFunction(free_lattice_source().reflected(), mode=SecularMode.ONE_SIDED)


def test_fixed_depth_reports_tail():
    options = CfOptions(depth_growth=DepthGrowth.FIXED, fixed_depth=64, max_depth=1000)
    f_1, evaluation = descend(singh_like_source(), 0.5, options)
    assert evaluation.depth_down == 64
    assert math.isfinite(abs(f_1))
    assert evaluation.tail_estimate > 0


def test_singh_like_depth_convergence():
    f_1, evaluation = descend(singh_like_source(), 0.5 + 0.5j)
    assert evaluation.converged
    assert evaluation.tail_estimate < 1e-12
    deeper, _ = descend(singh_like_source(), 0.5 + 0.5j, CfOptions(initial_depth=2 * evaluation.depth_down))
    assert abs(deeper - f_1) < 1e-12


def test_free_lattice_divergence_is_reported(caplog):
    options = CfOptions(max_depth=2048)
    with caplog.at_level(logging.WARNING):
        _, evaluation = descend(free_lattice_source(), 0.5, options)
    assert not evaluation.converged
    assert evaluation.depth_down == 2048
    assert 'did not converge' in caplog.text


def test_detect_termination(terminating_source):
    assert detect_termination(terminating_source, 10) == 3
    assert detect_termination(terminating_source, 2) is None
    assert detect_termination(singh_like_source(), 50) is None
    with pytest.raises(WindowError):
        detect_termination(bose_hubbard(4, 0.5), 10)


def test_detect_termination_threshold():
    source = CoefficientSource(
        name='nearly terminating',
        diagonal=lambda n: n.astype(complex),
        upper=lambda n: np.ones(len(n), dtype=complex),
        lower=lambda n: np.where(n == 4, 1e-18, 1.).astype(complex),
        lo=1,
    )
    assert detect_termination(source, 10) is None
    assert detect_termination(source, 10, eps=1e-15) == 3


def test_termination_decouples_the_tail(terminating_source):
    head = FiniteTridiagonal([1, 2, 3], [1, 1], [0.5, 0.5], offset=1).to_source()
    z = np.array([0.3 + 0.1j, 2.5 - 1j])
    np.testing.assert_allclose(secular_one_sided(terminating_source, z).value, secular_one_sided(head, z).value, rtol=1e-13)


def test_detect_termination_inside_finite_window():
    source = bose_hubbard(4, 0.5)
    assert detect_termination(source, 2) is None
    assert detect_termination(source, 2, eps=2.5) == -2


def test_alternatives_move_the_matching_row():
    source = bose_hubbard(4, 0.)
    alternatives = SecularFunction(source).alternatives()
    assert [alternative.center for alternative in alternatives] == [1, -1]
    assert all(alternative.mode is SecularMode.TWO_SIDED for alternative in alternatives)
    one_sided = SecularFunction(source, mode=SecularMode.ONE_SIDED).alternatives()
    assert [alternative.center for alternative in one_sided] == [0, -1]
    assert SecularFunction(source, center=2).alternatives()[0].center == 1


def test_characteristic_vanishes_where_the_secular_function_has_a_pole():
    # the eigenvector of E = 0 vanishes in row 0
    source = bose_hubbard(2, 0.)
    secular = SecularFunction(source)
    z = 1e-6 + 1e-6j
    assert abs(secular(z)) > 1e4
    assert abs(secular.characteristic(z)) < 1e-4
    assert abs(secular.alternatives()[0](z)) < 1e-4
