# -*- coding: utf-8 -*-
"""
Shared strategies and fixtures
"""
import math

import numpy as np
import pytest
from hypothesis import strategies as st

from cfrac_spectra.hermitize import singular_value_bound
from cfrac_spectra.operators import CoefficientSource, FiniteTridiagonal


@st.composite
def tridiagonals(draw, min_dim=2, max_dim=12, hermitian=False):
    """
    Random complex tridiagonal matrices with normally distributed entries.
    The entries are drawn from a seeded generator, so that the matrices are
    irreducible and free of accidental degeneracies.
    """
    dim = draw(st.integers(min_dim, max_dim))
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    offset = draw(st.integers(-3, 3))

    def complex_normal(size):
        return rng.standard_normal(size) + 1j * rng.standard_normal(size)

    if hermitian:
        upper = complex_normal(dim - 1)
        return FiniteTridiagonal(rng.standard_normal(dim), upper, np.conj(upper), offset=offset)
    return FiniteTridiagonal(complex_normal(dim), complex_normal(dim - 1), complex_normal(dim - 1), offset=offset)


@st.composite
def matrices_with_probe(draw, min_dim=2, max_dim=12):
    """
    A random matrix together with a probe point outside of its numerical
    range, where every leading and trailing block of H - z is invertible.
    """
    matrix = draw(tridiagonals(min_dim, max_dim))
    phase = draw(st.floats(0, 2 * math.pi, allow_nan=False))
    return matrix, (singular_value_bound(matrix) + 1.) * np.exp(1j * phase)


@pytest.fixture
def terminating_source():
    """
    a_n = n, b_n = 1, c_n = 1/2 on [1, inf) with the coupling c_4 removed
    """
    return CoefficientSource(
        name='terminating',
        diagonal=lambda n: n.astype(complex),
        upper=lambda n: np.ones(len(n), dtype=complex),
        lower=lambda n: np.where(n == 4, 0., 0.5).astype(complex),
        lo=1,
        grows_up=True,
    )
