# -*- coding: utf-8 -*-
"""
Dense reference algorithms used to verify the continued-fraction engines. They
share no code path with the engines they check: the determinant is computed by
an LU decomposition with partial pivoting, eigenvalues of Hermitian matrices
by cyclic complex Jacobi rotations and singular values by one-sided Jacobi
rotations of the columns.
"""
import logging
import math

import numpy as np

from .operators import FiniteTridiagonal
from .roots import RootOptions, SearchRegion, certify_roots, grid_seed, refine_seeds

MAX_ORACLE_DIM = 64
JACOBI_TOLERANCE = 1e-13
HERMITIAN_TOLERANCE = 1e-12
MAX_SWEEPS = 100

_logger = logging.getLogger(__name__)


class OracleSizeError(ValueError):
    """
    Raised if a dense reference computation is requested for a matrix larger
    than MAX_ORACLE_DIM.
    """


def as_dense(m):
    """
    Convert a `FiniteTridiagonal` or an array-like to a square complex numpy
    array of dimension at most MAX_ORACLE_DIM.
    """
    matrix = m.to_dense() if isinstance(m, FiniteTridiagonal) else np.array(m, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f'Expected a square matrix, got shape {matrix.shape}')
    if matrix.shape[0] > MAX_ORACLE_DIM:
        raise OracleSizeError(f'Dense oracle supports dimensions up to {MAX_ORACLE_DIM}, got {matrix.shape[0]}')
    return matrix.astype(complex)


def lu_det(m, z=0.):
    """
    det(m - z) by Gaussian elimination with partial pivoting. Returns 0 for a
    singular matrix.
    """
    work = as_dense(m)
    dim = len(work)
    work = work - complex(z) * np.eye(dim)
    det = complex(1.)
    for col in range(dim):
        pivot_row = col + int(np.argmax(np.abs(work[col:, col])))
        if work[pivot_row, col] == 0:
            return 0j
        if pivot_row != col:
            work[[col, pivot_row]] = work[[pivot_row, col]]
            det = -det
        det *= work[col, col]
        factors = work[col + 1:, col] / work[col, col]
        work[col + 1:, col:] -= np.outer(factors, work[col, col:])
    return det


def cofactor_det(m):
    """
    The determinant by Laplace expansion along the first row, for dims <= 4.
    """
    matrix = as_dense(m)
    dim = len(matrix)
    if dim > 4:
        raise OracleSizeError(f'Cofactor expansion is limited to dimension 4, got {dim}')
    if dim == 1:
        return complex(matrix[0, 0])
    total = 0j
    for col in range(dim):
        minor = np.delete(np.delete(matrix, 0, axis=0), col, axis=1)
        total += (-1)**col * matrix[0, col] * cofactor_det(minor)
    return total


def determinant_handle(m):
    """
    The function z -> det(m - z) for scalars and numpy arrays of z.
    """
    matrix = as_dense(m)
    return np.vectorize(lambda z: lu_det(matrix, z), otypes=[complex])


def _disc_region(matrix, nx, ny):
    radii = np.sum(np.abs(matrix), axis=1) - np.abs(np.diag(matrix))
    centers = np.diag(matrix)
    re_min, re_max = np.min(centers.real - radii), np.max(centers.real + radii)
    im_min, im_max = np.min(centers.imag - radii), np.max(centers.imag + radii)
    pad = 0.1 * max(re_max - re_min, im_max - im_min) or 0.1 * max(1., float(np.max(np.abs(centers))))
    return SearchRegion(re_min - pad, re_max + pad, im_min - pad, im_max + pad, nx, ny)


def det_scan_spectrum(m, region=None, options=None):
    """
    Eigenvalues from the zeros of det(m - z): grid seeding and Newton
    refinement on the LU determinant. The default region is the box around
    the Gershgorin discs.
    """
    matrix = as_dense(m)
    options = RootOptions() if options is None else options
    region = _disc_region(matrix, 101, 101) if region is None else region
    handle = determinant_handle(matrix)
    scale = np.prod(np.maximum(1., np.abs(np.diag(matrix))))

    def normalized(z):
        return handle(z) / scale

    roots = refine_seeds(normalized, grid_seed(normalized, region), region, options)
    result = certify_roots(normalized, region, roots, options)
    _logger.debug('Determinant scan found %(count)d eigenvalues.', {'count': len(result.roots)})
    return result


def _off_diagonal_norm(matrix):
    return math.sqrt(max(float(np.sum(np.abs(matrix)**2) - np.sum(np.abs(np.diag(matrix))**2)), 0.))


def _rotation(app, aqq, apq):
    """
    The unitary 2x2 rotation R with (R^+ [[app, apq], [apq*, aqq]] R)_pq = 0
    """
    magnitude = abs(apq)
    phase = apq / magnitude
    theta = 0.5 * math.atan2(2 * magnitude, (aqq - app).real)
    cos, sin = math.cos(theta), math.sin(theta)
    return np.array([[cos, sin], [-sin * np.conj(phase), cos * np.conj(phase)]])


def _jacobi_sweeps(matrix):
    norm = float(np.linalg.norm(matrix))
    if np.max(np.abs(matrix - matrix.conj().T), initial=0.) > HERMITIAN_TOLERANCE * max(1., norm):
        raise ValueError('Jacobi eigensolver requires a Hermitian matrix')
    work = 0.5 * (matrix + matrix.conj().T)
    dim = len(work)
    for sweep in range(MAX_SWEEPS):
        if _off_diagonal_norm(work) <= JACOBI_TOLERANCE * norm:
            _logger.debug('Jacobi converged after %(sweeps)d sweeps.', {'sweeps': sweep})
            break
        for p in range(dim - 1):
            for q in range(p + 1, dim):
                magnitude = abs(work[p, q])
                if magnitude == 0:
                    continue
                rotation = _rotation(work[p, p], work[q, q], work[p, q])
                work[:, [p, q]] = work[:, [p, q]] @ rotation
                work[[p, q], :] = rotation.conj().T @ work[[p, q], :]
                work[p, q] = work[q, p] = 0
    else:
        _logger.warning('Jacobi eigensolver did not converge within %(sweeps)d sweeps.', {'sweeps': MAX_SWEEPS})
    return np.sort(np.diag(work).real)


def jacobi_eigen(m):
    """
    The eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations,
    sorted ascending.

    Raises
    ------
    ValueError
        If the matrix is not Hermitian.
    """
    return _jacobi_sweeps(as_dense(m))


def svd_oracle(h):
    """
    The singular values of h, sorted ascending, by one-sided Jacobi rotations.
    Every rotation is the Jacobi rotation of h^+ h for a pair of columns, but
    it is applied to the columns of h, so h^+ h is never formed. Once all
    columns are orthogonal, the singular values are the column norms.
    """
    work = as_dense(h).copy()
    dim = work.shape[1]
    floor = dim * np.finfo(float).eps * float(np.sum(np.abs(work)**2))
    for sweep in range(MAX_SWEEPS):
        rotated = False
        for p in range(dim - 1):
            for q in range(p + 1, dim):
                alpha = float(np.vdot(work[:, p], work[:, p]).real)
                beta = float(np.vdot(work[:, q], work[:, q]).real)
                gamma = np.vdot(work[:, p], work[:, q])
                if abs(gamma) <= max(JACOBI_TOLERANCE * math.sqrt(alpha * beta), floor):
                    continue
                work[:, [p, q]] = work[:, [p, q]] @ _rotation(alpha, beta, gamma)
                rotated = True
        if not rotated:
            _logger.debug('One-sided Jacobi converged after %(sweeps)d sweeps.', {'sweeps': sweep})
            break
    else:
        _logger.warning('One-sided Jacobi did not converge within %(sweeps)d sweeps.', {'sweeps': MAX_SWEEPS})
    return np.sort(np.linalg.norm(work, axis=0))
