# -*- coding: utf-8 -*-
"""
The explicit factorization H - z = U F L of a finite tridiagonal matrix into
unit bidiagonal factors U, L and the diagonal F = diag(1/f_k), and the
recurrent reconstruction of right and left eigenvectors from it.

Rows at or below the center row are treated by the downward fraction, rows
above it by the upward one. With the center in the first row this is the
one-sided layout.
"""
from collections import namedtuple
from enum import Enum, unique
import logging

import numpy as np

from .cfrac import DEFAULT_BREAKDOWN_EPS, BreakdownError, CfOptions, SecularFunction, SecularMode, recurrence
from .operators import WindowError

Wavefunction = namedtuple('Wavefunction', ['offset', 'values', 'normalization', 'residual'])

DEFAULT_RESIDUAL_TOLERANCE = 1e-10  # relative to 1 + max|H_ij|
NORMALIZATION_FLOOR = 1e-10
RESCALE_LIMIT = 1e150

_logger = logging.getLogger(__name__)


@unique
class Layout(Enum):
    """
    The factorization layouts
    """
    ONE_SIDED = 'one-sided'
    TWO_SIDED_CENTER = 'two-sided'


@unique
class Normalization(Enum):
    """
    The entry of a wavefunction that is fixed to 1
    """
    PSI1 = 'psi1'
    PSI0 = 'psi0'
    PEAK = 'peak'


def _resolve_center(h, center):
    if center is None:
        center = 0 if h.offset < 0 <= h.last else h.offset
    if not h.contains(center):
        raise WindowError(f'The center row {center} is not part of the matrix rows [{h.offset}, {h.last}]')
    return int(center)


class UflFactors:
    """
    The factors of H - z = U F L. The couplings are stored per slot p, the slot
    between the rows p and p+1 of the array. Below the center U carries -u[p]
    above and L carries -v[p] below the diagonal, above the center the two
    triangles are exchanged.
    """
    def __init__(self, u, f, v, pivots, layout, center, offset, z):  # pylint: disable=too-many-arguments
        self.__u = u
        self.__f = f
        self.__v = v
        self.__pivots = pivots
        self.__layout = layout
        self.__center = center
        self.__offset = offset
        self.__z = z

    def __repr__(self):
        return f'{self.__class__.__module__}.{self.__class__.__qualname__}(dim={len(self.__f)}, layout={self.__layout}, center={self.__center}, z={self.__z})'

    @property
    def u(self):  # pylint: disable=invalid-name
        """
        The coupling entries of U
        """
        return self.__u

    @property
    def f(self):  # pylint: disable=invalid-name
        """
        The continued-fraction values f_k. F is diag(1/f_k).
        """
        return self.__f

    @property
    def v(self):  # pylint: disable=invalid-name
        """
        The coupling entries of L
        """
        return self.__v

    @property
    def pivots(self):
        """
        The diagonal of F, 1/f_k
        """
        return self.__pivots

    @property
    def layout(self):
        """
        The layout as a Layout enum
        """
        return self.__layout

    @property
    def center(self):
        """
        The operator index of the center row
        """
        return self.__center

    @property
    def offset(self):
        """
        The operator index of the first row
        """
        return self.__offset

    @property
    def z(self):  # pylint: disable=invalid-name
        """
        The spectral parameter of the factorization
        """
        return self.__z

    def __triangles(self):
        dim = len(self.__f)
        center = self.__center - self.__offset
        upper, lower = np.eye(dim, dtype=complex), np.eye(dim, dtype=complex)
        for slot in range(dim - 1):
            if slot >= center:
                upper[slot, slot + 1] = -self.__u[slot]
                lower[slot + 1, slot] = -self.__v[slot]
            else:
                upper[slot + 1, slot] = -self.__u[slot]
                lower[slot, slot + 1] = -self.__v[slot]
        return upper, lower

    def upper(self):
        """
        The dense factor U
        """
        return self.__triangles()[0]

    def middle(self):
        """
        The dense factor F
        """
        return np.diag(self.__pivots)

    def lower(self):
        """
        The dense factor L
        """
        return self.__triangles()[1]

    def reconstruct(self):
        """
        Returns the product U F L, which equals H - z.
        """
        upper, lower = self.__triangles()
        return upper @ self.middle() @ lower

    def determinant(self):
        """
        det(H - z) as the product of the pivots 1/f_k
        """
        return complex(np.prod(self.__pivots))


def factorize(h, z, center=None, breakdown_eps=DEFAULT_BREAKDOWN_EPS):
    """
    Factorize H - z. The center defaults to row 0 if it is an interior row
    and to the first row otherwise.

    Raises
    ------
    BreakdownError
        If a pivot other than the center pivot vanishes.
    """
    center = _resolve_center(h, center)
    position = center - h.offset
    dim, z = h.dim, complex(z)
    products = h.upper * h.lower

    pivots = np.empty(dim, dtype=complex)
    below = recurrence(h.diag[position + 1:], products[position + 1:], z, breakdown_eps, keep_pivots=True)
    above = recurrence(h.diag[position - 1::-1] if position else h.diag[:0], products[:max(position - 1, 0)][::-1], z, breakdown_eps, keep_pivots=True)
    if np.any(below.breakdown) or np.any(above.breakdown):
        raise BreakdownError(f'Vanishing pivot in the factorization at z={z}')
    pivots[position + 1:] = below.pivots
    pivots[:position] = above.pivots[::-1]

    with np.errstate(divide='ignore', invalid='ignore'):
        f = 1 / pivots
        middle = h.diag[position] - z
        if position + 1 < dim:
            middle -= products[position] * f[position + 1]
        if position > 0:
            middle -= products[position - 1] * f[position - 1]
        pivots[position] = middle
        f[position] = 1 / middle

    u, v = np.empty(dim - 1, dtype=complex), np.empty(dim - 1, dtype=complex)
    u[position:] = -h.upper[position:] * f[position + 1:]
    v[position:] = -h.lower[position:] * f[position + 1:]
    u[:position] = -h.lower[:position] * f[:position]
    v[:position] = -h.upper[:position] * f[:position]

    layout = Layout.ONE_SIDED if position == 0 else Layout.TWO_SIDED_CENTER
    return UflFactors(u, f, v, pivots, layout, center, h.offset, z)


def verify(h, psi, e, left=False):
    """
    Fill in the relative residual ||(H - E) psi|| / ||psi|| of a wavefunction.
    With *left* set, the residual of psi^T (H - E) is measured instead.
    """
    matrix = h.transpose().to_dense() if left else h.to_dense()
    values = np.asarray(psi.values)
    residual = np.linalg.norm(matrix @ values - e * values) / np.linalg.norm(values)
    return psi._replace(residual=float(residual))


def _normalized(values, position, normalization):
    peak = int(np.argmax(np.abs(values)))
    if abs(values[position]) > NORMALIZATION_FLOOR * abs(values[peak]):
        return values / values[position], normalization
    return values / values[peak], Normalization.PEAK


def _direct(h, e):
    """
    Solve the three-term recurrence of (H - E) psi = 0 from the first row
    downward and from the last row upward. Returns the values of the direction
    with the smaller residual.
    """
    dim, shifted = h.dim, h.diag - e
    sweeps = []
    if np.all(h.upper != 0):
        forward = np.zeros(dim, dtype=complex)
        forward[0] = 1
        for row in range(dim - 1):
            coupled = h.lower[row - 1] * forward[row - 1] if row else 0
            forward[row + 1] = -(shifted[row] * forward[row] + coupled) / h.upper[row]
            if abs(forward[row + 1]) > RESCALE_LIMIT:
                forward /= abs(forward[row + 1])
        sweeps.append(forward)
    if np.all(h.lower != 0):
        backward = np.zeros(dim, dtype=complex)
        backward[-1] = 1
        for row in range(dim - 1, 0, -1):
            coupled = h.upper[row] * backward[row + 1] if row < dim - 1 else 0
            backward[row - 1] = -(shifted[row] * backward[row] + coupled) / h.lower[row - 1]
            if abs(backward[row - 1]) > RESCALE_LIMIT:
                backward /= abs(backward[row - 1])
        sweeps.append(backward)
    best, best_residual = None, np.inf
    for values in sweeps:
        if not np.all(np.isfinite(values)):
            continue
        residual = verify(h, Wavefunction(h.offset, values, None, None), e).residual
        if residual < best_residual:
            best, best_residual = values, residual
    if best is None:
        raise BreakdownError(f'Neither the factorization nor the three-term recurrence give an eigenvector at E={e}')
    return best


def _factorized(h, e, center):
    factors = factorize(h, e, center=center)
    position = factors.center - h.offset
    values = np.empty(h.dim, dtype=complex)
    values[position] = 1
    for row in range(position + 1, h.dim):
        values[row] = factors.v[row - 1] * values[row - 1]
    for row in range(position - 1, -1, -1):
        values[row] = factors.v[row] * values[row + 1]
    return values


def _wavefunction(h, e, center, normalization):
    """
    The eigenvector from the factors of H - E. If a pivot of the factorization
    vanishes, or the residual exceeds the tolerance, the three-term recurrence
    from the boundary rows is used instead, whichever has the smaller residual.
    """
    position = center - h.offset
    tolerance = DEFAULT_RESIDUAL_TOLERANCE * (1 + h.max_abs())
    psi = None
    try:
        psi = verify(h, Wavefunction(h.offset, _factorized(h, e, center), normalization, None), e)
    except BreakdownError as exc:
        _logger.debug('Factorization at E=%(energy)s failed: %(error)s.', {'energy': e, 'error': exc})
    if psi is None or not psi.residual <= tolerance:
        direct = verify(h, Wavefunction(h.offset, _direct(h, e), normalization, None), e)
        if psi is None or not direct.residual >= psi.residual:
            _logger.info('Using the three-term recurrence for the eigenvector at E=%(energy)s.', {'energy': e})
            psi = direct
    values, normalization = _normalized(np.asarray(psi.values), position, normalization)
    psi = verify(h, Wavefunction(h.offset, values, normalization, None), e)
    _logger.debug('Wavefunction at E=%(energy)s has residual %(residual)g.', {'energy': e, 'residual': psi.residual})
    return psi


def wavefunction_one_sided(h, e):
    """
    The right eigenvector for eigenvalue *e* with psi = 1 in the first row,
    built by forward substitution through L.
    """
    return _wavefunction(h, e, h.offset, Normalization.PSI1)


def wavefunction_two_sided(h, e, center=None):
    """
    The right eigenvector for eigenvalue *e* with psi = 1 in the center row,
    psi_k = -c_k f_k psi_{k-1} below and psi_j = -f_j b_j psi_{j+1} above the
    center.

    If psi vanishes in the center row, its largest entry is set to 1 instead
    and the normalization is PEAK.
    """
    center = _resolve_center(h, center)
    return _wavefunction(h, e, center, Normalization.PSI0)


def left_eigenvector(h, e, center=None):
    """
    The left eigenvector phi with phi^T (H - E) = 0, computed as the right
    eigenvector of the transposed matrix.
    """
    phi = wavefunction_two_sided(h.transpose(), e, center=center)
    return verify(h, phi, e, left=True)


def _newton_update(function, e, fd_step):
    step = max(fd_step, fd_step * abs(e))
    value, forward, backward = function(np.array([e, e + step, e - step]))
    derivative = (forward - backward) / (2 * step)
    return value / derivative if derivative != 0 else np.nan


def polish_eigenvalue(h, e, opts=None, center=None, steps=1, fd_step=1e-7):  # pylint: disable=too-many-arguments
    """
    Improve an approximate eigenvalue with Newton steps on the secular function
    of the same layout and on its characteristic function. Of the two new
    values the one with the smaller |det(H - e)| is kept, a pole of the
    secular function next to e sends its own step the wrong way. The iteration
    stops if neither step is finite.
    """
    center = _resolve_center(h, center)
    source = h.to_source()
    if center == h.offset:
        secular = SecularFunction(source, CfOptions() if opts is None else opts, mode=SecularMode.ONE_SIDED)
    else:
        secular = SecularFunction(source, CfOptions() if opts is None else opts, center=center)
    e = complex(e)
    for _ in range(steps):
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            updates = [_newton_update(secular, e, fd_step), _newton_update(secular.characteristic, e, fd_step)]
            candidates = [e - update for update in updates if np.isfinite(update)]
            if not candidates:
                break
            e = min(candidates, key=lambda candidate: abs(secular.characteristic(candidate)))
    return e
