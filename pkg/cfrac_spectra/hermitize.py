# -*- coding: utf-8 -*-
"""
Singular values of a tridiagonal matrix H from the Hermitian doubling
[[0, H], [H^+, 0]]. Interleaving the rows of H and H^+ turns the doubled
matrix into a block-tridiagonal matrix with sparse 2x2 blocks

    A_k = [[0, a_k], [a_k*, 0]],  B_k = [[0, b_k], [c_{k+1}*, 0]],  C_{k+1} = B_k^+

whose matrix continued fraction gives a real secular function det S(sigma).
Its roots on sigma >= 0 are the singular values.
"""
from collections import namedtuple
import logging
import math

import numpy as np

from .cfrac import BreakdownError, CfOptions, adaptive_depth, default_center
from .operators import WindowError, snapshot
from .roots import Root, SearchRegion, SpectrumResult, golden_minimum, real_bisect

SearchInterval = namedtuple('SearchInterval', ['lo', 'hi', 'points'])
BlockEvaluation = namedtuple('BlockEvaluation', ['secular', 'determinant', 'negative_count', 'depth_down', 'depth_up', 'tail_estimate', 'breakdown', 'converged', 'conditioning'])
MatrixBranch = namedtuple('MatrixBranch', ['f', 'breakdown', 'negative_count', 'conditioning'])

DEFAULT_RESOLUTION = 2000
CONDITION_FLOOR = 1e-6  # smallest relative_determinant of a pivot for a trusted inertia count
ZERO_FLOOR = 1e-10  # relative to the scale of the search interval
NUDGE_STEPS = 12
SPLIT_FRACTIONS = (0.5, 0.382, 0.618, 0.25, 0.75)

_logger = logging.getLogger(__name__)


class Mat2:
    """
    An immutable 2x2 complex matrix. The four entries may be numpy arrays of a
    common shape, then every operation acts elementwise on a stack of matrices.
    """
    __slots__ = ('__m00', '__m01', '__m10', '__m11')

    def __init__(self, m00, m01, m10, m11):
        self.__m00, self.__m01, self.__m10, self.__m11 = m00, m01, m10, m11

    @classmethod
    def from_array(cls, array):
        """
        Create a matrix from a nested 2x2 sequence.
        """
        array = np.asarray(array, dtype=complex)
        return cls(array[0, 0], array[0, 1], array[1, 0], array[1, 1])

    @classmethod
    def identity(cls, scale=1.):
        """
        A multiple of the identity
        """
        return cls(scale, 0., 0., scale)

    @property
    def entries(self):
        """
        The entries (m00, m01, m10, m11)
        """
        return self.__m00, self.__m01, self.__m10, self.__m11

    def __repr__(self):
        return f'{self.__class__.__module__}.{self.__class__.__qualname__}({self.__m00!r}, {self.__m01!r}, {self.__m10!r}, {self.__m11!r})'

    def __matmul__(self, other):
        a00, a01, a10, a11 = self.entries
        b00, b01, b10, b11 = other.entries
        return Mat2(a00 * b00 + a01 * b10, a00 * b01 + a01 * b11, a10 * b00 + a11 * b10, a10 * b01 + a11 * b11)

    def __add__(self, other):
        return Mat2(*(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other):
        return Mat2(*(a - b for a, b in zip(self.entries, other.entries)))

    def __mul__(self, scalar):
        return Mat2(*(scalar * a for a in self.entries))

    __rmul__ = __mul__

    def shift(self, sigma):
        """
        Returns self - sigma * identity.
        """
        return Mat2(self.__m00 - sigma, self.__m01, self.__m10, self.__m11 - sigma)

    def det(self):
        """
        The determinant
        """
        return self.__m00 * self.__m11 - self.__m01 * self.__m10

    def trace(self):
        """
        The trace
        """
        return self.__m00 + self.__m11

    def inverse(self, eps=0.):
        """
        The inverse from the adjugate formula. Entries whose determinant is
        smaller than *eps* in magnitude become NaN.
        """
        det = self.det()
        with np.errstate(divide='ignore', invalid='ignore'):
            scale = np.where(np.abs(det) > eps, 1 / np.where(det == 0, 1, det), np.nan)
        if np.ndim(scale) == 0:
            scale = scale.item()
        return Mat2(self.__m11 * scale, -self.__m01 * scale, -self.__m10 * scale, self.__m00 * scale)

    @property
    def adjoint(self):
        """
        The conjugate transpose
        """
        return Mat2(np.conj(self.__m00), np.conj(self.__m10), np.conj(self.__m01), np.conj(self.__m11))

    def is_hermitian(self, tol=1e-12):
        """
        Returns *True* if the matrix equals its adjoint to *tol*.
        """
        return bool(np.all(np.abs(self.to_array() - self.adjoint.to_array()) <= tol))

    def negative_count(self):
        """
        The number of negative eigenvalues of a Hermitian matrix, 0, 1 or 2. A
        zero eigenvalue is not negative.
        """
        det, trace = np.real(self.det()), np.real(self.trace())
        return np.where(det < 0, 1, np.where(trace < 0, np.where(det > 0, 2, 1), 0))

    def to_array(self):
        """
        The entries as a numpy array of shape (2, 2) + broadcast shape
        """
        entries = np.broadcast_arrays(*(np.asarray(entry, dtype=complex) for entry in self.entries))
        return np.stack(entries).reshape((2, 2) + entries[0].shape)


def _diagonal_block(a):
    return Mat2(0., a, np.conj(a), 0.)


def _coupling_block(b, c_next):
    return Mat2(0., b, np.conj(c_next), 0.)


class BlockTridiagonalOperator:
    """
    The block-tridiagonal form of the Hermitian doubling of a coefficient
    source. The blocks are built on demand.
    """
    def __init__(self, source):
        self.__source = source

    def __repr__(self):
        return f'{self.__class__.__module__}.{self.__class__.__qualname__}(source={self.__source!r})'

    @property
    def source(self):
        """
        The scalar coefficient source
        """
        return self.__source

    @property
    def window(self):
        """
        The block index window, identical to the scalar window
        """
        return self.__source.window

    def contains(self, index):
        """
        Returns *True* if *index* is a block row.
        """
        return self.__source.contains(index)

    def A(self, k):  # pylint: disable=invalid-name
        """
        The diagonal block A_k
        """
        return _diagonal_block(self.__source.a(k))

    def B(self, k):  # pylint: disable=invalid-name
        """
        The upper block B_k coupling block row k to k+1
        """
        return _coupling_block(self.__source.b(k), self.__source.c(k + 1))

    def C(self, k):  # pylint: disable=invalid-name
        """
        The lower block C_k = B_{k-1}^+ coupling block row k to k-1
        """
        return self.B(k - 1).adjoint

    def chain(self, start, depth, direction):
        """
        The blocks of a branch in chain order as a list of (A, left, right)
        with F = (A - sigma - left F_next right)^-1.
        """
        if direction > 0:
            last = start + depth - 1
            a = self.__source.diagonal(start, last)
            b, c = self.__source.upper(start, last - 1), self.__source.lower(start + 1, last)
        else:
            last = start - depth + 1
            a = self.__source.diagonal(last, start)[::-1]
            b, c = self.__source.upper(last, start - 1)[::-1], self.__source.lower(last + 1, start)[::-1]
        levels = []
        for level in range(depth):
            if level == depth - 1:
                levels.append((_diagonal_block(a[level]), None, None))
                continue
            coupling = _coupling_block(b[level], c[level])
            if direction > 0:
                levels.append((_diagonal_block(a[level]), coupling, coupling.adjoint))
            else:
                levels.append((_diagonal_block(a[level]), coupling.adjoint, coupling))
        return levels


def block_form(source):
    """
    The block-tridiagonal operator of the Hermitian doubling of *source*.
    """
    return BlockTridiagonalOperator(source)


def double(h):
    """
    The dense Hermitian doubling [[0, H], [H^+, 0]] of a finite matrix.
    """
    matrix = h.to_dense()
    zero = np.zeros_like(matrix)
    return np.block([[zero, matrix], [matrix.conj().T, zero]])


def interleave_permutation(dim):
    """
    The permutation that orders the rows of the doubled matrix as
    (1, 1', 2, 2', ...). Entry i is the doubled-matrix row placed at row i.
    """
    if dim < 1:
        raise ValueError(f'Dimension must be positive, got {dim}')
    perm = np.empty(2 * dim, dtype=int)
    perm[0::2] = np.arange(dim)
    perm[1::2] = dim + np.arange(dim)
    return perm


def permutation_matrix(perm):
    """
    The orthogonal matrix V with (V^T M V)[i, j] = M[perm[i], perm[j]].
    """
    matrix = np.zeros((len(perm), len(perm)))
    matrix[perm, np.arange(len(perm))] = 1
    return matrix


def assemble(blocks, lo, hi):
    """
    The dense block-tridiagonal matrix of the block rows lo..hi.
    """
    size = hi - lo + 1
    if size < 1:
        raise WindowError(f'Empty block window [{lo}, {hi}]')
    matrix = np.zeros((2 * size, 2 * size), dtype=complex)
    for row in range(size):
        k = lo + row
        matrix[2 * row:2 * row + 2, 2 * row:2 * row + 2] = blocks.A(k).to_array()
        if row < size - 1:
            coupling = blocks.B(k)
            matrix[2 * row:2 * row + 2, 2 * row + 2:2 * row + 4] = coupling.to_array()
            matrix[2 * row + 2:2 * row + 4, 2 * row:2 * row + 2] = coupling.adjoint.to_array()
    return matrix


def relative_determinant(pivot):
    """
    |det P| / (||P||_F^2 / 2) of a Hermitian 2x2 matrix, within a factor of 2
    the ratio of its small to its large eigenvalue. 0 for a singular or
    non-finite matrix.
    """
    norm = sum(np.abs(entry)**2 for entry in pivot.entries) / 2
    with np.errstate(divide='ignore', invalid='ignore'):
        ratio = np.abs(pivot.det()) / norm
    return np.where(np.isfinite(ratio), ratio, 0.)


def _matrix_recurrence(levels, sigma, breakdown_eps):
    sigma = np.asarray(sigma, dtype=float)
    f_next = None
    breakdown = np.zeros(sigma.shape, dtype=bool)
    negative_count = np.zeros(sigma.shape, dtype=int)
    conditioning = np.ones(sigma.shape)
    for diagonal, left, right in reversed(levels):
        pivot = diagonal.shift(sigma)
        if f_next is not None:
            pivot = pivot - left @ f_next @ right
        breakdown |= ~(np.abs(pivot.det()) >= breakdown_eps)
        negative_count += pivot.negative_count()
        conditioning = np.minimum(conditioning, relative_determinant(pivot))
        f_next = pivot.inverse()
    return MatrixBranch(f_next, breakdown, negative_count, conditioning)


def _available(blocks, start, direction):
    lo, hi = blocks.window
    if not lo <= start <= hi:
        return 0
    return hi - start + 1 if direction > 0 else start - lo + 1


def _matrix_branch(blocks, sigma, opts, start, direction):
    available = _available(blocks, start, direction)
    if available == 0:
        return None

    def evaluate(depth):
        return _matrix_recurrence(blocks.chain(start, depth, direction), sigma, opts.breakdown_eps)

    return adaptive_depth(evaluate, available, opts, measure=lambda branch: branch.f.to_array())


def _branch_result(run, down):
    branch = run.result
    return branch.f, BlockEvaluation(
        secular=branch.f.inverse(),
        determinant=np.real(branch.f.inverse().det()),
        negative_count=branch.negative_count,
        depth_down=run.depth if down else 0,
        depth_up=0 if down else run.depth,
        tail_estimate=run.tail_estimate,
        breakdown=branch.breakdown,
        converged=run.converged,
        conditioning=branch.conditioning,
    )


def mcf_descend(blocks, sigma, opts=None, start=1):
    """
    The matrix continued fraction F_start(sigma) with the downward recurrence
    F_k = (A_k - sigma - B_k F_{k+1} C_{k+1})^-1.
    """
    opts = CfOptions() if opts is None else opts
    if not blocks.contains(start):
        raise WindowError(f'Block row {start} is not part of the window {blocks.window}')
    return _branch_result(_matrix_branch(blocks, sigma, opts, start, +1), down=True)


def mcf_ascend(blocks, sigma, opts=None, start=-1):
    """
    The matrix continued fraction F_start(sigma) with the upward recurrence
    F_{-j} = (A_{-j} - sigma - C_{-j} F_{-j-1} B_{-j-1})^-1.
    """
    opts = CfOptions() if opts is None else opts
    if not blocks.contains(start):
        raise WindowError(f'Block row {start} is not part of the window {blocks.window}')
    return _branch_result(_matrix_branch(blocks, sigma, opts, start, -1), down=False)


def evaluate_block(blocks, sigma, opts=None, center=None):
    """
    Match the two matrix fractions at the center block row.

    Returns
    -------
    BlockEvaluation
        The 2x2 secular matrix S = F_center^-1, its real determinant, the
        number of negative eigenvalues of all pivots, the depth diagnostics
        and the smallest relative_determinant of the branch pivots.
    """
    opts = CfOptions() if opts is None else opts
    center = default_center(blocks.source) if center is None else center
    if not blocks.contains(center):
        raise WindowError(f'The center block row {center} is not part of the window {blocks.window}')
    sigma = np.asarray(sigma, dtype=float)
    down = _matrix_branch(blocks, sigma, opts, center + 1, +1)
    up = _matrix_branch(blocks, sigma, opts, center - 1, -1)

    secular = blocks.A(center).shift(sigma)
    breakdown = np.zeros(sigma.shape, dtype=bool)
    negative_count = np.zeros(sigma.shape, dtype=int)
    tail, converged = 0., True
    conditioning = np.ones(sigma.shape)
    if down is not None:
        coupling = blocks.B(center)
        secular = secular - coupling @ down.result.f @ coupling.adjoint
        breakdown |= down.result.breakdown
        negative_count += down.result.negative_count
        conditioning = np.minimum(conditioning, down.result.conditioning)
        tail += down.tail_estimate
        converged &= down.converged
    if up is not None:
        coupling = blocks.B(center - 1)
        secular = secular - coupling.adjoint @ up.result.f @ coupling
        breakdown |= up.result.breakdown
        negative_count += up.result.negative_count
        conditioning = np.minimum(conditioning, up.result.conditioning)
        tail += up.tail_estimate
        converged &= up.converged
    negative_count = negative_count + secular.negative_count()
    return BlockEvaluation(
        secular=secular,
        determinant=np.real(secular.det()),
        negative_count=negative_count,
        depth_down=down.depth if down is not None else 0,
        depth_up=up.depth if up is not None else 0,
        tail_estimate=tail,
        breakdown=breakdown,
        converged=converged,
        conditioning=conditioning,
    )


def secular_block(blocks, sigma, opts=None, center=None):
    """
    The secular matrix S(sigma) = F_center^-1 and its determinant, which is
    real for real sigma. Sign changes of the determinant bracket singular
    values.
    """
    evaluation = evaluate_block(blocks, sigma, opts, center)
    determinant = evaluation.determinant
    return evaluation.secular, determinant.item() if np.ndim(determinant) == 0 else determinant


def inertia_count(blocks, sigma, opts=None, center=None):
    """
    The number of eigenvalues of the block-tridiagonal matrix below sigma,
    counted from the signs of the Hermitian 2x2 pivots.
    """
    count = evaluate_block(blocks, sigma, opts, center).negative_count
    return int(count) if np.ndim(count) == 0 else count


def singular_value_bound(h):
    """
    An upper bound of the largest singular value, sqrt(||H||_1 ||H||_inf)
    """
    matrix = np.abs(h.to_dense())
    return math.sqrt(float(matrix.sum(axis=0).max()) * float(matrix.sum(axis=1).max()))


class BlockSecular:
    """
    A callable real secular function det S(sigma) of a block operator. It
    returns NaN wherever the matrix fraction broke down.
    """
    def __init__(self, blocks, opts=None, center=None):
        self.__blocks = blocks
        self.__opts = CfOptions() if opts is None else opts
        self.__center = default_center(blocks.source) if center is None else center
        self.__logger = logging.getLogger(__name__)

    @property
    def blocks(self):
        """
        The block operator
        """
        return self.__blocks

    @property
    def center(self):
        """
        The matching block row
        """
        return self.__center

    def evaluate(self, sigma):
        """
        Returns the full `BlockEvaluation` at sigma.
        """
        evaluation = evaluate_block(self.__blocks, sigma, self.__opts, self.__center)
        if not evaluation.converged:
            self.__logger.warning('Matrix continued fraction not converged at depth (%(down)d, %(up)d).', {'down': evaluation.depth_down, 'up': evaluation.depth_up})
        return evaluation

    def __call__(self, sigma):
        evaluation = self.evaluate(sigma)
        value = np.where(evaluation.breakdown, np.nan, evaluation.determinant)
        return value.item() if np.ndim(value) == 0 else value

    def inertia(self, sigma):
        """
        The number of eigenvalues of the doubled operator below sigma
        """
        count = self.evaluate(sigma).negative_count
        return int(count) if np.ndim(count) == 0 else count


def _inertia_clusters(counter, lo, hi, count_lo, count_hi, tol, conditioning=None):  # pylint: disable=too-many-arguments
    """
    Split [lo, hi) until every piece that contains eigenvalues is narrower than
    tol. Returns (position, multiplicity) pairs.

    A split point is skipped if *counter* returns None there or a count outside
    of [count_lo, count_hi]. A piece without a usable split point lies at a
    singular block pivot. It is reported at the minimum of the *conditioning*
    of the pivots, or at its midpoint if that is not given.
    """
    if count_hi <= count_lo:
        return []
    if hi - lo <= tol * max(1., abs(hi)):
        return [(0.5 * (lo + hi), count_hi - count_lo)]
    for fraction in SPLIT_FRACTIONS:
        mid = lo + fraction * (hi - lo)
        count_mid = counter(mid)
        if count_mid is not None and count_lo <= count_mid <= count_hi:
            return (_inertia_clusters(counter, lo, mid, count_lo, count_mid, tol, conditioning)
                    + _inertia_clusters(counter, mid, hi, count_mid, count_hi, tol, conditioning))
    if conditioning is None:
        return [(0.5 * (lo + hi), count_hi - count_lo)]
    position, _ = golden_minimum(conditioning, lo, hi, tol)
    _logger.debug('No reliable count on [%(lo).15g, %(hi).15g], using the singular pivot at %(position).15g.', {'lo': lo, 'hi': hi, 'position': position})
    return [(position, count_hi - count_lo)]


def singular_values(source, opts=None, search=None, center=None, tol=1e-14):  # pylint: disable=too-many-arguments,too-many-locals,too-many-statements
    """
    Locate the singular values of a finite source on a real interval.

    The determinant of the secular matrix is scanned and every sign change is
    bisected. Minima of |det S| close to zero become even-multiplicity
    candidates. The interval is then cut into small windows around the
    candidates and the gaps between them, and the inertia of the block pivots
    counts the singular values in every piece. A window around a simple
    candidate keeps the bisected position. All other pieces are resolved by
    bisecting the inertia count, which also recovers singular values that
    cancel against a pole of det S. Singular values below ZERO_FLOOR times the
    scale of the interval are reported as an exact zero.

    The inertia count is only used where every block pivot satisfies
    relative_determinant >= CONDITION_FLOOR. Points closer to a singular pivot
    are moved outward.
    """
    opts = CfOptions() if opts is None else opts
    if not source.is_finite:
        raise WindowError(f'Singular values need a finite window, {source} is unbounded')
    secular = BlockSecular(block_form(source), opts, center)
    dim = source.window.hi - source.window.lo + 1
    if search is None:
        search = SearchInterval(0., 1.05 * singular_value_bound(snapshot(source)) + 1e-3, DEFAULT_RESOLUTION)
    if search.lo < 0 or not search.lo < search.hi:
        raise ValueError(f'The search interval must be a subinterval of [0, inf), got [{search.lo}, {search.hi}]')

    scale = max(1., search.hi)
    cluster_tol = max(tol, 1e-13)
    simple_width, even_width = 1e-9 * scale, 1e-6 * scale
    floor = ZERO_FLOOR * scale if search.lo == 0 else search.lo

    def below(sigma):
        # the doubled matrix has dim eigenvalues -s_n <= 0 below any sigma > 0
        if sigma <= 0:
            return 0
        evaluation = secular.evaluate(sigma)
        if not evaluation.conditioning >= CONDITION_FLOOR:
            return None
        return int(evaluation.negative_count) - dim

    def settle(sigma, direction):
        for step in range(NUDGE_STEPS):
            shifted = sigma + direction * simple_width * (2**step - 1)
            count = below(shifted)
            if count is not None:
                return shifted, count
        raise BreakdownError(f'No reliable inertia count near sigma={sigma}')

    def conditioning(sigma):
        return float(secular.evaluate(sigma).conditioning)

    bracketed = real_bisect(secular, (search.lo, search.hi), search.points, tol=tol)
    candidates = sorted([(sigma, False) for sigma in bracketed.roots] + [(sigma, True) for sigma in bracketed.even_candidates])
    candidates = [(sigma, even) for sigma, even in candidates if floor + simple_width < sigma < search.hi - simple_width]

    start, end = settle(floor, +1 if search.lo == 0 else -1), settle(search.hi, +1)
    points = {start, end}
    for sigma, even in candidates:
        width = even_width if even else simple_width
        if sigma - width > floor:
            points.add(settle(sigma - width, -1))
        if sigma + width < search.hi:
            points.add(settle(sigma + width, +1))
    points = sorted(point for point in points if start[0] <= point[0] <= end[0])

    warnings, roots = [], []

    def add(sigma, multiplicity, note=None):
        residual = abs(secular(sigma))
        roots.append(Root(complex(sigma), float(residual) if np.isfinite(residual) else math.inf, 0, int(multiplicity)))
        if note is not None:
            warnings.append(note)
        elif multiplicity > 1:
            warnings.append(f'Singular value {sigma:.12g} has multiplicity {multiplicity}: degenerate cluster')

    if search.lo == 0 and start[1] > 0:
        add(0., start[1])
    for (lo, count_lo), (hi, count_hi) in zip(points, points[1:]):
        if count_hi < count_lo:
            warnings.append(f'Inertia count decreases on [{lo:.12g}, {hi:.12g}]')
            continue
        if count_hi == count_lo:
            continue
        inside = [(sigma, even) for sigma, even in candidates if lo <= sigma < hi]
        if len(inside) == 1 and not inside[0][1] and count_hi - count_lo == 1:
            add(inside[0][0], 1)
            continue
        for position, multiplicity in _inertia_clusters(below, lo, hi, count_lo, count_hi, cluster_tol, conditioning):
            add(position, multiplicity, None if inside else f'Singular value {position:.12g} recovered from the inertia count')

    total = end[1] - (0 if search.lo == 0 else start[1])
    located = sum(root.multiplicity_hint for root in roots)
    if located != total:
        warnings.append(f'Inertia count {total} differs from the {located} located singular values')
    for warning in warnings:
        _logger.warning(warning)
    region = SearchRegion(search.lo, search.hi, 0., 0., max(search.points, 2), 1)
    return SpectrumResult(roots, region, None, total, warnings)
