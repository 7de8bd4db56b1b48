# -*- coding: utf-8 -*-
"""
The scalar continued-fraction engine. It evaluates the downward recurrence

    f_k = 1 / (a_k - z - b_k c_{k+1} f_{k+1}),   f_{N+1} = 0

its upward mirror image, the two-sided matching formula

    S(z) = a_0 - z - c_0 b_{-1} f_{-1} - b_0 c_1 f_1

and detects an exact termination of the fraction. All evaluations accept a
scalar z or a numpy array of probe points.
"""
from collections import namedtuple
from enum import Enum, unique
import logging
import math

import numpy as np

from .operators import WindowError

SecularEvaluation = namedtuple('SecularEvaluation', ['value', 'depth_down', 'depth_up', 'tail_estimate', 'breakdown', 'converged', 'log_det'])
Branch = namedtuple('Branch', ['f', 'pivots', 'breakdown', 'log_det'])
DepthResult = namedtuple('DepthResult', ['result', 'depth', 'tail_estimate', 'converged'])

DEFAULT_TOL_TAIL = 1e-13
DEFAULT_BREAKDOWN_EPS = 1e-14
DEFAULT_MAX_DEPTH = 10**6
DEFAULT_INITIAL_DEPTH = 16
DEFAULT_FIXED_DEPTH = 64

_logger = logging.getLogger(__name__)


class BreakdownError(ArithmeticError):
    """
    Raised if a denominator of the recurrence vanishes and the operation cannot
    continue past it.
    """


@unique
class DepthGrowth(Enum):
    """
    The policy used to choose the truncation depth of an unbounded fraction
    """
    FIXED = 'fixed'
    DOUBLING = 'doubling'


@unique
class SecularMode(Enum):
    """
    Selects the anchor of the secular function. TWO_SIDED matches a downward
    and an upward fraction at a center row, ONE_SIDED uses the first row of the
    window and a single downward fraction.
    """
    TWO_SIDED = 'two-sided'
    ONE_SIDED = 'one-sided'


class CfOptions(namedtuple('CfOptions', ['tol_tail', 'max_depth', 'breakdown_eps', 'depth_growth', 'initial_depth', 'fixed_depth'])):
    """
    The numerical knobs of the continued-fraction engines.

    tol_tail is the allowed change of the anchor value under a depth increment,
    measured relative to max(1, |value|). breakdown_eps is the smallest
    accepted denominator magnitude. depth_growth selects between a single
    evaluation at fixed_depth and repeated doubling starting at initial_depth,
    both capped by max_depth. Finite windows up to max_depth are always
    evaluated in full.
    """
    __slots__ = ()

    def __new__(cls, tol_tail=DEFAULT_TOL_TAIL, max_depth=DEFAULT_MAX_DEPTH, breakdown_eps=DEFAULT_BREAKDOWN_EPS, depth_growth=DepthGrowth.DOUBLING, initial_depth=DEFAULT_INITIAL_DEPTH, fixed_depth=DEFAULT_FIXED_DEPTH):  # pylint: disable=too-many-arguments
        depth_growth = DepthGrowth(depth_growth)
        if not tol_tail > 0:
            raise ValueError(f'tol_tail must be positive, got {tol_tail}')
        if not breakdown_eps > 0:
            raise ValueError(f'breakdown_eps must be positive, got {breakdown_eps}')
        if int(max_depth) < 1 or int(initial_depth) < 1 or int(fixed_depth) < 1:
            raise ValueError('Depths must be at least 1')
        return super().__new__(cls, float(tol_tail), int(max_depth), float(breakdown_eps), depth_growth, int(initial_depth), int(fixed_depth))


def _scalar(value):
    value = np.asarray(value)
    return value.item() if value.ndim == 0 else value


def recurrence(diagonal, couplings, z, breakdown_eps, keep_pivots=False):
    """
    Run the recurrence p_k = d_k - z - g_k / p_{k+1} from the deepest level up
    to level 0 and return f_0 = 1/p_0.

    Parameters
    ----------
    diagonal : array
        The diagonal entries d_0, ..., d_{n-1} in chain order, level 0 is the
        anchor.
    couplings : array
        The coupling products g_0, ..., g_{n-2}. g_k couples level k to k+1.
    z : complex or array
        The probe point(s).
    breakdown_eps : float
        Pivots smaller than this in magnitude set the breakdown flag.
    keep_pivots : bool
        Return all pivots p_k (shape (n,) + z.shape) instead of None.

    Returns
    -------
    Branch
        f (the anchor value f_0), pivots, breakdown mask and the sum of the
        logarithms of all pivots.
    """
    z = np.asarray(z, dtype=complex)
    depth = len(diagonal)
    pivots = np.empty((depth,) + z.shape, dtype=complex) if keep_pivots else None
    f_next = np.zeros(z.shape, dtype=complex)
    breakdown = np.zeros(z.shape, dtype=bool)
    log_det = np.zeros(z.shape, dtype=complex)
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        for level in range(depth - 1, -1, -1):
            pivot = diagonal[level] - z
            if level < depth - 1:
                pivot = pivot - couplings[level] * f_next
            breakdown |= ~(np.abs(pivot) >= breakdown_eps)
            log_det += np.log(pivot)
            if keep_pivots:
                pivots[level] = pivot
            f_next = 1 / pivot
    return Branch(f_next, pivots, breakdown, log_det)


def _change(fine, coarse):
    difference = np.abs(np.asarray(fine) - np.asarray(coarse))
    finite = difference[np.isfinite(difference)]
    return float(finite.max()) if finite.size else 0.


def _scale(value):
    magnitude = np.abs(np.asarray(value))
    finite = magnitude[np.isfinite(magnitude)]
    return max(1., float(finite.max())) if finite.size else 1.


def adaptive_depth(evaluate, available, opts, measure=lambda result: result):
    """
    Drive *evaluate(depth)* until the quantity *measure(result)* is stable.

    *available* is the number of levels the source can supply (math.inf for
    unbounded windows). A finite window that fits into opts.max_depth is
    evaluated once at full depth and is exact. Otherwise the policy in
    opts.depth_growth applies and the returned tail estimate is the largest
    change of the measured quantity under the last depth increment.
    """
    if available < 1:
        raise WindowError('No levels available for the continued fraction')
    if available <= opts.max_depth:
        return DepthResult(evaluate(int(available)), int(available), 0., True)

    if opts.depth_growth is DepthGrowth.FIXED:
        depth = min(opts.fixed_depth, opts.max_depth)
        result = evaluate(depth)
        coarse = evaluate(max(depth // 2, 1))
        tail = _change(measure(result), measure(coarse))
        return DepthResult(result, depth, tail, tail <= opts.tol_tail * _scale(measure(result)))

    depth = min(opts.initial_depth, opts.max_depth)
    result = evaluate(depth)
    tail = math.inf
    while depth < opts.max_depth:
        next_depth = min(2 * depth, opts.max_depth)
        refined = evaluate(next_depth)
        tail = _change(measure(refined), measure(result))
        depth, result = next_depth, refined
        _logger.debug('Depth increased to %(depth)d, tail %(tail)g.', {'depth': depth, 'tail': tail})
        if tail <= opts.tol_tail * _scale(measure(result)):
            return DepthResult(result, depth, tail, True)
    _logger.warning('Continued fraction did not converge within %(depth)d levels (last change %(tail)g).', {'depth': depth, 'tail': tail})
    return DepthResult(result, depth, tail, False)


def _available(source, start, direction):
    lo, hi = source.window
    if not lo <= start <= hi:
        return 0
    return hi - start + 1 if direction > 0 else start - lo + 1


def _chain(source, start, depth, direction):
    """
    The diagonal and coupling arrays of a branch in chain order.
    """
    if direction > 0:
        last = start + depth - 1
        diagonal = source.diagonal(start, last)
        couplings = source.upper(start, last - 1) * source.lower(start + 1, last)
    else:
        last = start - depth + 1
        diagonal = source.diagonal(last, start)[::-1]
        couplings = (source.lower(last + 1, start) * source.upper(last, start - 1))[::-1]
    return diagonal, couplings


def _branch(source, z, opts, start, direction):
    """
    Evaluate the fraction anchored at *start* and running in *direction*. An
    empty branch (start outside of the window) returns f = 0.
    """
    z = np.asarray(z, dtype=complex)
    available = _available(source, start, direction)
    if available == 0:
        empty = Branch(np.zeros(z.shape, dtype=complex), None, np.zeros(z.shape, dtype=bool), np.zeros(z.shape, dtype=complex))
        return DepthResult(empty, 0, 0., True)

    def evaluate(depth):
        diagonal, couplings = _chain(source, start, depth, direction)
        return recurrence(diagonal, couplings, z, opts.breakdown_eps)

    return adaptive_depth(evaluate, available, opts, measure=lambda branch: branch.f)


def _branch_evaluation(run, down):
    branch = run.result
    with np.errstate(divide='ignore', invalid='ignore'):
        value = 1 / branch.f
    return SecularEvaluation(
        value=_scalar(value),
        depth_down=run.depth if down else 0,
        depth_up=0 if down else run.depth,
        tail_estimate=run.tail_estimate,
        breakdown=_scalar(branch.breakdown),
        converged=run.converged,
        log_det=_scalar(branch.log_det),
    )


def descend(source, z, opts=None, start=1):
    """
    Evaluate f_start(z) with the downward recurrence over the rows start,
    start+1, ... of the window.

    Returns
    -------
    tuple
        The value f_start and a `SecularEvaluation` whose value is the anchor
        pivot 1/f_start.
    """
    opts = CfOptions() if opts is None else opts
    if not source.contains(start):
        raise WindowError(f'Row {start} is not part of {source}')
    run = _branch(source, z, opts, start, +1)
    return _scalar(run.result.f), _branch_evaluation(run, down=True)


def ascend(source, z, opts=None, start=-1):
    """
    Evaluate f_start(z) with the upward recurrence
    f_{-j} = 1/(a_{-j} - z - c_{-j} b_{-j-1} f_{-j-1}) over the rows start,
    start-1, ... of the window.
    """
    opts = CfOptions() if opts is None else opts
    if not source.contains(start):
        raise WindowError(f'Row {start} is not part of {source}')
    run = _branch(source, z, opts, start, -1)
    return _scalar(run.result.f), _branch_evaluation(run, down=False)


def default_center(source):
    """
    The matching row of the two-sided secular function: 0 if it is part of the
    window, otherwise the first row.
    """
    lo, hi = source.window
    return 0 if lo <= 0 <= hi else lo


def secular_two_sided(source, z, opts=None, center=0):
    """
    Evaluate S(z) = 1/f_center by matching the downward fraction starting below
    *center* with the upward fraction starting above it. A side that is empty
    because the center sits at the window edge contributes nothing.
    """
    opts = CfOptions() if opts is None else opts
    if not source.contains(center):
        raise WindowError(f'The matching row {center} is not part of {source}')
    z = np.asarray(z, dtype=complex)
    down = _branch(source, z, opts, center + 1, +1)
    up = _branch(source, z, opts, center - 1, -1)

    value = source.a(center) - z
    coupling_down = coupling_up = 0
    if down.depth:
        coupling_down = source.b(center) * source.c(center + 1)
        value = value - coupling_down * down.result.f
    if up.depth:
        coupling_up = source.c(center) * source.b(center - 1)
        value = value - coupling_up * up.result.f
    with np.errstate(divide='ignore', invalid='ignore'):
        log_det = np.log(value) + down.result.log_det + up.result.log_det
    converged = down.converged and up.converged
    return SecularEvaluation(
        value=_scalar(value),
        depth_down=down.depth,
        depth_up=up.depth,
        tail_estimate=abs(coupling_down) * down.tail_estimate + abs(coupling_up) * up.tail_estimate,
        breakdown=_scalar(down.result.breakdown | up.result.breakdown),
        converged=converged,
        log_det=_scalar(log_det),
    )


def secular_one_sided(source, z, opts=None):
    """
    Evaluate S(z) = 1/f_lo, the reciprocal of the one-sided Green's function
    anchored at the first row of the window.
    """
    _, evaluation = descend(source, z, opts, start=source.window.lo)
    return evaluation


def one_sided_green(source, z, opts=None):
    """
    The Green's function G(z) = f_1(z) of a source whose window starts at row
    1. Its poles are the eigenvalues.
    """
    if source.window.lo != 1:
        raise WindowError(f'The one-sided Green\'s function needs a window starting at 1, got {source.window.lo}')
    f_1, _ = descend(source, z, opts, start=1)
    return f_1


def detect_termination(source, kmax, eps=0.):
    """
    Find the smallest K <= kmax at which the fraction terminates. Row K
    terminates if either condition holds:

    - the single coupling is small, |c_{K+1}| <= eps
    - the product is small, |b_K c_{K+1}| <= eps^2

    The second condition also catches a vanishing b_K. Returns None if no row up
    to kmax terminates.
    """
    lo, hi = source.window
    assert eps >= 0
    if kmax > hi:
        raise WindowError(f'kmax={kmax} exceeds the window of {source}')
    if math.isinf(lo):
        lo = 1
    last = min(kmax, hi - 1)
    if last < lo:
        return None
    upper = np.abs(source.upper(lo, last))
    lower = np.abs(source.lower(lo + 1, last + 1))
    terminated = np.flatnonzero((lower <= eps) | (upper * lower <= eps**2))
    if terminated.size == 0:
        return None
    termination = int(lo + terminated[0])
    _logger.info('Continued fraction terminates at row %(row)d.', {'row': termination})
    return termination


class SecularFunction:
    """
    A callable secular function S(z) of a coefficient source. Calling the
    object returns S at a scalar or an array of probe points with NaN wherever
    the evaluation broke down to a non-finite value. A tiny but nonzero pivot
    still gives a finite value and is only flagged in `evaluate`. The zeros of
    S are eigenvalues.
    """
    def __init__(self, source, opts=None, mode=SecularMode.TWO_SIDED, center=None):
        self.__source = source
        self.__opts = CfOptions() if opts is None else opts
        self.__mode = SecularMode(mode)
        if self.__mode is SecularMode.ONE_SIDED:
            if math.isinf(source.window.lo):
                raise WindowError(f'A one-sided secular function needs a finite first row, {source} has none')
            center = source.window.lo
        elif center is None:
            center = default_center(source)
        if not source.contains(center):
            raise WindowError(f'The matching row {center} is not part of {source}')
        self.__center = int(center)
        self.__logger = logging.getLogger(__name__)

    def __repr__(self):
        return f'{self.__class__.__module__}.{self.__class__.__qualname__}(source={self.__source!r}, mode={self.__mode}, center={self.__center})'

    @property
    def source(self):
        """
        The coefficient source
        """
        return self.__source

    @property
    def options(self):
        """
        The continued-fraction options as a CfOptions tuple
        """
        return self.__opts

    @property
    def mode(self):
        """
        The anchor of the secular function as a SecularMode enum
        """
        return self.__mode

    @property
    def center(self):
        """
        The matching row
        """
        return self.__center

    def evaluate(self, z):
        """
        Returns the full `SecularEvaluation` at z.
        """
        evaluation = secular_two_sided(self.__source, z, self.__opts, center=self.__center)
        if not evaluation.converged:
            self.__logger.warning('Secular function not converged at depth (%(down)d, %(up)d).', {'down': evaluation.depth_down, 'up': evaluation.depth_up})
        return evaluation

    def __call__(self, z):
        evaluation = self.evaluate(z)
        return _scalar(np.where(evaluation.breakdown & ~np.isfinite(evaluation.value), np.nan, evaluation.value))

    def alternatives(self):
        """
        Two-sided secular functions of the same source matched at the rows next
        to this one. S_c has a pole instead of a zero at an eigenvalue whose
        eigenvector vanishes at row c. An eigenvector of an irreducible
        tridiagonal operator never vanishes at two adjacent rows, so one of the
        neighbours has the zero.
        """
        if self.__mode is SecularMode.ONE_SIDED:
            rows = [default_center(self.__source), self.__center + 1]
        else:
            rows = [self.__center + 1, self.__center - 1]
        rows = [row for row in dict.fromkeys(rows) if row != self.__center and self.__source.contains(row)]
        return [SecularFunction(self.__source, self.__opts, SecularMode.TWO_SIDED, row) for row in rows]

    def characteristic(self, z):
        """
        A pole-free function with the phase of det(H - z). It vanishes at every
        eigenvalue, including those the secular function has a pole at. Its
        magnitude is clipped to stay finite.
        """
        log_det = np.asarray(self.evaluate(z).log_det)
        magnitude = np.clip(log_det.real, -700., 700.)
        return _scalar(np.exp(magnitude + 1j * log_det.imag))
