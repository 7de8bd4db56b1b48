# -*- coding: utf-8 -*-
"""
Root localization for secular functions: grid seeding, Newton refinement,
argument-principle counting in the complex plane and bracketing on the real
axis.

A secular-function handle is any callable that maps a complex scalar or a
numpy array of probe points to the function values, with NaN where the
function cannot be evaluated.
"""
from collections import namedtuple
import cmath
import logging
import math

import numpy as np

from .cfrac import BreakdownError

Root = namedtuple('Root', ['z', 'residual', 'newton_iters', 'multiplicity_hint'])
NewtonResult = namedtuple('NewtonResult', ['z', 'residual', 'iters'])
BracketedRoots = namedtuple('BracketedRoots', ['roots', 'even_candidates'])
Match = namedtuple('Match', ['found', 'reference', 'distance'])

DEFAULT_GRID = 101
DEFAULT_SAMPLES_PER_EDGE = 64
MAX_SAMPLES_PER_EDGE = 2**14
GOLDEN = (math.sqrt(5) - 1) / 2
SEED_JITTER = (0.0137, 0.0089)  # fractions of a grid cell
SPLIT_ANGLE = 0.3  # radians, keeps the split seeds off the axes through a root

_logger = logging.getLogger(__name__)


class RootDivergenceError(ArithmeticError):
    """
    Raised if the Newton iteration leaves the search region, produces
    non-finite values or does not converge.
    """


class ContourError(ArithmeticError):
    """
    Raised if the winding contour runs through a zero or a breakdown of the
    function, or if the winding number does not stabilize.
    """


class SearchRegion(namedtuple('SearchRegion', ['re_min', 're_max', 'im_min', 'im_max', 'nx', 'ny'])):
    """
    A rectangle of the complex plane together with the sizes of the seeding
    grid. Real-axis searches use im_min = im_max = 0 and ny = 1.
    """
    __slots__ = ()

    def __new__(cls, re_min, re_max, im_min=0., im_max=0., nx=DEFAULT_GRID, ny=DEFAULT_GRID):  # pylint: disable=too-many-arguments
        if not re_min < re_max:
            raise ValueError(f'Invalid real range [{re_min}, {re_max}]')
        if not im_min <= im_max:
            raise ValueError(f'Invalid imaginary range [{im_min}, {im_max}]')
        if int(nx) < 2 or int(ny) < 1:
            raise ValueError(f'Invalid grid size {nx}x{ny}')
        if im_min == im_max:
            ny = 1
        return super().__new__(cls, float(re_min), float(re_max), float(im_min), float(im_max), int(nx), int(ny))

    @property
    def diameter(self):
        """
        The length of the diagonal of the rectangle
        """
        return math.hypot(self.re_max - self.re_min, self.im_max - self.im_min)

    @property
    def is_real(self):
        """
        *True* if the region is a segment of the real axis.
        """
        return self.im_min == self.im_max

    def contains(self, z, pad=0.):
        """
        Returns *True* if z lies inside the rectangle enlarged by *pad*.
        """
        return self.re_min - pad <= z.real <= self.re_max + pad and self.im_min - pad <= z.imag <= self.im_max + pad

    def grid(self):
        """
        The seeding grid as a complex array of shape (ny, nx)
        """
        re = np.linspace(self.re_min, self.re_max, self.nx)
        im = np.linspace(self.im_min, self.im_max, self.ny)
        return re[np.newaxis, :] + 1j * im[:, np.newaxis]

    def around(self, z, half_width):
        """
        A square box centered at z.
        """
        return SearchRegion(z.real - half_width, z.real + half_width, z.imag - half_width, z.imag + half_width, self.nx, self.ny)

    def refined(self):
        """
        The same rectangle with a grid of twice the resolution
        """
        return self._replace(nx=2 * self.nx - 1, ny=2 * self.ny - 1 if self.ny > 1 else 1)

    def shifted(self, offset):
        """
        The rectangle moved along the real axis by *offset*.
        """
        return self._replace(re_min=self.re_min + offset, re_max=self.re_max + offset)


class RootOptions(namedtuple('RootOptions', ['tol', 'max_iter', 'dedup_rtol', 'cluster_rtol', 'fd_step', 'max_refinements'])):
    """
    The options of the root finder. The dedup and cluster tolerances are
    relative to the diameter of the search region.
    """
    __slots__ = ()

    def __new__(cls, tol=1e-12, max_iter=100, dedup_rtol=1e-7, cluster_rtol=1e-3, fd_step=1e-7, max_refinements=2):  # pylint: disable=too-many-arguments
        if not tol > 0 or not fd_step > 0:
            raise ValueError('The tolerance and the finite-difference step must be positive')
        if int(max_iter) < 1 or int(max_refinements) < 0:
            raise ValueError('Invalid iteration limits')
        if not 0 < dedup_rtol <= cluster_rtol:
            raise ValueError(f'Expected 0 < dedup_rtol <= cluster_rtol, got {dedup_rtol}, {cluster_rtol}')
        return super().__new__(cls, float(tol), int(max_iter), float(dedup_rtol), float(cluster_rtol), float(fd_step), int(max_refinements))


class SpectrumResult(namedtuple('SpectrumResult', ['roots', 'region', 'count_by_winding', 'count_by_inertia', 'warnings'])):
    """
    The located roots sorted by (Re, Im) together with the search region, the
    root count certificates and the warnings raised while searching.
    """
    __slots__ = ()

    def __new__(cls, roots, region, count_by_winding=None, count_by_inertia=None, warnings=()):  # pylint: disable=too-many-arguments
        return super().__new__(cls, tuple(sort_roots(roots)), region, count_by_winding, count_by_inertia, tuple(warnings))

    def values(self, expand=False):
        """
        The root positions as a complex array. With *expand* every root is
        repeated according to its multiplicity hint.
        """
        if expand:
            return np.array([root.z for root in self.roots for _ in range(root.multiplicity_hint)], dtype=complex)
        return np.array([root.z for root in self.roots], dtype=complex)

    @property
    def total_multiplicity(self):
        """
        The number of roots counted with their multiplicity hints
        """
        return sum(root.multiplicity_hint for root in self.roots)


def sort_roots(roots):
    """
    Sort roots by (Re, Im) of their position.
    """
    return sorted(roots, key=lambda root: (root.z.real, root.z.imag))


def _evaluate(secular, z):
    return np.asarray(secular(np.asarray(z, dtype=complex)), dtype=complex)


def gershgorin_region(h, nx=DEFAULT_GRID, ny=DEFAULT_GRID):
    """
    The bounding box of the Gershgorin discs of a tridiagonal matrix, padded by
    10% of its extent.
    """
    radii = np.zeros(h.dim)
    radii[:-1] += np.abs(h.upper)
    radii[1:] += np.abs(h.lower)
    re_min, re_max = np.min(h.diag.real - radii), np.max(h.diag.real + radii)
    im_min, im_max = np.min(h.diag.imag - radii), np.max(h.diag.imag + radii)
    extent = max(re_max - re_min, im_max - im_min)
    if extent == 0:
        extent = max(1., float(np.max(np.abs(h.diag))))
    pad_re = 0.1 * (re_max - re_min) or 0.1 * extent
    pad_im = 0.1 * (im_max - im_min) or 0.1 * extent
    return SearchRegion(re_min - pad_re, re_max + pad_re, im_min - pad_im, im_max + pad_im, nx, ny)


def newton_refine(secular, z0, tol=1e-12, max_iter=100, fd_step=1e-7, region=None, value_tol=None):  # pylint: disable=too-many-arguments
    """
    Newton iteration with a central finite-difference derivative.

    The iteration stops if the step falls below tol * max(1, |z|) or if the
    function value falls below *value_tol*, which defaults to tol. Use
    value_tol=0 for functions whose magnitude carries no absolute scale. With a
    *region* the iterate must stay inside the rectangle padded by 10% of its
    diameter.
    """
    z = complex(z0)
    value_tol = tol if value_tol is None else value_tol
    pad = 0.1 * region.diameter if region is not None else 0.
    for iteration in range(max_iter + 1):
        step = max(fd_step, fd_step * abs(z))
        value, forward, backward = _evaluate(secular, [z, z + step, z - step])
        if not np.isfinite(value):
            raise BreakdownError(f'Secular function not finite at z={z}')
        if abs(value) < value_tol:
            return NewtonResult(z, abs(value), iteration)
        if iteration == max_iter:
            break
        derivative = (forward - backward) / (2 * step)
        if not np.isfinite(derivative) or derivative == 0:
            raise BreakdownError(f'Derivative not usable at z={z}')
        update = value / derivative
        z -= update
        if not np.isfinite(z):
            raise RootDivergenceError('Newton iteration produced a non-finite iterate')
        if region is not None and not region.contains(z, pad):
            raise RootDivergenceError(f'Newton iteration left the search region at z={z}')
        if abs(update) < tol * max(1., abs(z)):
            residual = abs(_evaluate(secular, z))
            if not np.isfinite(residual):
                raise BreakdownError(f'Secular function not finite at z={z}')
            _logger.debug('Newton converged to %(z)s after %(iters)d steps.', {'z': z, 'iters': iteration + 1})
            return NewtonResult(z, float(residual), iteration + 1)
    raise RootDivergenceError(f'Newton iteration did not converge within {max_iter} steps, last z={z}')


def _strict_minima(magnitude):
    padded = np.pad(magnitude, 1, mode='constant', constant_values=np.inf)
    rows, cols = magnitude.shape
    is_minimum = np.ones(magnitude.shape, dtype=bool)
    for d_row in (-1, 0, 1):
        for d_col in (-1, 0, 1):
            if d_row == 0 and d_col == 0:
                continue
            neighbor = padded[1 + d_row:1 + d_row + rows, 1 + d_col:1 + d_col + cols]
            is_minimum &= magnitude < neighbor
    return is_minimum


def grid_seed(secular, region):
    """
    Seeds for the Newton iteration: the strict local minima of |S| on the
    grid of the region that lie below the median of |S|. The seeds are moved
    off the grid point by a small fraction of a cell, a seed on a symmetry
    axis of S would keep the iteration on that axis.
    """
    grid = region.grid()
    magnitude = np.abs(_evaluate(secular, grid))
    magnitude[~np.isfinite(magnitude)] = np.inf
    finite = magnitude[np.isfinite(magnitude)]
    if finite.size == 0:
        return []
    candidates = _strict_minima(magnitude) & (magnitude < np.median(finite))
    dx = (region.re_max - region.re_min) / (region.nx - 1)
    dy = (region.im_max - region.im_min) / (region.ny - 1) if region.ny > 1 else 0.
    jitter = complex(SEED_JITTER[0] * dx, SEED_JITTER[1] * dy)
    seeds = [complex(z) + jitter for z in grid[candidates]]
    _logger.debug('Found %(count)d seeds on a %(nx)dx%(ny)d grid.', {'count': len(seeds), 'nx': region.nx, 'ny': region.ny})
    return sorted(seeds, key=lambda z: (z.real, z.imag))


def _contour(region, samples):
    t = np.linspace(0., 1., samples, endpoint=False)
    corners = [complex(region.re_min, region.im_min), complex(region.re_max, region.im_min),
               complex(region.re_max, region.im_max), complex(region.re_min, region.im_max)]
    edges = [start + (end - start) * t for start, end in zip(corners, corners[1:] + corners[:1])]
    return np.concatenate(edges)


def _winding(secular, region, samples):
    values = _evaluate(secular, _contour(region, samples))
    if not np.all(np.isfinite(values)) or np.any(values == 0):
        raise ContourError('The contour passes through a zero or a breakdown of the function')
    ratios = np.roll(values, -1) / values
    return float(np.sum(np.angle(ratios)) / (2 * math.pi))


def winding_count(secular, region, samples_per_edge=DEFAULT_SAMPLES_PER_EDGE):
    """
    The number of zeros minus poles of the function inside the region from the
    change of its argument along the boundary. The sampling is doubled until
    two consecutive refinements give the same count.
    """
    if region.is_real:
        raise ContourError('A winding number needs a two-dimensional region')
    samples = samples_per_edge
    previous, stable = None, 0
    while samples <= MAX_SAMPLES_PER_EDGE:
        count = int(round(_winding(secular, region, samples)))
        stable = stable + 1 if count == previous else 0
        if stable == 2:
            return count
        previous = count
        samples *= 2
    raise ContourError(f'Winding number did not stabilize with {MAX_SAMPLES_PER_EDGE} samples per edge')


def refine_seeds(secular, seeds, region, options=None):
    """
    Run the Newton iteration from every seed. Seeds that diverge or run into a
    breakdown are dropped. Roots outside of the region are discarded.
    """
    options = RootOptions() if options is None else options
    roots = []
    for seed in seeds:
        try:
            result = newton_refine(secular, seed, options.tol, options.max_iter, options.fd_step, region=region)
        except (RootDivergenceError, BreakdownError) as exc:
            _logger.debug('Dropping seed %(seed)s: %(error)s.', {'seed': seed, 'error': exc})
            continue
        if region.contains(result.z):
            roots.append(Root(result.z, result.residual, result.iters, 1))
    return roots


def deduplicate(roots, tol):
    """
    Merge roots closer than *tol*, keeping the one with the smaller residual.
    """
    kept = []
    for root in sorted(roots, key=lambda root: root.residual):
        if all(abs(root.z - other.z) >= tol for other in kept):
            kept.append(root)
    return sort_roots(kept)


def match_roots(found, reference):
    """
    Pair two root lists by repeatedly matching the globally closest pair.
    Returns the matches sorted by the reference position.
    """
    found, reference = [complex(z) for z in found], [complex(z) for z in reference]
    if not found or not reference:
        return []
    distance = np.abs(np.subtract.outer(np.array(found), np.array(reference)))
    matches = []
    for _ in range(min(len(found), len(reference))):
        i, j = np.unravel_index(np.argmin(distance), distance.shape)
        matches.append(Match(found[i], reference[j], float(distance[i, j])))
        distance[i, :] = np.inf
        distance[:, j] = np.inf
    return sorted(matches, key=lambda match: (match.reference.real, match.reference.imag))


def _cluster_warnings(roots, tol):
    warnings = []
    for i, root in enumerate(roots):
        for other in roots[i + 1:]:
            if abs(root.z - other.z) < tol:
                warnings.append(f'Roots {root.z:.10g} and {other.z:.10g} closer than {tol:.3g}: possible exceptional point or degeneracy')
    return warnings


def _local_multiplicities(counter, roots, region, tol):
    """
    Count zeros in a small box around every root. A box that holds more zeros
    than located roots marks an unresolved cluster.
    """
    roots, warnings = list(roots), []
    for i, root in enumerate(roots):
        box = region.around(root.z, tol)
        try:
            local = winding_count(counter, box)
        except ContourError:
            continue
        inside = sum(1 for other in roots if box.contains(other.z))
        if local > inside:
            roots[i] = root._replace(multiplicity_hint=local - inside + 1)
            warnings.append(f'{local} zeros near {root.z:.10g} but only {inside} located: unresolved cluster, possible exceptional point')
    return roots, warnings


def _residual(handles, z):
    values = [abs(complex(_evaluate(handle, z))) for handle in handles]
    finite = [value for value in values if math.isfinite(value)]
    return min(finite) if finite else math.inf


def _refine_characteristic(characteristic, handles, seeds, region, options):  # pylint: disable=too-many-arguments
    """
    Newton on the pole-free characteristic function. The residual of a root is
    the smallest value of the secular functions there.
    """
    roots = []
    for seed in seeds:
        try:
            result = newton_refine(characteristic, seed, options.tol, options.max_iter, options.fd_step, region=region, value_tol=0.)
        except (RootDivergenceError, BreakdownError) as exc:
            _logger.debug('Dropping seed %(seed)s of the characteristic function: %(error)s.', {'seed': seed, 'error': exc})
            continue
        if region.contains(result.z):
            roots.append(Root(result.z, _residual(handles, result.z), result.iters, 1))
    return roots


def _search(handles, characteristic, grid, region, options, skip_primary=False):  # pylint: disable=too-many-arguments
    """
    Seed on the grid of every handle and of the characteristic function and
    refine all seeds with every handle.
    """
    seeds = [] if characteristic is None else grid_seed(characteristic, grid)
    for index, handle in enumerate(handles):
        if index or not skip_primary:
            seeds.extend(grid_seed(handle, grid))
    roots = []
    for handle in handles:
        roots.extend(refine_seeds(handle, seeds, region, options))
    if characteristic is not None:
        roots.extend(_refine_characteristic(characteristic, handles, seeds, region, options))
    return roots


def _split_clusters(handles, counter, roots, region, options, tol):  # pylint: disable=too-many-arguments
    """
    Seed around every root whose neighbourhood holds more zeros than located
    roots.
    """
    found = []
    for root in roots:
        box = region.around(root.z, tol)
        try:
            local = winding_count(counter, box)
        except ContourError:
            continue
        if local <= sum(1 for other in roots if box.contains(other.z)):
            continue
        seeds = [root.z + 0.5 * tol * cmath.exp(1j * (SPLIT_ANGLE + 0.5 * math.pi * k)) for k in range(4)]
        for handle in handles:
            found.extend(refine_seeds(handle, seeds, box, options))
    return found


def _unresolved_cells(counter, handles, roots, grid, region):
    """
    Grid cells around minima of the counter that hold zeros but no located
    root. Every such cell is reported as a root at its seed with the local
    count as multiplicity hint.
    """
    dx = (grid.re_max - grid.re_min) / (grid.nx - 1)
    dy = (grid.im_max - grid.im_min) / (grid.ny - 1)
    unresolved, warnings = [], []
    for seed in grid_seed(counter, grid):
        cell = SearchRegion(seed.real - dx, seed.real + dx, seed.imag - dy, seed.imag + dy, grid.nx, grid.ny)
        if any(cell.contains(root.z) for root in roots):
            continue
        try:
            local = winding_count(counter, cell)
        except ContourError:
            continue
        if local > 0 and region.contains(seed):
            unresolved.append(Root(seed, _residual(handles, seed), 0, local))
            warnings.append(f'{local} zeros near {seed:.10g} could not be refined: unresolved cluster, possible exceptional point')
    return unresolved, warnings


def certify_roots(secular, region, roots, options=None, characteristic=None, fallbacks=()):  # pylint: disable=too-many-arguments,too-many-locals
    """
    Deduplicate Newton roots, flag clusters and compare the result with the
    winding number of the region.

    If fewer roots than the certificate were found, the search is repeated,
    first on the same grid, then on grids refined up to
    options.max_refinements times. A repeated search seeds from the
    *characteristic* function and from the *fallbacks*, secular functions with
    the same eigenvalues anchored at other rows, and refines every seed with
    all of them. Roots whose neighbourhood holds more zeros than roots are
    split by seeding around them. Zeros that still cannot be refined are
    reported at their grid cell with a warning.
    """
    options = RootOptions() if options is None else options
    counter = secular if characteristic is None else characteristic
    handles = [secular] + list(fallbacks)
    dedup_tol = options.dedup_rtol * region.diameter
    cluster_tol = options.cluster_rtol * region.diameter
    roots = deduplicate(roots, dedup_tol)
    warnings = []

    count = None
    if not region.is_real:
        try:
            count = winding_count(counter, region)
        except ContourError as exc:
            warnings.append(f'No winding certificate: {exc}')

    grid = region
    for attempt in range(options.max_refinements + 1):
        if count is None or len(roots) >= count:
            break
        if attempt:
            grid = grid.refined()
        _logger.info('Found %(found)d of %(count)d roots, searching again on a %(nx)dx%(ny)d grid.', {'found': len(roots), 'count': count, 'nx': grid.nx, 'ny': grid.ny})
        roots = deduplicate(roots + _search(handles, characteristic, grid, region, options, skip_primary=attempt == 0), dedup_tol)
        roots = deduplicate(roots + _split_clusters(handles, counter, roots, region, options, cluster_tol), dedup_tol)

    warnings.extend(_cluster_warnings(roots, cluster_tol))
    if not region.is_real:
        roots, local_warnings = _local_multiplicities(counter, roots, region, cluster_tol)
        warnings.extend(local_warnings)
        if count is not None and sum(root.multiplicity_hint for root in roots) < count:
            unresolved, cell_warnings = _unresolved_cells(counter, handles, roots, grid, region)
            roots.extend(unresolved)
            warnings.extend(cell_warnings)
    result = SpectrumResult(roots, region, count, None, warnings)
    if count is not None and result.total_multiplicity != count:
        warnings.append(f'Winding count {count} differs from the {result.total_multiplicity} located roots')
    for warning in warnings:
        _logger.warning(warning)
    return result._replace(warnings=tuple(warnings))


def locate_roots(secular, region, options=None, characteristic=None, fallbacks=None):  # pylint: disable=too-many-arguments
    """
    Locate the zeros of a secular function inside a region: seed on the grid,
    refine by Newton, then deduplicate and certify the count.

    Parameters
    ----------
    secular : callable
        The secular function handle, vectorized over numpy arrays.
    region : SearchRegion
        The search rectangle and seeding grid.
    options : RootOptions, optional
        Tolerances of the root finder.
    characteristic : callable, optional
        A pole-free function with the same zeros, used for winding counts.
    fallbacks : list of callables, optional
        Secular functions with the same zeros that are searched if roots are
        missing. Defaults to secular.alternatives() if the handle has it.
    """
    options = RootOptions() if options is None else options
    if fallbacks is None:
        fallbacks = secular.alternatives() if hasattr(secular, 'alternatives') else ()
    roots = refine_seeds(secular, grid_seed(secular, region), region, options)
    return certify_roots(secular, region, roots, options, characteristic, fallbacks)


def _bisect(f, lo, hi, f_lo, tol):
    while hi - lo > tol * max(1., abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        f_mid = float(f(mid))
        if not np.isfinite(f_mid):
            return None
        if f_mid == 0:
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def golden_minimum(g, lo, hi, tol):
    x1, x2 = hi - GOLDEN * (hi - lo), lo + GOLDEN * (hi - lo)
    g1, g2 = g(x1), g(x2)
    while hi - lo > tol * max(1., abs(lo), abs(hi)):
        if g1 < g2:
            hi, x2, g2 = x2, x1, g1
            x1 = hi - GOLDEN * (hi - lo)
            g1 = g(x1)
        else:
            lo, x1, g1 = x1, x2, g2
            x2 = lo + GOLDEN * (hi - lo)
            g2 = g(x2)
    return (x1, g1) if g1 < g2 else (x2, g2)


def real_bisect(f, interval, resolution=2000, tol=1e-14, minimum_threshold=1e-12):
    """
    Locate the roots of a real function on an interval.

    The function is scanned at *resolution* equidistant points, each sign
    change is bisected to the relative tolerance *tol*. A bracket whose
    function value grows instead of shrinking encloses a pole and is dropped.
    Interior local minima of |f| without a sign change are refined by a
    golden-section search and reported as even-multiplicity candidates if the
    minimum falls below *minimum_threshold*.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise ValueError(f'Invalid interval [{lo}, {hi}]')
    x = np.linspace(lo, hi, max(int(resolution), 3))
    values = np.asarray(f(x), dtype=float)
    finite = np.isfinite(values)
    roots, candidates = [], []

    roots.extend(float(x_i) for x_i in x[finite & (values == 0)])
    for i in range(len(x) - 1):
        if not (finite[i] and finite[i + 1]) or values[i] == 0 or values[i + 1] == 0:
            continue
        if (values[i] < 0) == (values[i + 1] < 0):
            continue
        root = _bisect(f, x[i], x[i + 1], values[i], tol)
        if root is None or not abs(float(f(root))) <= min(abs(values[i]), abs(values[i + 1])):
            _logger.debug('Dropping the pole bracketed by [%(lo)g, %(hi)g].', {'lo': x[i], 'hi': x[i + 1]})
            continue
        roots.append(root)

    magnitude = np.where(finite, np.abs(values), np.inf)
    for i in range(1, len(x) - 1):
        if not magnitude[i] < magnitude[i - 1] or not magnitude[i] <= magnitude[i + 1]:
            continue
        if (values[i - 1] < 0) != (values[i] < 0) or (values[i] < 0) != (values[i + 1] < 0):
            continue
        position, minimum = golden_minimum(lambda s: abs(float(f(s))), x[i - 1], x[i + 1], 1e-15)
        if minimum < minimum_threshold:
            candidates.append(float(position))
    return BracketedRoots(sorted(roots), sorted(candidates))
