# -*- coding: utf-8 -*-
"""
The command line front end. Every subcommand builds a model, runs one
computation and writes a self-describing table.
"""
import argparse
import asyncio
from collections import namedtuple
import functools
import logging
import os

import numpy as np

from ._version import __version__
from .cfrac import SecularFunction, SecularMode
from .config import TASKS, ConfigError, RunConfig
from .factor import factorize, left_eigenvector, polish_eigenvalue, wavefunction_one_sided, wavefunction_two_sided
from .hermitize import SearchInterval, singular_value_bound, singular_values
from .model_factory import model_factory
from .operators import FiniteTridiagonal, WindowError, snapshot, truncate
from .oracle import OracleSizeError, det_scan_spectrum, jacobi_eigen, lu_det, svd_oracle
from .output import write_table
from .roots import SearchRegion, certify_roots, gershgorin_region, grid_seed, match_roots, refine_seeds
from .scheduler import TaskScheduler

EXIT_OK = 0
EXIT_THRESHOLD = 1
EXIT_CONFIG_ERROR = 2
EXIT_CERTIFICATE = 3
EXIT_NUMERICAL_ERROR = 4

RECONSTRUCTION_TOLERANCE = 1e-12
DETERMINANT_TOLERANCE = 1e-10

Prepared = namedtuple('Prepared', ['source', 'matrix', 'shift', 'description'])

_logger = logging.getLogger(__name__)


def _prepare(config):
    model = model_factory.get(config['model'], **config.model_params())
    source, matrix = model.source, None
    if config['window'] is not None:
        matrix = truncate(source, *config['window'])
        source = matrix.to_source(source.name)
    elif source.is_finite:
        matrix = snapshot(source)
    return Prepared(source, matrix, model.shift, model.description)


def _require_matrix(prepared, task):
    if prepared.matrix is None:
        raise WindowError(f'Task {task} needs a finite matrix, set a window')
    return prepared.matrix


def _region(config, prepared):
    nx, ny = config['grid']
    if config['region'] is not None:
        re_min, re_max, im_min, im_max = config['region']
        return SearchRegion(re_min - prepared.shift, re_max - prepared.shift, im_min, im_max, nx, ny)
    return gershgorin_region(_require_matrix(prepared, config['task']), nx, ny)


def _secular(config, prepared, mode=None):
    return SecularFunction(prepared.source, config.cf_options(), mode=mode or config['secular'], center=config['center'])


def _header(config, prepared, **diagnostics):
    header = dict(config.resolved())
    if prepared is not None:
        header['model_description'] = prepared.description
        header['energy_shift'] = prepared.shift
    header.update(diagnostics)
    return header


def _warning_lines(warnings):
    return {f'warning_{index:03d}': warning for index, warning in enumerate(warnings, start=1)}


def _scale(prepared):
    return 1. + (prepared.matrix.max_abs() if prepared.matrix is not None else 0.)


async def _locate(scheduler, secular, region, options):
    seeds = await scheduler.run(grid_seed, secular, region)
    chunks = [seeds[index::os.cpu_count() or 1] for index in range(os.cpu_count() or 1)]
    refined = await scheduler.map(functools.partial(refine_seeds, secular, region=region, options=options), [chunk for chunk in chunks if chunk])
    roots = [root for chunk in refined for root in chunk]
    return await scheduler.run(certify_roots, secular, region, roots, options, secular.characteristic, secular.alternatives())


async def cmd_spectrum(config, scheduler):
    """
    Locate the complex eigenvalues in a region and write them with residuals
    and the winding-number certificate.
    """
    prepared = _prepare(config)
    secular = _secular(config, prepared)
    region = _region(config, prepared)
    result = await _locate(scheduler, secular, region, config.root_options())
    limit = config['threshold'] * _scale(prepared)
    failed = [root for root in result.roots if not root.residual <= limit]
    rows = [[root.z.real + prepared.shift, root.z.imag, root.residual, root.newton_iters, root.multiplicity_hint] for root in result.roots]
    header = _header(
        config, prepared,
        count_by_winding=result.count_by_winding if result.count_by_winding is not None else 'none',
        located=len(result.roots),
        matching_row=secular.center,
        residual_limit=limit,
        **_warning_lines(result.warnings),
    )
    write_table(config['out'], ['re', 'im', 'residual', 'newton_iters', 'multiplicity_hint'], rows, header, config['format'])
    if result.count_by_winding is not None and result.total_multiplicity != result.count_by_winding:
        _logger.error('The winding count %(count)d differs from the %(located)d located roots.', {'count': result.count_by_winding, 'located': result.total_multiplicity})
        return EXIT_CERTIFICATE
    if failed:
        _logger.error('%(count)d roots exceed the residual limit %(limit)g.', {'count': len(failed), 'limit': limit})
        return EXIT_THRESHOLD
    return EXIT_OK


async def cmd_singular(config, scheduler):
    """
    Locate the singular values with the matrix continued fraction and,
    optionally, compare them with the dense oracle.
    """
    prepared = _prepare(config)
    matrix = _require_matrix(prepared, 'singular')
    if prepared.shift:
        matrix = FiniteTridiagonal(matrix.diag + prepared.shift, matrix.upper, matrix.lower, offset=matrix.offset)
    source = matrix.to_source(prepared.source.name)
    if config['interval'] is not None:
        search = SearchInterval(config['interval'][0], config['interval'][1], config['resolution'])
    else:
        search = SearchInterval(0., 1.05 * singular_value_bound(matrix) + 1e-3, config['resolution'])
    center = config['center'] if config['secular'] == SecularMode.TWO_SIDED.value else source.window.lo
    result = await scheduler.run(singular_values, source, config.cf_options(), search, center)
    sigmas = np.sort(result.values(expand=True).real)
    residuals = {root.z.real: root.residual for root in result.roots}
    multiplicities = {root.z.real: root.multiplicity_hint for root in result.roots}

    columns = ['sigma', 'residual', 'multiplicity']
    rows = [[sigma, residuals[sigma], multiplicities[sigma]] for sigma in sigmas]
    diagnostics = {'count_by_inertia': result.count_by_inertia, 'located': len(sigmas)}
    status = EXIT_OK
    if config['verify']:
        reference = svd_oracle(matrix)
        reference = reference[(reference >= search.lo) & (reference <= search.hi)]
        if len(reference) != len(sigmas):
            _logger.error('Located %(found)d singular values, the oracle has %(expected)d.', {'found': len(sigmas), 'expected': len(reference)})
            status = EXIT_THRESHOLD
        columns += ['sigma_oracle', 'abs_diff']
        for row, expected in zip(rows, reference):
            row += [expected, abs(row[0] - expected)]
        for row in rows[len(reference):]:
            row += [float('nan'), float('nan')]
        max_diff = max((row[-1] for row in rows[:len(reference)]), default=0.)
        diagnostics['max_abs_diff'] = max_diff
        if not max_diff <= config['threshold']:
            status = EXIT_THRESHOLD
        dense = matrix.to_dense()
        if np.allclose(dense, dense.conj().T, rtol=0., atol=1e-14):
            absolute = np.sort(np.abs(jacobi_eigen(dense)))
            absolute = absolute[(absolute >= search.lo) & (absolute <= search.hi)]
            hermitian_diff = float(np.max(np.abs(absolute - sigmas))) if len(absolute) == len(sigmas) else float('inf')
            diagnostics['hermitian_abs_e_diff'] = hermitian_diff
            if not hermitian_diff <= config['threshold']:
                status = EXIT_THRESHOLD
    write_table(config['out'], columns, rows, _header(config, prepared, **diagnostics, **_warning_lines(result.warnings)), config['format'])
    if result.count_by_inertia != len(sigmas):
        _logger.error('The inertia count %(count)d differs from the %(located)d located singular values.', {'count': result.count_by_inertia, 'located': len(sigmas)})
        return EXIT_CERTIFICATE
    return status


async def cmd_wavefunction(config, scheduler):
    """
    Reconstruct the eigenvector of an eigenvalue from the factorization.
    """
    prepared = _prepare(config)
    matrix = _require_matrix(prepared, 'wavefunction')
    energy = complex(*config['energy']) - prepared.shift
    one_sided = config['secular'] == SecularMode.ONE_SIDED.value
    center = matrix.offset if one_sided else config['center']
    energy = await scheduler.run(polish_eigenvalue, matrix, energy, config.cf_options(), center)
    if one_sided:
        psi = await scheduler.run(wavefunction_one_sided, matrix, energy)
    else:
        psi = await scheduler.run(wavefunction_two_sided, matrix, energy, center)
    limit = config['threshold'] * _scale(prepared)
    diagnostics = {
        'energy_re': energy.real + prepared.shift,
        'energy_im': energy.imag,
        'normalization': psi.normalization,
        'residual': psi.residual,
        'residual_limit': limit,
    }
    failed = not psi.residual <= limit
    if config['verify']:
        phi = await scheduler.run(left_eigenvector, matrix, energy, None if one_sided else center)
        diagnostics['left_residual'] = phi.residual
        failed = failed or not phi.residual <= limit
    rows = [[psi.offset + index, value.real, value.imag] for index, value in enumerate(psi.values)]
    write_table(config['out'], ['index', 're_psi', 'im_psi'], rows, _header(config, prepared, **diagnostics), config['format'])
    return EXIT_THRESHOLD if failed else EXIT_OK


def _green_rows(secular, kind, shift, zs):
    evaluation = secular.evaluate(zs)
    with np.errstate(divide='ignore', invalid='ignore'):
        values = np.asarray(evaluation.value) if kind == 'secular' else 1 / np.asarray(evaluation.value)
    breakdown = np.broadcast_to(evaluation.breakdown, values.shape)
    return [[z.real + shift, z.imag, value.real, value.imag, abs(value), bool(flag)] for z, value, flag in zip(zs, values, breakdown)]


async def cmd_green_grid(config, scheduler):
    """
    Evaluate the secular function or the one-sided Green's function on the
    nodes of a grid.
    """
    prepared = _prepare(config)
    kind = config['kind']
    secular = _secular(config, prepared, mode=SecularMode.ONE_SIDED.value if kind == 'green' else None)
    region = _region(config, prepared)
    grid = region.grid()
    chunks = await scheduler.map(functools.partial(_green_rows, secular, kind, prepared.shift), list(grid))
    rows = [row for chunk in chunks for row in chunk]
    write_table(config['out'], ['re_z', 'im_z', 're_value', 'im_value', 'abs_value', 'breakdown'], rows, _header(config, prepared, nodes=len(rows)), config['format'])
    return EXIT_OK


def _random_matrix(rng, dim):
    def draw(size):
        return rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return FiniteTridiagonal(draw(dim), draw(dim - 1), draw(dim - 1), offset=1)


def _factor_rows(matrix, z, sample):
    dense = matrix.to_dense() - z * np.eye(matrix.dim)
    reference = lu_det(matrix, z) if matrix.dim <= 64 else None
    centers = [matrix.offset]
    if matrix.dim > 2:
        centers.append(matrix.offset + matrix.dim // 2)
    rows = []
    for center in centers:
        factors = factorize(matrix, z, center=center)
        reconstruction = float(np.max(np.abs(factors.reconstruct() - dense))) / (1. + matrix.max_abs())
        determinant = abs(factors.determinant() - reference) / abs(reference) if reference else float('nan')
        rows.append([sample, factors.layout, center, reconstruction, determinant])
    return rows


async def cmd_factor_check(config, scheduler):
    """
    Check the reconstruction and the determinant identity of the
    factorization on random or model matrices.
    """
    rng = np.random.default_rng(config['seed'])
    prepared = _prepare(config) if config['model'] is not None else None
    rows = []
    for sample in range(config['samples']):
        matrix = _require_matrix(prepared, 'factor-check') if prepared is not None else _random_matrix(rng, config['dim'])
        radius = singular_value_bound(matrix) + 1.
        z = radius * np.exp(2j * np.pi * rng.random())
        rows.extend(await scheduler.run(_factor_rows, matrix, z, sample))
    max_reconstruction = max(row[3] for row in rows)
    max_determinant = max((row[4] for row in rows if np.isfinite(row[4])), default=0.)
    header = _header(config, prepared, max_reconstruction_error=max_reconstruction, max_determinant_error=max_determinant)
    write_table(config['out'], ['sample', 'layout', 'center', 'reconstruction_error', 'determinant_error'], rows, header, config['format'])
    if max_reconstruction > RECONSTRUCTION_TOLERANCE or max_determinant > DETERMINANT_TOLERANCE:
        _logger.error('Factorization check failed: reconstruction %(rec)g, determinant %(det)g.', {'rec': max_reconstruction, 'det': max_determinant})
        return EXIT_THRESHOLD
    return EXIT_OK


async def cmd_oracle_compare(config, scheduler):
    """
    Compare the continued-fraction eigenvalues with the determinant scan of
    the dense matrix.
    """
    prepared = _prepare(config)
    matrix = _require_matrix(prepared, 'oracle-compare')
    region = _region(config, prepared)
    options = config.root_options()
    found = await _locate(scheduler, _secular(config, prepared), region, options)
    reference = await scheduler.run(det_scan_spectrum, matrix, region, options)
    matches = match_roots(found.values(), reference.values())
    shift = prepared.shift
    rows = [[match.found.real + shift, match.found.imag, match.reference.real + shift, match.reference.imag, match.distance] for match in matches]
    max_distance = max((match.distance for match in matches), default=0.)
    header = _header(config, prepared, located=len(found.roots), oracle_roots=len(reference.roots), max_distance=max_distance, **_warning_lines(found.warnings))
    write_table(config['out'], ['re_cf', 'im_cf', 're_oracle', 'im_oracle', 'distance'], rows, header, config['format'])
    if len(found.roots) != len(reference.roots) or not max_distance <= config['threshold']:
        _logger.error('Oracle comparison failed: %(found)d vs %(expected)d roots, max distance %(distance)g.', {'found': len(found.roots), 'expected': len(reference.roots), 'distance': max_distance})
        return EXIT_THRESHOLD
    return EXIT_OK


async def cmd_models(config, scheduler):  # pylint: disable=unused-argument
    """
    List the registered models.
    """
    write_table(config['out'], ['name', 'description'], model_factory.available(), {}, config['format'])
    return EXIT_OK


COMMANDS = {
    'spectrum': cmd_spectrum,
    'singular': cmd_singular,
    'wavefunction': cmd_wavefunction,
    'green-grid': cmd_green_grid,
    'factor-check': cmd_factor_check,
    'oracle-compare': cmd_oracle_compare,
    'models': cmd_models,
}


async def run_task(config):
    """
    Run the task of a validated configuration and return the exit code.
    """
    scheduler = TaskScheduler(timeout=config['timeout'])
    _logger.info('Running task %(task)s.', {'task': config['task']})
    status = await COMMANDS[config['task']](config, scheduler)
    _logger.info('Task %(task)s finished with exit code %(status)d.', {'task': config['task'], 'status': status})
    return status


def build_parser():
    """
    The argument parser with one subcommand per task
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='JSON configuration file, flags override its values')
    common.add_argument('--model', help='model kind, see the models subcommand')
    common.add_argument('--gamma', type=float)
    common.add_argument('--n-bosons', dest='n_bosons', type=int)
    common.add_argument('--interaction', type=float, help='experimental diagonal interaction c')
    common.add_argument('--eta', type=float, help='shift of the complex Buslaev-Grecchi potential')
    common.add_argument('--h', type=float, help='lattice spacing')
    common.add_argument('--potential', choices=['harmonic', 'buslaev-grecchi', 'buslaev-grecchi-complex', 'custom'])
    common.add_argument('--table', help='potential table with the columns x, Re V[, Im V]')
    common.add_argument('--window', nargs=2, type=int, metavar=('M', 'N'), help='truncate to the rows -M..N')
    common.add_argument('--center', type=int, help='matching row of the two-sided secular function')
    common.add_argument('--region', nargs=4, type=float, metavar=('RE0', 'RE1', 'IM0', 'IM1'))
    common.add_argument('--grid', nargs=2, type=int, metavar=('NX', 'NY'))
    common.add_argument('--tol', type=float)
    common.add_argument('--max-depth', dest='max_depth', type=int)
    common.add_argument('--verify', action='store_true', default=None)
    common.add_argument('--out', help='output file, stdout if omitted')
    common.add_argument('--format', choices=['csv', 'json'])
    common.add_argument('--seed', type=int)
    common.add_argument('--energy', nargs=2, type=float, metavar=('RE', 'IM'))
    common.add_argument('--interval', nargs=2, type=float, metavar=('LO', 'HI'))
    common.add_argument('--resolution', type=int)
    common.add_argument('--dim', type=int)
    common.add_argument('--samples', type=int)
    common.add_argument('--secular', choices=['two-sided', 'one-sided'])
    common.add_argument('--kind', choices=['secular', 'green'])
    common.add_argument('--threshold', type=float)
    common.add_argument('--timeout', type=float)
    common.add_argument('-v', '--verbose', action='count', default=0)

    parser = argparse.ArgumentParser(prog='cfrac-spectra', description='Spectra and singular values of tridiagonal non-Hermitian operators from continued fractions.')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    subparsers = parser.add_subparsers(dest='task', required=True)
    for task in TASKS:
        subparsers.add_parser(task, parents=[common], help=COMMANDS[task].__doc__.strip().split('\n')[0])
    return parser


def _overrides(args):
    values = vars(args).copy()
    for key in ('config', 'verbose'):
        values.pop(key, None)
    return values


def main(argv=None):
    """
    The entry point of the command line tool. Returns the exit code.
    """
    args = build_parser().parse_args(argv)
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    try:
        config = RunConfig.from_file(args.config) if args.config else RunConfig()
        config = config.with_overrides(_overrides(args)).validate()
        return asyncio.run(run_task(config))
    except (ConfigError, WindowError, OracleSizeError, ValueError) as exc:
        _logger.error('Invalid configuration: %(error)s', {'error': exc})
        return EXIT_CONFIG_ERROR
    except asyncio.TimeoutError as exc:
        _logger.error('Timeout: %(error)s', {'error': exc})
        return EXIT_CONFIG_ERROR
    except ArithmeticError as exc:
        _logger.error('Numerical failure: %(error)s', {'error': exc})
        return EXIT_NUMERICAL_ERROR
