# -*- coding: utf-8 -*-
"""
Tridiagonal operators and the model families used throughout the package.

A tridiagonal operator is described by three coefficient sequences: the
diagonal a_j, the superdiagonal b_j (coupling row j to row j+1) and the
subdiagonal c_j (coupling row j to row j-1). The index window may be unbounded
on either side. A `CoefficientSource` evaluates the coefficients lazily, a
`FiniteTridiagonal` is a dense snapshot of a truncated window.
"""
from collections import namedtuple
from enum import Enum, unique
import logging
import math

import numpy as np

Window = namedtuple('Window', ['lo', 'hi'])
GrowthFlags = namedtuple('GrowthFlags', ['grows_down', 'grows_up'])
LatticeHamiltonian = namedtuple('LatticeHamiltonian', ['matrix', 'shift'])

_logger = logging.getLogger(__name__)


class WindowError(IndexError):
    """
    Raised if a coefficient is queried outside of the declared index window or
    if a truncation window does not intersect the source window.
    """


def _as_index_range(lo, hi):
    return np.arange(int(lo), int(hi) + 1)


class CoefficientSource:
    """
    A lazily evaluated tridiagonal coefficient triple (a_j, b_j, c_j).

    The callables *diagonal*, *upper* and *lower* receive a numpy array of
    integer indices and must return the coefficients for all of them. They
    must be pure functions, so that a source can be shared between workers.
    The window bounds *lo* and *hi* are integers or -inf/+inf.
    """
    def __init__(self, name, diagonal, upper, lower, lo=-math.inf, hi=math.inf, grows_down=False, grows_up=False):  # pylint: disable=too-many-arguments
        if lo > hi:
            raise ValueError(f'Invalid window [{lo}, {hi}]')
        self.__name = name
        self.__diagonal = diagonal
        self.__upper = upper
        self.__lower = lower
        self.__window = Window(lo if math.isinf(lo) else int(lo), hi if math.isinf(hi) else int(hi))
        self.__growth_flags = GrowthFlags(bool(grows_down), bool(grows_up))

    def __repr__(self):
        return f'{self.__class__.__module__}.{self.__class__.__qualname__}(name={self.__name!r}, lo={self.__window.lo}, hi={self.__window.hi})'

    def __str__(self):
        return f'{self.__name} on [{self.__window.lo}, {self.__window.hi}]'

    @property
    def name(self):
        """
        A human readable name of the operator
        """
        return self.__name

    @property
    def window(self):
        """
        The index window (lo, hi). Either bound may be infinite.
        """
        return self.__window

    @property
    def growth_flags(self):
        """
        Declares whether |a_j| grows without bound below (grows_down) or above
        (grows_up) the window center.
        """
        return self.__growth_flags

    @property
    def is_finite(self):
        """
        Returns *True* if both window bounds are finite.
        """
        return not (math.isinf(self.__window.lo) or math.isinf(self.__window.hi))

    def contains(self, index):
        """
        Returns *True* if *index* is a row of the operator.
        """
        return self.__window.lo <= index <= self.__window.hi

    def __check(self, lo, hi, lower_limit, upper_limit):
        if lo < lower_limit or hi > upper_limit:
            raise WindowError(f'Indices [{lo}, {hi}] outside of the window of {self}')

    def diagonal(self, lo, hi):
        """
        Returns a_lo, ..., a_hi as a complex array.
        """
        if hi < lo:
            return np.zeros(0, dtype=complex)
        self.__check(lo, hi, self.__window.lo, self.__window.hi)
        return np.asarray(self.__diagonal(_as_index_range(lo, hi)), dtype=complex).reshape(-1)

    def upper(self, lo, hi):
        """
        Returns the superdiagonal b_lo, ..., b_hi. b_j is only defined for
        lo <= j < hi of the window.
        """
        if hi < lo:
            return np.zeros(0, dtype=complex)
        self.__check(lo, hi, self.__window.lo, self.__window.hi - 1)
        return np.asarray(self.__upper(_as_index_range(lo, hi)), dtype=complex).reshape(-1)

    def lower(self, lo, hi):
        """
        Returns the subdiagonal c_lo, ..., c_hi. c_j is only defined for
        lo < j <= hi of the window.
        """
        if hi < lo:
            return np.zeros(0, dtype=complex)
        self.__check(lo, hi, self.__window.lo + 1, self.__window.hi)
        return np.asarray(self.__lower(_as_index_range(lo, hi)), dtype=complex).reshape(-1)

    def a(self, j):  # pylint: disable=invalid-name
        """
        Returns the diagonal element a_j
        """
        return complex(self.diagonal(j, j)[0])

    def b(self, j):  # pylint: disable=invalid-name
        """
        Returns the superdiagonal element b_j
        """
        return complex(self.upper(j, j)[0])

    def c(self, j):  # pylint: disable=invalid-name
        """
        Returns the subdiagonal element c_j
        """
        return complex(self.lower(j, j)[0])

    def shifted(self, offset):
        """
        Re-index the operator. Index j of the new source reads index j+offset
        of this one.
        """
        offset = int(offset)
        return CoefficientSource(
            name=self.__name,
            diagonal=lambda j: self.__diagonal(j + offset),
            upper=lambda j: self.__upper(j + offset),
            lower=lambda j: self.__lower(j + offset),
            lo=self.__window.lo - offset,
            hi=self.__window.hi - offset,
            grows_down=self.__growth_flags.grows_down,
            grows_up=self.__growth_flags.grows_up,
        )

    def reflected(self):
        """
        Mirror the index order j -> -j. The superdiagonal of the mirrored
        operator is the subdiagonal of this one and vice versa.
        """
        return CoefficientSource(
            name=f'{self.__name} (reflected)',
            diagonal=lambda j: self.__diagonal(-j),
            upper=lambda j: self.__lower(-j),
            lower=lambda j: self.__upper(-j),
            lo=-self.__window.hi,
            hi=-self.__window.lo,
            grows_down=self.__growth_flags.grows_up,
            grows_up=self.__growth_flags.grows_down,
        )

    def transposed(self):
        """
        The transposed operator, used for left eigenvectors.
        """
        return CoefficientSource(
            name=f'{self.__name} (transposed)',
            diagonal=self.__diagonal,
            upper=lambda j: self.__lower(j + 1),
            lower=lambda j: self.__upper(j - 1),
            lo=self.__window.lo,
            hi=self.__window.hi,
            grows_down=self.__growth_flags.grows_down,
            grows_up=self.__growth_flags.grows_up,
        )

    def spot_check_growth(self, samples=8, start=16):
        """
        Sample |a_j| at exponentially spaced indices and check that it keeps
        increasing in every direction that declares growth.
        """
        for declared, sign, bound in ((self.__growth_flags.grows_up, 1, self.__window.hi),
                                      (self.__growth_flags.grows_down, -1, self.__window.lo)):
            if not declared:
                continue
            indices = [sign * start * 2**i for i in range(samples)]
            indices = [j for j in indices if self.contains(j)]
            if len(indices) < 2 or not math.isinf(bound):
                return False
            values = np.abs(np.concatenate([self.diagonal(j, j) for j in indices]))
            if not np.all(np.diff(values) > 0):
                return False
        return True


class FiniteTridiagonal:
    """
    A dense snapshot of a truncated tridiagonal operator. Row 0 of the arrays
    is the operator index *offset*.
    """
    def __init__(self, diag, upper, lower, offset=0):
        diag = np.array(diag, dtype=complex).reshape(-1)
        upper = np.array(upper, dtype=complex).reshape(-1)
        lower = np.array(lower, dtype=complex).reshape(-1)
        if len(diag) < 1:
            raise ValueError('A tridiagonal matrix needs at least one row')
        if len(upper) != len(diag) - 1 or len(lower) != len(diag) - 1:
            raise ValueError(f'Inconsistent array lengths: diag {len(diag)}, upper {len(upper)}, lower {len(lower)}')
        for array in (diag, upper, lower):
            array.flags.writeable = False
        self.__diag, self.__upper, self.__lower = diag, upper, lower
        self.__offset = int(offset)

    def __repr__(self):
        return f'{self.__class__.__module__}.{self.__class__.__qualname__}(dim={self.dim}, offset={self.__offset})'

    @classmethod
    def from_dense(cls, matrix, offset=0):
        """
        Take the three central diagonals of a square matrix.
        """
        matrix = np.asarray(matrix, dtype=complex)
        return cls(np.diag(matrix), np.diag(matrix, 1), np.diag(matrix, -1), offset=offset)

    @property
    def offset(self):
        """
        The operator index of the first row
        """
        return self.__offset

    @property
    def dim(self):
        """
        The number of rows
        """
        return len(self.__diag)

    @property
    def diag(self):
        """
        The diagonal a_offset, ..., a_last
        """
        return self.__diag

    @property
    def upper(self):
        """
        The superdiagonal b_offset, ..., b_{last-1}
        """
        return self.__upper

    @property
    def lower(self):
        """
        The subdiagonal c_{offset+1}, ..., c_last
        """
        return self.__lower

    @property
    def last(self):
        """
        The operator index of the last row
        """
        return self.__offset + self.dim - 1

    @property
    def indices(self):
        """
        All operator indices as an integer array.
        """
        return np.arange(self.__offset, self.last + 1)

    def contains(self, index):
        """
        Returns *True* if *index* is a row of the matrix.
        """
        return self.__offset <= index <= self.last

    def max_abs(self):
        """
        The largest absolute value of all matrix entries
        """
        return float(max(np.max(np.abs(array)) if len(array) else 0. for array in (self.__diag, self.__upper, self.__lower)))

    def to_dense(self):
        """
        Returns the full matrix as a numpy array.
        """
        return np.diag(self.__diag) + np.diag(self.__upper, 1) + np.diag(self.__lower, -1)

    def to_source(self, name='finite tridiagonal'):
        """
        Wrap the snapshot into a `CoefficientSource` with a finite window.
        """
        offset, diag, upper, lower = self.__offset, self.__diag, self.__upper, self.__lower
        return CoefficientSource(
            name=name,
            diagonal=lambda j: diag[j - offset],
            upper=lambda j: upper[j - offset],
            lower=lambda j: lower[j - offset - 1],
            lo=offset,
            hi=self.last,
        )

    def transpose(self):
        """
        The transposed matrix with the same index offset
        """
        return FiniteTridiagonal(self.__diag, self.__lower, self.__upper, offset=self.__offset)

    def reindexed(self, offset):
        """
        The same matrix with its first row labeled *offset*.
        """
        return FiniteTridiagonal(self.__diag, self.__upper, self.__lower, offset=offset)


@unique
class PotentialKind(Enum):
    """
    The potentials of the discretized Schrödinger equation
    """
    BUSLAEV_GRECCHI_REAL = 'buslaev-grecchi'
    BUSLAEV_GRECCHI_COMPLEX = 'buslaev-grecchi-complex'
    HARMONIC_TEST = 'harmonic'
    CUSTOM = 'custom'


class PotentialSpec:
    """
    A local potential V(x), evaluated on numpy arrays.
    """
    PotentialKind = PotentialKind

    def __init__(self, kind, eta=None, table=None):
        if not isinstance(kind, PotentialKind):
            kind = PotentialKind(kind)
        if kind is PotentialKind.BUSLAEV_GRECCHI_COMPLEX:
            if eta is None or not eta > 0:
                raise ValueError(f'The complex Buslaev-Grecchi potential requires eta > 0, got {eta}')
            eta = float(eta)
        if kind is PotentialKind.CUSTOM:
            if table is None:
                raise ValueError('A custom potential requires a table of (x, V) values')
            table = np.array(table, dtype=complex)
            if table.ndim != 2 or table.shape[1] != 2 or len(table) < 2:
                raise ValueError('A potential table needs at least two (x, V) rows')
            table = table[np.argsort(table[:, 0].real)]
            table.flags.writeable = False
        self.__kind = kind
        self.__eta = eta
        self.__table = table

    def __repr__(self):
        return f'{self.__class__.__module__}.{self.__class__.__qualname__}(kind={self.__kind}, eta={self.__eta})'

    @classmethod
    def from_table(cls, path):
        """
        Read a custom potential from a text table with the columns x, Re V and
        optionally Im V.
        """
        data = np.loadtxt(path, ndmin=2)
        if data.shape[1] not in (2, 3):
            raise ValueError(f'Potential table {path} must have 2 or 3 columns, found {data.shape[1]}')
        values = data[:, 1] + (1j * data[:, 2] if data.shape[1] == 3 else 0)
        _logger.debug('Loaded potential table %(path)s with %(rows)d rows.', {'path': path, 'rows': len(data)})
        return cls(PotentialKind.CUSTOM, table=np.column_stack((data[:, 0], values)))

    @property
    def kind(self):
        """
        The potential family as a PotentialKind enum
        """
        return self.__kind

    @property
    def eta(self):
        """
        The shift of the complex Buslaev-Grecchi potential
        """
        return self.__eta

    @property
    def x_range(self):
        """
        The interval on which the potential is defined
        """
        if self.__kind is PotentialKind.CUSTOM:
            return float(self.__table[0, 0].real), float(self.__table[-1, 0].real)
        return -math.inf, math.inf

    @property
    def grows(self):
        """
        *True* if |V(x)| diverges for x -> ±inf.
        """
        return self.__kind is not PotentialKind.CUSTOM

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.__kind is PotentialKind.BUSLAEV_GRECCHI_REAL:
            return (x**2 * (x - 1)**2 - x + 0.5).astype(complex)
        if self.__kind is PotentialKind.BUSLAEV_GRECCHI_COMPLEX:
            shifted = x - 1j * self.__eta
            return -shifted**4 / 4 + shifted**2 / 4
        if self.__kind is PotentialKind.HARMONIC_TEST:
            return (x**2).astype(complex)
        lo, hi = self.x_range
        if np.any(x < lo - 1e-12 * (1 + abs(lo))) or np.any(x > hi + 1e-12 * (1 + abs(hi))):
            raise WindowError(f'Potential table covers [{lo}, {hi}] only')
        nodes = self.__table[:, 0].real
        return np.interp(x, nodes, self.__table[:, 1].real) + 1j * np.interp(x, nodes, self.__table[:, 1].imag)


def bose_hubbard(n_bosons, gamma, interaction=0.0):
    """
    The complexified two-mode Bose-Hubbard Hamiltonian with a fixed number of
    bosons. The window has K = n_bosons + 1 rows, row k = 0..n_bosons is
    labeled j = lo + k with lo = floor(-n_bosons/2). The diagonal is
    -i gamma (N - 2k) and the off-diagonals are sqrt((k+1)(N-k)) on both sides.

    The *interaction* adds (c/2)(N - 2k)^2 to the diagonal. It is an
    experimental extension, the benchmark spectra all use c = 0.
    """
    n_bosons = int(n_bosons)
    if n_bosons < 1:
        raise ValueError(f'The Bose-Hubbard model needs at least one boson, got {n_bosons}')
    gamma, interaction = float(gamma), float(interaction)
    lo = math.floor(-n_bosons / 2)

    def diagonal(j):
        imbalance = n_bosons - 2 * (j - lo)
        return -1j * gamma * imbalance + 0.5 * interaction * imbalance**2

    def upper(j):
        k = j - lo
        return np.sqrt((k + 1) * (n_bosons - k))

    return CoefficientSource(
        name=f'bose-hubbard(N={n_bosons}, gamma={gamma})',
        diagonal=diagonal,
        upper=upper,
        lower=lambda j: upper(j - 1),
        lo=lo,
        hi=lo + n_bosons,
    )


def non_bh_k5(gamma):
    """
    The complex-symmetric K=5 Bose-Hubbard-like alternative. The matrix is
    centered, its rows are labeled -2..2.
    """
    gamma = float(gamma)
    diag = -1j * gamma * np.array([4, 2, 0, -2, -4])
    couplings = np.array([8, 1j * math.sqrt(54), 1j * math.sqrt(54), 8])
    return FiniteTridiagonal(diag, couplings, couplings, offset=-2)


def singh_like_source():
    """
    A synthetic source with the asymptotics of a sextic oscillator in the
    continued-fraction representation: a_n = n, b_n = 4 n^2, c_{n+1} = -n on
    the window [1, inf). It does not reproduce any physical spectrum.
    """
    return CoefficientSource(
        name='singh-like (synthetic)',
        diagonal=lambda n: n.astype(complex),
        upper=lambda n: 4. * n**2,
        lower=lambda n: -(n - 1.),
        lo=1,
        hi=math.inf,
        grows_up=True,
    )


def free_lattice_source():
    """
    A source with constant coefficients a = 0, b = c = 1 on [1, inf). The
    continued fraction does not converge inside the band [-2, 2].
    """
    return CoefficientSource(
        name='free lattice',
        diagonal=lambda n: np.zeros(len(n), dtype=complex),
        upper=lambda n: np.ones(len(n), dtype=complex),
        lower=lambda n: np.ones(len(n), dtype=complex),
        lo=1,
        hi=math.inf,
    )


def lattice_source(potential, h):
    """
    The discretized Schrödinger operator -d^2/dx^2 + V(x) on the lattice
    x_k = k h with the constant 2/h^2 removed from the diagonal.
    """
    if not h > 0:
        raise ValueError(f'The lattice spacing must be positive, got {h}')
    h = float(h)
    x_min, x_max = potential.x_range
    lo = math.ceil(x_min / h - 1e-9) if not math.isinf(x_min) else -math.inf
    hi = math.floor(x_max / h + 1e-9) if not math.isinf(x_max) else math.inf
    hopping = -1 / h**2
    return CoefficientSource(
        name=f'lattice({potential.kind.value}, h={h})',
        diagonal=lambda k: potential(k * h),
        upper=lambda k: np.full(len(k), hopping, dtype=complex),
        lower=lambda k: np.full(len(k), hopping, dtype=complex),
        lo=lo,
        hi=hi,
        grows_down=potential.grows,
        grows_up=potential.grows,
    )


def truncate(source, m, n):
    """
    Copy the coefficients on the window [-m, n] intersected with the window of
    the source.
    """
    assert m >= 0 and n >= 0
    lo = max(-int(m), source.window.lo)
    hi = min(int(n), source.window.hi)
    if lo > hi:
        raise WindowError(f'The window [{-m}, {n}] does not intersect {source}')
    return FiniteTridiagonal(
        source.diagonal(lo, hi),
        source.upper(lo, hi - 1),
        source.lower(lo + 1, hi),
        offset=lo,
    )


def discrete_schrodinger(potential, lo, hi, h):
    """
    The lattice Hamiltonian on the rows lo..hi. Returns the matrix together
    with the shift 2/h^2: an eigenvalue E of the matrix corresponds to the
    energy E + shift of the discretized Schrödinger equation.
    """
    if not h > 0:
        raise ValueError(f'The lattice spacing must be positive, got {h}')
    if not lo < hi:
        raise ValueError(f'Invalid lattice window [{lo}, {hi}]')
    source = lattice_source(potential, h)
    lo, hi = max(int(lo), source.window.lo), min(int(hi), source.window.hi)
    if lo > hi:
        raise WindowError(f'The lattice window does not intersect the potential range {potential.x_range}')
    matrix = FiniteTridiagonal(source.diagonal(lo, hi), source.upper(lo, hi - 1), source.lower(lo + 1, hi), offset=lo)
    return LatticeHamiltonian(matrix, 2 / h**2)


def is_complex_symmetric(h, tol=0.):
    """
    Returns *True* if b_k = c_{k+1} for all rows.
    """
    return bool(np.all(np.abs(h.upper - h.lower) <= tol))


def is_anti_pt_symmetric(h, tol=0.):
    """
    Returns *True* if reversing the index order and conjugating all entries
    reproduces the matrix.
    """
    matrix = h.to_dense()
    return bool(np.all(np.abs(np.conj(matrix[::-1, ::-1]) - matrix) <= tol))


def snapshot(source):
    """
    The full matrix of a source with a finite window.
    """
    if not source.is_finite:
        raise WindowError(f'{source} has an unbounded window')
    lo, hi = source.window
    return truncate(source, max(-lo, 0), max(hi, 0))
