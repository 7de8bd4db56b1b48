# -*- coding: utf-8 -*-
"""
The run configuration of the command line tool. A configuration is a flat
JSON key/value document, explicit command line flags override it. Unknown keys
are rejected and task-specific fields are validated before any computation
starts.
"""
import json
import logging

from .cfrac import CfOptions, DepthGrowth, SecularMode
from .model_factory import ModelKind
from .operators import PotentialKind
from .output import OutputFormat
from .roots import RootOptions
from .scheduler import DEFAULT_TASK_TIMEOUT

TASKS = ('spectrum', 'singular', 'wavefunction', 'green-grid', 'factor-check', 'oracle-compare', 'models')
GREEN_KINDS = ('secular', 'green')

DEFAULTS = {
    'task': None,
    'model': None,
    'n_bosons': None,
    'gamma': None,
    'interaction': 0.,
    'eta': None,
    'h': None,
    'potential': PotentialKind.HARMONIC_TEST.value,
    'table': None,
    'window': None,
    'center': None,
    'region': None,
    'grid': [101, 101],
    'tol': 1e-12,
    'max_iter': 100,
    'dedup_rtol': 1e-7,
    'cluster_rtol': 1e-3,
    'tol_tail': 1e-13,
    'max_depth': 10**6,
    'breakdown_eps': 1e-14,
    'depth_growth': DepthGrowth.DOUBLING.value,
    'initial_depth': 16,
    'fixed_depth': 64,
    'verify': False,
    'out': None,
    'format': OutputFormat.CSV.value,
    'seed': 0,
    'energy': None,
    'interval': None,
    'resolution': 2000,
    'dim': 8,
    'samples': 1,
    'secular': SecularMode.TWO_SIDED.value,
    'kind': 'secular',
    'threshold': 1e-8,
    'timeout': DEFAULT_TASK_TIMEOUT,
}

_INTEGERS = ('n_bosons', 'center', 'max_iter', 'max_depth', 'initial_depth', 'fixed_depth', 'seed', 'resolution', 'dim', 'samples')
_FLOATS = ('gamma', 'interaction', 'eta', 'h', 'tol', 'dedup_rtol', 'cluster_rtol', 'tol_tail', 'breakdown_eps', 'threshold', 'timeout')
_SEQUENCES = {'window': (2, int), 'region': (4, float), 'grid': (2, int), 'energy': (2, float), 'interval': (2, float)}
_UNBOUNDED_MODELS = (ModelKind.DISCRETE_SCHRODINGER.value, ModelKind.SINGH_LIKE.value)

_logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    """
    Raised if the configuration contains unknown keys, misses a required field
    or holds an invalid value.
    """


def _coerce(key, value):  # pylint: disable=too-many-return-statements
    if value is None:
        return None
    try:
        if key in _INTEGERS:
            return int(value)
        if key in _FLOATS:
            return float(value)
        if key in _SEQUENCES:
            length, kind = _SEQUENCES[key]
            value = [kind(item) for item in value]
            if len(value) != length:
                raise ConfigError(f'{key} needs {length} values, got {len(value)}')
            return value
        if key == 'verify':
            return bool(value)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f'Invalid value for {key}: {value!r}') from None
    return value


class RunConfig:
    """
    A validated set of configuration values
    """
    def __init__(self, values=None):
        values = {} if values is None else dict(values)
        unknown = sorted(set(values) - set(DEFAULTS))
        if unknown:
            raise ConfigError(f'Unknown configuration keys: {", ".join(unknown)}')
        self.__values = dict(DEFAULTS)
        for key, value in values.items():
            self.__values[key] = _coerce(key, value)

    def __repr__(self):
        return f'{self.__class__.__module__}.{self.__class__.__qualname__}(task={self.__values["task"]!r}, model={self.__values["model"]!r})'

    @classmethod
    def from_file(cls, path):
        """
        Load a JSON configuration document.
        """
        try:
            with open(path, 'r', encoding='utf-8') as file:
                document = json.load(file)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f'Cannot read configuration file {path}: {exc}') from None
        if not isinstance(document, dict):
            raise ConfigError(f'Configuration file {path} must contain a key/value document')
        _logger.debug('Loaded configuration file %(path)s.', {'path': path})
        return cls(document)

    def with_overrides(self, overrides):
        """
        Returns a new configuration with all values of *overrides* that are
        not None applied.
        """
        values = {key: value for key, value in self.__values.items() if value != DEFAULTS[key]}
        values.update({key: value for key, value in overrides.items() if value is not None})
        return RunConfig(values)

    def __getitem__(self, key):
        return self.__values[key]

    def resolved(self):
        """
        All values as a dict sorted by key
        """
        return {key: self.__values[key] for key in sorted(self.__values)}

    def cf_options(self):
        """
        The continued-fraction options
        """
        try:
            return CfOptions(self['tol_tail'], self['max_depth'], self['breakdown_eps'], self['depth_growth'], self['initial_depth'], self['fixed_depth'])
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def root_options(self):
        """
        The options of the root finder
        """
        try:
            return RootOptions(self['tol'], self['max_iter'], self['dedup_rtol'], self['cluster_rtol'])
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def model_params(self):
        """
        The parameters passed to the model factory
        """
        return {key: self[key] for key in ('n_bosons', 'gamma', 'interaction', 'eta', 'h', 'potential', 'table')}

    def validate(self):  # pylint: disable=too-many-branches
        """
        Check the task-specific requirements. Returns the configuration.
        """
        task = self['task']
        if task not in TASKS:
            raise ConfigError(f'Unknown task {task!r}, expected one of {", ".join(TASKS)}')
        self.cf_options()
        self.root_options()
        for key, enum in (('format', OutputFormat), ('secular', SecularMode), ('potential', PotentialKind)):
            try:
                enum(self[key])
            except ValueError:
                raise ConfigError(f'Invalid value for {key}: {self[key]!r}') from None
        if self['kind'] not in GREEN_KINDS:
            raise ConfigError(f'Invalid value for kind: {self["kind"]!r}')
        if task == 'models':
            return self
        model = self['model']
        if model is None and not (task == 'factor-check'):
            raise ConfigError(f'Task {task} requires a model')
        if model is not None:
            try:
                ModelKind(model)
            except ValueError:
                raise ConfigError(f'Unknown model {model!r}') from None
            unbounded = model in _UNBOUNDED_MODELS
            if unbounded and self['window'] is None and task != 'spectrum' and task != 'green-grid':
                raise ConfigError(f'Task {task} on the unbounded model {model} requires a window')
            if unbounded and self['window'] is None and self['region'] is None:
                raise ConfigError(f'Task {task} on the unbounded model {model} requires a region or a window')
            if self['window'] is not None and min(self['window']) < 0:
                raise ConfigError('The window depths M N must be non-negative')
        if task == 'wavefunction' and self['energy'] is None:
            raise ConfigError('Task wavefunction requires an energy')
        if self['interval'] is not None and not 0 <= self['interval'][0] < self['interval'][1]:
            raise ConfigError('The singular value interval must satisfy 0 <= lo < hi')
        if self['region'] is not None:
            re_min, re_max, im_min, im_max = self['region']
            if not (re_min < re_max and im_min <= im_max):
                raise ConfigError('The region must satisfy re0 < re1 and im0 <= im1')
        if self['grid'][0] < 2 or self['grid'][1] < 1:
            raise ConfigError('The grid needs at least 2x1 nodes')
        if self['dim'] < 1 or self['samples'] < 1 or self['resolution'] < 3:
            raise ConfigError('dim, samples and resolution must be positive')
        return self
