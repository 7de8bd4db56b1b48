# -*- coding: utf-8 -*-
"""
The model factory which creates coefficient sources from a model kind and its
parameters
"""
from collections import namedtuple
from enum import Enum, unique

from .operators import PotentialKind, PotentialSpec, bose_hubbard, lattice_source, non_bh_k5, singh_like_source

Model = namedtuple('Model', ['source', 'shift', 'description'])


@unique
class ModelKind(Enum):
    """
    The model families known to the factory
    """
    BOSE_HUBBARD = 'bose-hubbard'
    NON_BH_K5 = 'non-bh-k5'
    DISCRETE_SCHRODINGER = 'discrete-schrodinger'
    SINGH_LIKE = 'singh-like'


def _require(params, *names):
    missing = [name for name in names if params.get(name) is None]
    if missing:
        raise ValueError(f'Missing model parameters: {", ".join(missing)}')


def _bose_hubbard(params):
    _require(params, 'n_bosons', 'gamma')
    source = bose_hubbard(params['n_bosons'], params['gamma'], params.get('interaction') or 0.)
    return Model(source, 0., f'Bose-Hubbard, N={params["n_bosons"]}, gamma={params["gamma"]}')


def _non_bh_k5(params):
    _require(params, 'gamma')
    return Model(non_bh_k5(params['gamma']).to_source('non-bh-k5'), 0., f'complex-symmetric K=5 alternative, gamma={params["gamma"]}')


def _potential(params):
    kind = PotentialKind(params.get('potential') or PotentialKind.HARMONIC_TEST.value)
    if kind is PotentialKind.CUSTOM:
        _require(params, 'table')
        return PotentialSpec.from_table(params['table'])
    return PotentialSpec(kind, eta=params.get('eta'))


def _discrete_schrodinger(params):
    _require(params, 'h')
    potential = _potential(params)
    h = params['h']
    return Model(lattice_source(potential, h), 2 / h**2, f'lattice Schroedinger operator, V={potential.kind.value}, h={h}')


def _singh_like(params):  # pylint: disable=unused-argument
    return Model(singh_like_source(), 0., 'synthetic source with sextic-oscillator asymptotics')


class ModelFactory:
    """
    The factory. Do not import this, as it is instantiated below to create a
    class object.
    """
    def __init__(self):
        self.__available_models = {}

    def register(self, kind, builder, description):
        """
        Register a new model builder with the factory
        """
        self.__available_models[ModelKind(kind)] = (builder, description)

    def get(self, kind, **params):
        """
        Create a new model from its kind and parameters
        """
        try:
            builder, _ = self.__available_models[ModelKind(kind)]
        except (KeyError, ValueError):
            raise ValueError(f'No model available for kind {kind}') from None
        return builder(params)

    def available(self):
        """
        Returns a list of (name, description) tuples of all registered models.
        """
        return [(kind.value, description) for kind, (_, description) in sorted(self.__available_models.items(), key=lambda item: item[0].value)]


model_factory = ModelFactory()

model_factory.register(ModelKind.BOSE_HUBBARD, _bose_hubbard, 'two-mode Bose-Hubbard with imaginary tilt (n_bosons, gamma[, interaction])')
model_factory.register(ModelKind.NON_BH_K5, _non_bh_k5, 'complex-symmetric 5x5 Bose-Hubbard-like matrix (gamma)')
model_factory.register(ModelKind.DISCRETE_SCHRODINGER, _discrete_schrodinger, 'discretized Schroedinger equation (potential, h[, eta, table])')
model_factory.register(ModelKind.SINGH_LIKE, _singh_like, 'synthetic unbounded source for convergence studies')
