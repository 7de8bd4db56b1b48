# -*- coding: utf-8 -*-
import io
import json

import pytest

from cfrac_spectra.cfrac import DepthGrowth
from cfrac_spectra.config import DEFAULTS, ConfigError, RunConfig
from cfrac_spectra.model_factory import ModelKind, model_factory
from cfrac_spectra.output import OutputFormat, format_value, write_table


def test_defaults():
    config = RunConfig()
    assert config['grid'] == [101, 101]
    assert config['format'] == 'csv'
    assert config.resolved() == dict(sorted(DEFAULTS.items()))


def test_unknown_keys_are_rejected():
    with pytest.raises(ConfigError, match='colour'):
        RunConfig({'colour': 'blue'})


def test_coercion():
    config = RunConfig({'gamma': '0.5', 'n_bosons': 3.0, 'window': ['4', 5], 'verify': 1})
    assert config['gamma'] == 0.5
    assert config['n_bosons'] == 3
    assert config['window'] == [4, 5]
    assert config['verify'] is True
    with pytest.raises(ConfigError):
        RunConfig({'region': [0, 1, 2]})
    with pytest.raises(ConfigError):
        RunConfig({'gamma': 'large'})


def test_overrides_take_precedence(tmp_path):
    path = tmp_path / 'run.json'
    path.write_text(json.dumps({'task': 'spectrum', 'model': 'bose-hubbard', 'n_bosons': 2, 'gamma': 0.1}))
    config = RunConfig.from_file(str(path)).with_overrides({'gamma': 0.4, 'n_bosons': None})
    assert config['gamma'] == 0.4
    assert config['n_bosons'] == 2
    assert config['task'] == 'spectrum'
    assert config.validate() is config


def test_from_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.from_file(str(tmp_path / 'missing.json'))
    path = tmp_path / 'list.json'
    path.write_text('[1, 2]')
    with pytest.raises(ConfigError):
        RunConfig.from_file(str(path))


def test_options():
    config = RunConfig({'tol_tail': 1e-10, 'depth_growth': 'fixed', 'fixed_depth': 32, 'tol': 1e-9})
    options = config.cf_options()
    assert options.tol_tail == 1e-10 and options.depth_growth is DepthGrowth.FIXED and options.fixed_depth == 32
    assert config.root_options().tol == 1e-9
    with pytest.raises(ConfigError):
        RunConfig({'max_depth': 0}).cf_options()


@pytest.mark.parametrize('values', [
    {'task': 'bogus'},
    {'task': 'spectrum'},
    {'task': 'spectrum', 'model': 'unknown'},
    {'task': 'singular', 'model': 'discrete-schrodinger', 'h': 0.1},
    {'task': 'spectrum', 'model': 'singh-like'},
    {'task': 'wavefunction', 'model': 'bose-hubbard', 'n_bosons': 1, 'gamma': 0.5},
    {'task': 'singular', 'model': 'bose-hubbard', 'interval': [2, 1]},
    {'task': 'spectrum', 'model': 'bose-hubbard', 'region': [1, 0, 0, 1]},
    {'task': 'spectrum', 'model': 'bose-hubbard', 'window': [-1, 2]},
    {'task': 'spectrum', 'model': 'bose-hubbard', 'format': 'xml'},
    {'task': 'green-grid', 'model': 'bose-hubbard', 'kind': 'density'},
])
def test_validation_errors(values):
    with pytest.raises(ConfigError):
        RunConfig(values).validate()


@pytest.mark.parametrize('values', [
    {'task': 'models'},
    {'task': 'factor-check'},
    {'task': 'spectrum', 'model': 'singh-like', 'region': [0, 10, -1, 1]},
    {'task': 'singular', 'model': 'discrete-schrodinger', 'h': 0.1, 'window': [10, 10]},
    {'task': 'wavefunction', 'model': 'bose-hubbard', 'energy': [0.8, 0]},
])
def test_valid_configurations(values):
    RunConfig(values).validate()


def test_model_params():
    config = RunConfig({'model': 'bose-hubbard', 'n_bosons': 2, 'gamma': 0.3})
    model = model_factory.get(config['model'], **config.model_params())
    assert model.source.window == (-1, 1)
    assert model.shift == 0


def test_model_factory():
    names = [name for name, _ in model_factory.available()]
    assert names == sorted(kind.value for kind in ModelKind)
    with pytest.raises(ValueError):
        model_factory.get('unknown')
    with pytest.raises(ValueError, match='gamma'):
        model_factory.get(ModelKind.BOSE_HUBBARD, n_bosons=2)
    model = model_factory.get('discrete-schrodinger', h=0.5, potential='harmonic')
    assert model.shift == pytest.approx(8.)
    assert model.source.a(2) == pytest.approx(1.)
    assert model_factory.get('non-bh-k5', gamma=0.1).source.window == (-2, 2)


def test_format_value():
    assert format_value(True) == '1'
    assert format_value(0.1) == '0.1'
    assert format_value(3) == '3'
    assert format_value(OutputFormat.JSON) == 'json'
    assert format_value([1, 2.5]) == '1 2.5'
    assert format_value(None) == 'None'


def test_write_csv():
    stream = io.StringIO()
    write_table(stream, ['re', 'im'], [[1.5, -0.25], [2, 0]], {'task': 'spectrum', 'count': 2})
    lines = stream.getvalue().splitlines()
    assert lines == ['# count = 2', '# task = spectrum', '# columns: re,im', '1.5,-0.25', '2,0']


def test_write_json(tmp_path):
    path = tmp_path / 'out.json'
    write_table(str(path), ['sigma'], [[0.5], [1.5]], {'grid': [3, 4]}, fmt='json')
    document = json.loads(path.read_text())
    assert document == {'header': {'grid': [3, 4]}, 'columns': ['sigma'], 'rows': [[0.5], [1.5]]}


def test_write_table_checks_rows():
    with pytest.raises(ValueError):
        write_table(io.StringIO(), ['a', 'b'], [[1]])
