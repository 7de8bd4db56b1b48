# -*- coding: utf-8 -*-
"""
Writers for result tables. A CSV table starts with '#'-prefixed lines holding
the resolved configuration and diagnostics as 'key = value' pairs, followed by
'# columns: ...' and the rows. The JSON document carries the same data.
"""
import csv
from enum import Enum, unique
import json
import logging
import sys

import numpy as np

_logger = logging.getLogger(__name__)


@unique
class OutputFormat(Enum):
    """
    The supported table formats
    """
    CSV = 'csv'
    JSON = 'json'


def format_value(value):
    """
    Convert a value to its canonical text form. Floats use the shortest
    representation that round-trips.
    """
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, (list, tuple)):
        return ' '.join(format_value(item) for item in value)
    return str(value)


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (list, tuple)):
        return [_json_value(item) for item in value]
    if isinstance(value, dict):
        return {str(key): _json_value(item) for key, item in value.items()}
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value if value is None or isinstance(value, str) else str(value)


def _write(stream, columns, rows, header, fmt):
    if fmt is OutputFormat.JSON:
        document = {
            'header': _json_value(dict(header)),
            'columns': list(columns),
            'rows': [[_json_value(value) for value in row] for row in rows],
        }
        json.dump(document, stream, sort_keys=True, indent=2)
        stream.write('\n')
        return
    for key, value in sorted(header.items()):
        stream.write(f'# {key} = {format_value(value)}\n')
    stream.write(f'# columns: {",".join(columns)}\n')
    writer = csv.writer(stream, lineterminator='\n')
    for row in rows:
        writer.writerow([format_value(value) for value in row])


def write_table(destination, columns, rows, header=None, fmt=OutputFormat.CSV):
    """
    Write a table to a path, to a text stream or to stdout if *destination* is
    None or '-'.
    """
    fmt = OutputFormat(fmt)
    header = {} if header is None else header
    rows = list(rows)
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f'Row {row} does not match the columns {columns}')
    if destination is None or destination == '-':
        _write(sys.stdout, columns, rows, header, fmt)
    elif hasattr(destination, 'write'):
        _write(destination, columns, rows, header, fmt)
    else:
        with open(destination, 'w', encoding='utf-8', newline='') as stream:
            _write(stream, columns, rows, header, fmt)
        _logger.info('Wrote %(rows)d rows to %(path)s.', {'rows': len(rows), 'path': destination})
