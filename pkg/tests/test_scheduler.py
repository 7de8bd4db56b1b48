# -*- coding: utf-8 -*-
import asyncio
import time

import pytest

from cfrac_spectra.scheduler import DEFAULT_TASK_TIMEOUT, TaskScheduler


def square(value):
    return value * value


def test_run():
    scheduler = TaskScheduler()
    assert scheduler.timeout == DEFAULT_TASK_TIMEOUT
    assert asyncio.run(scheduler.run(pow, 2, 10)) == 1024


def test_map_preserves_order():
    scheduler = TaskScheduler(timeout=10)
    assert asyncio.run(scheduler.map(square, range(20))) == [value * value for value in range(20)]
    assert asyncio.run(scheduler.map(square, [])) == []


def test_timeout():
    scheduler = TaskScheduler(timeout=0.05)
    with pytest.raises(asyncio.TimeoutError, match='did not finish'):
        asyncio.run(scheduler.run(time.sleep, 0.5))
    scheduler.timeout = -0.05
    assert scheduler.timeout == 0.05
    with pytest.raises(asyncio.TimeoutError, match='Batch of 2 tasks'):
        asyncio.run(scheduler.map(time.sleep, [0.5, 0.5]))


def test_errors_propagate():
    scheduler = TaskScheduler()
    with pytest.raises(ZeroDivisionError):
        asyncio.run(scheduler.map(lambda value: 1 / value, [1, 0]))
