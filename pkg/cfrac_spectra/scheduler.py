# -*- coding: utf-8 -*-
"""
Runs blocking numerical work in an executor under a wall-clock timeout.
"""
import asyncio
import functools
import logging

from async_timeout import timeout

DEFAULT_TASK_TIMEOUT = 600  # in seconds


class TaskScheduler:
    """
    Dispatches calls to the default executor of the running event loop. Every
    call is bounded by the timeout, a batch submitted by map() is bounded as a
    whole. Results are always returned in input order.
    """
    @property
    def timeout(self):
        """
        Returns the timeout for a task or batch in seconds.
        """
        return self.__timeout

    @timeout.setter
    def timeout(self, value):
        """
        The timeout used for tasks and batches.
        """
        self.__timeout = abs(float(value))

    def __init__(self, timeout=DEFAULT_TASK_TIMEOUT, executor=None):  # pylint: disable=redefined-outer-name
        self.__timeout = abs(float(timeout))
        self.__executor = executor
        self.__lock = None  # The lock is created lazily, because it needs a running loop
        self.__logger = logging.getLogger(__name__)

    def __repr__(self):
        return f'{self.__class__.__module__}.{self.__class__.__qualname__}(timeout={self.__timeout})'

    async def run(self, func, *args, **kwargs):
        """
        Run a single call in the executor and return its result.
        """
        loop = asyncio.get_running_loop()
        try:
            async with timeout(self.__timeout):
                return await loop.run_in_executor(self.__executor, functools.partial(func, *args, **kwargs))
        except asyncio.TimeoutError:
            raise asyncio.TimeoutError(f'Task {getattr(func, "__name__", func)} did not finish within {self.__timeout} s') from None

    async def map(self, func, items):
        """
        Apply func to every item in parallel. Batches are serialized, so that
        two batches do not compete for the executor.
        """
        if self.__lock is None:
            self.__lock = asyncio.Lock()
        items = list(items)
        loop = asyncio.get_running_loop()
        async with self.__lock:
            self.__logger.debug('Dispatching %(count)d tasks of %(func)s.', {'count': len(items), 'func': getattr(func, '__name__', func)})
            try:
                async with timeout(self.__timeout):
                    return await asyncio.gather(*(loop.run_in_executor(self.__executor, func, item) for item in items))
            except asyncio.TimeoutError:
                raise asyncio.TimeoutError(f'Batch of {len(items)} tasks did not finish within {self.__timeout} s') from None
