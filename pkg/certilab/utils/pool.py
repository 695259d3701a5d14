import asyncio
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class TaskPool:
    """Runs independent numerical tasks on a thread pool, results in task order"""

    def __init__(self, jobs: int = 1):
        self.jobs = max(1, int(jobs))

    async def _gather(self, fn: Callable[[T], R], tasks: Sequence[T]) -> List[R]:
        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=self.jobs) as executor:
            futures = [loop.run_in_executor(executor, fn, task) for task in tasks]
            # first failure propagates; gather keeps submission order
            return list(await asyncio.gather(*futures))

    def map(self, fn: Callable[[T], R], tasks: Sequence[T]) -> List[R]:
        tasks = list(tasks)
        if self.jobs == 1 or len(tasks) <= 1:
            return [fn(task) for task in tasks]
        logger.debug("dispatching %d tasks to %d workers", len(tasks), self.jobs)
        return asyncio.run(self._gather(fn, tasks))


def run_ordered(fn: Callable[[T], R], tasks: Sequence[T], jobs: int = 1) -> List[R]:
    return TaskPool(jobs).map(fn, tasks)
