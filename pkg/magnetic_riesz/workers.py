"""Thread pool helpers shared by the operator and the experiment sweeps."""
import concurrent.futures
import logging
import os
from threading import Lock
from typing import Callable, Iterable, List, TypeVar

log = logging.getLogger("processor")

T = TypeVar("T")
R = TypeVar("R")

PROGRESS_EVERY = 50


def thread_count(max_threads=None) -> int:
    """Number of worker threads, defaulting to min(32, 4 x cpu count)."""
    return int(max_threads or min(32, (os.cpu_count() or 1) * 4))


class ProgressCounter:
    """Counts finished tasks and logs every PROGRESS_EVERY completions."""

    def __init__(self, total: int, label: str):
        self.total = total
        self.label = label
        self.done = 0
        self._lock = Lock()

    def step(self):
        with self._lock:
            self.done += 1
            if self.done % PROGRESS_EVERY == 0 or self.done == self.total:
                log.debug("%i of %i %s finished", self.done, self.total, self.label)


def threaded_map(fn: Callable[[T], R],
                 items: Iterable[T],
                 max_threads=None,
                 label: str = "tasks"
                 ) -> List[R]:
    """Apply fn to every item on a thread pool; results keep the input order."""
    items = list(items)
    if not items:
        return []
    counter = ProgressCounter(len(items), label)

    def run(item):
        result = fn(item)
        counter.step()
        return result

    count = min(thread_count(max_threads), len(items))
    if count == 1:
        return [run(item) for item in items]
    with concurrent.futures.ThreadPoolExecutor(count, thread_name_prefix="thread") as executor:
        futures = [executor.submit(run, item) for item in items]
        return [fut.result() for fut in futures]
