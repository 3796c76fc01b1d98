from __future__ import annotations

import logging

from multiprocessing import Pool
from threading import Lock, Thread
from typing import TYPE_CHECKING, Callable, Iterable, Iterator, Literal, Sequence, TypeVar

if TYPE_CHECKING:
    from typing_extensions import Self

_T = TypeVar('_T')
_R = TypeVar('_R')

class ThreadSafeIterator(Iterator[_T]):
    def __init__(self, iterable: Iterable[_T]):
        self.iterable = iter(iterable)
        self._lock = Lock()

    def __iter__(self) -> Self:
        return self

    def __next__(self) -> _T:
        with self._lock:
            return next(self.iterable)

def run_partitioned(
    fn: Callable[[_T], _R],
    items: Sequence[_T],
    threads: int = 1,
    workers: Literal["thread", "process"] = "thread",
) -> list[_R]:
    """Apply fn to every work item and return the results in item order.

    With threads > 1 the items are drained from a ThreadSafeIterator by that many worker threads,
    each writing into the result slot of its item. workers="process" maps the items over a
    multiprocessing pool instead; fn and the items must then be picklable.
    """
    log = logging.getLogger("latnab")
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    n = min(threads, len(items))
    if workers == "process":
        log.debug(f"Mapping {len(items)} work items over {n} processes")
        with Pool(n) as pool:
            return pool.map(fn, items)

    log.debug(f"Draining {len(items)} work items with {n} threads")
    results: list[_R | None] = [None] * len(items)
    errors: list[BaseException] = []
    work = ThreadSafeIterator(enumerate(items))

    def worker() -> None:
        for idx, item in work:
            try:
                results[idx] = fn(item)
            except BaseException as e:
                errors.append(e)
                return

    pool = [Thread(target=worker, daemon=True) for _ in range(n)]
    for t in pool:
        t.start()
    for t in pool:
        t.join()
    if errors:
        raise errors[0]
    return results # type: ignore[return-value]
