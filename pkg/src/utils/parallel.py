from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from config.config import config

T = TypeVar('T')
R = TypeVar('R')


def resolve_workers(workers: Optional[int]) -> int:
    return max(1, int(workers if workers is not None else config.WORKERS))


def ordered_map(func: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None,
                chunksize: int = 16) -> List[R]:
    """
    Map func over items, in a process pool when workers > 1.

    Results come back in input order whatever the worker count, so callers that
    reduce them get identical output for any partition. func must be a
    module-level function.
    """
    items = list(items)
    workers = resolve_workers(workers)
    if workers == 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items, chunksize=chunksize))
