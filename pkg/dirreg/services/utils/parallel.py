import logging
from typing import Callable, Iterable, TypeVar

import joblib

from dirreg.config import thread_count

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def map_items(func: Callable[[T], R], items: Iterable[T], n_threads: int | None = None) -> list[R]:
    """Evaluate `func` over `items`, in order, on up to DIRREG_THREADS threads."""
    items = list(items)
    n_threads = n_threads or thread_count()
    if n_threads <= 1 or len(items) < 2:
        return [func(item) for item in items]

    logger.debug("evaluating %d items on %d threads", len(items), n_threads)
    return list(
        joblib.Parallel(n_jobs=n_threads, prefer="threads")(
            joblib.delayed(func)(item) for item in items
        )
    )
