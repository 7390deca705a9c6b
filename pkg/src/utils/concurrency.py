"""
Shard independent work items over worker threads and merge in item order
"""

import asyncio
import logging
from typing import Callable, List, Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def _chunks(items: Sequence[T], workers: int) -> List[List[T]]:
    size = max(1, -(-len(items) // workers))
    return [list(items[i:i + size]) for i in range(0, len(items), size)]


async def gather_sharded(fn: Callable[[T], R], items: Sequence[T], workers: int = 1) -> List[R]:
    """
    Run fn over items in `workers` shards.

    Results come back in item order regardless of completion order.
    """
    workers = max(1, workers)
    shards = _chunks(items, workers)
    logger.debug(f"Running {len(items)} items in {len(shards)} shards")

    def run_shard(shard: List[T]) -> List[R]:
        return [fn(item) for item in shard]

    results = await asyncio.gather(*(asyncio.to_thread(run_shard, shard) for shard in shards))
    return [r for shard_result in results for r in shard_result]


def run_sharded(fn: Callable[[T], R], items: Sequence[T], workers: int = 1) -> List[R]:
    """Synchronous entry point; runs in-line when workers == 1"""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    return asyncio.run(gather_sharded(fn, items, workers))
