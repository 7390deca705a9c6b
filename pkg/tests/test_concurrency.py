import threading

from src.utils.concurrency import gather_sharded, run_sharded


def test_run_sharded_inline_keeps_order():
    assert run_sharded(lambda x: x * x, [3, 1, 2]) == [9, 1, 4]


def test_run_sharded_threads_keep_item_order():
    items = list(range(23))
    assert run_sharded(lambda x: x + 100, items, workers=4) == [x + 100 for x in items]


def test_run_sharded_empty():
    assert run_sharded(lambda x: x, [], workers=3) == []


async def test_gather_sharded_uses_worker_threads():
    seen = set()

    def work(x):
        seen.add(threading.get_ident())
        return -x

    result = await gather_sharded(work, list(range(10)), workers=3)
    assert result == [-x for x in range(10)]
    assert threading.get_ident() not in seen


async def test_gather_sharded_more_workers_than_items():
    assert await gather_sharded(str, [1, 2], workers=8) == ["1", "2"]
