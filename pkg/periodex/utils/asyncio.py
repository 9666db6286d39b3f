# Copyright (c) Meta Platforms, Inc. and affiliates.
# pyre-strict

from __future__ import annotations

import asyncio
import threading
from concurrent.futures import Executor
from typing import Any, Callable, Coroutine, Sequence, TypeVar

T = TypeVar("T")


def await_sync(awaitable: Coroutine[Any, Any, T]) -> T:
    """
    Run a coroutine to completion from sync code.

    Inside a running event loop (e.g. under a notebook or an async test) the
    coroutine gets its own loop on a helper thread; otherwise asyncio.run().
    """
    try:
        asyncio.get_running_loop()
    except RuntimeError:
        return asyncio.run(awaitable)

    result: dict[str, Any] = {}

    def _runner() -> None:
        try:
            result["value"] = asyncio.run(awaitable)
        except BaseException as e:
            result["error"] = e

    thread = threading.Thread(target=_runner, daemon=True)
    thread.start()
    thread.join()
    if "error" in result:
        raise result["error"]
    return result["value"]


async def gather_in_executor(
    executor: Executor, func: Callable[..., T], calls: Sequence[tuple[Any, ...]]
) -> list[T]:
    """
    Submit `func(*args)` for every entry of `calls` and wait for all of them.
    Results come back in submission order regardless of completion order.
    """
    loop = asyncio.get_running_loop()
    futures = [loop.run_in_executor(executor, func, *args) for args in calls]
    return list(await asyncio.gather(*futures))
