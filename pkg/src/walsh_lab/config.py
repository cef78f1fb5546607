"""Runtime limits shared by every module."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


@dataclass
class Caps:
    """Resolution caps (in dyadic bits) and the thread budget.

    Exceeding a cap is an error, never a silent truncation.
    """

    bits_1d: int = 24
    bits_2d: int = 12
    threads: int = os.cpu_count() or 1


CAPS = Caps()


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Order-preserving map over a thread pool capped by ``CAPS.threads``.

    Results are collected in input order, so any later reduction is
    independent of scheduling.
    """
    items = list(items)
    if CAPS.threads <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=CAPS.threads) as pool:
        return list(pool.map(fn, items))
