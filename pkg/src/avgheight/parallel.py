"""Deterministic chunked parallel map.

Work is split by the caller into an ordered list of chunks; results come
back in chunk order whatever the worker count, so any reduction done by the
caller in that order is bit-identical across runs.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def chunk_ranges(lo: int, hi: int, nchunks: int) -> list[tuple[int, int]]:
    """Split the integer range ``[lo, hi]`` into at most ``nchunks`` contiguous pieces."""
    total = hi - lo + 1
    if total <= 0:
        return []
    nchunks = max(1, min(nchunks, total))
    size, extra = divmod(total, nchunks)
    out, start = [], lo
    for i in range(nchunks):
        end = start + size + (1 if i < extra else 0) - 1
        out.append((start, end))
        start = end + 1
    return out


def ordered_map(func: Callable[[T], R], items: Sequence[T], workers: int = 1) -> list[R]:
    """``[func(x) for x in items]``, optionally across processes, in input order."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def default_chunks(workers: int, span: int) -> int:
    # a fixed chunk count independent of ``workers`` keeps float reductions identical
    return max(1, min(span, 64))


def flatten(parts: Iterable[list[T]]) -> list[T]:
    out: list[T] = []
    for p in parts:
        out.extend(p)
    return out
