"""Counter-based random streams and a deterministic batch runner.

Every random draw in the package comes from a Philox stream keyed by the user
seed and a purpose tag; the batch index selects a disjoint counter range.  The
result of a computation therefore depends only on (seed, tag, batch layout),
never on how many worker threads executed the batches.
"""

from __future__ import annotations

import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")

_MASK64 = (1 << 64) - 1
BATCH_SIZE = 1 << 15


def substream(seed: int, tag: str, index: int = 0) -> np.random.Generator:
    key = np.array([int(seed) & _MASK64, zlib.crc32(tag.encode())], dtype=np.uint64)
    counter = np.array([0, 0, 0, int(index) & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def worker_count() -> int:
    """Worker cap from ``THINFILM_THREADS`` (defaults to the CPU count)."""
    raw = os.environ.get("THINFILM_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def batch_sizes(n: int, batch: int = BATCH_SIZE) -> list[int]:
    full, rest = divmod(int(n), batch)
    return [batch] * full + ([rest] if rest else [])


def map_ordered(fn: Callable[[int], T], n_tasks: int, workers: int | None = None) -> list[T]:
    """Run ``fn(i)`` for i in range(n_tasks); results come back in index order."""
    workers = worker_count() if workers is None else workers
    if workers <= 1 or n_tasks <= 1:
        return [fn(i) for i in range(n_tasks)]
    with ThreadPoolExecutor(max_workers=min(workers, n_tasks)) as pool:
        return list(pool.map(fn, range(n_tasks)))


class Moments:
    """Running count/mean/M2 merged with Chan's pairwise update."""

    __slots__ = ("n", "mean", "m2")

    def __init__(self, n: int = 0, mean: float = 0.0, m2: float = 0.0):
        self.n, self.mean, self.m2 = n, mean, m2

    @classmethod
    def of(cls, values: np.ndarray) -> "Moments":
        n = values.size
        if n == 0:
            return cls()
        mean = float(np.mean(values))
        return cls(n, mean, float(np.sum((values - mean) ** 2)))

    def merge(self, other: "Moments") -> "Moments":
        if other.n == 0:
            return self
        if self.n == 0:
            return Moments(other.n, other.mean, other.m2)
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * other.n / n
        m2 = self.m2 + other.m2 + delta * delta * self.n * other.n / n
        return Moments(n, mean, m2)

    @classmethod
    def combine(cls, parts: Sequence["Moments"]) -> "Moments":
        acc = cls()
        for p in parts:
            acc = acc.merge(p)
        return acc

    @property
    def std_error(self) -> float:
        if self.n < 2:
            return 0.0
        return float(np.sqrt(max(self.m2, 0.0) / (self.n - 1) / self.n))
