"""Counter-based random streams and deterministic batch scheduling.

Monte Carlo work is issued in fixed-size batches.  Batch b of a run seeded
with `seed` draws from a Philox generator whose 256-bit counter starts at
b << 128, so every batch owns a disjoint counter range derived only from
(seed, batch index).  Results are reduced in batch order.  Together these
make every estimate a pure function of (seed, n_samples, batch_size),
independent of how many workers execute the batches.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

__all__ = ["batch_generator", "batch_sizes", "run_batches", "DEFAULT_BATCH"]

DEFAULT_BATCH = 2048

_T = TypeVar("_T")


def batch_generator(seed: int, batch_index: int) -> np.random.Generator:
    """Philox stream for one batch: key = seed, counter base = batch << 128."""
    if batch_index < 0:
        raise ValueError("batch_index must be nonnegative")
    bg = np.random.Philox(key=np.uint64(seed & 0xFFFFFFFFFFFFFFFF), counter=batch_index << 128)
    return np.random.Generator(bg)


def batch_sizes(n_total: int, batch: int = DEFAULT_BATCH) -> list[int]:
    """Sizes of the fixed batch partition of n_total items."""
    if n_total < 0:
        raise ValueError("n_total must be nonnegative")
    full, rem = divmod(n_total, batch)
    out = [batch] * full
    if rem:
        out.append(rem)
    return out


def run_batches(
    work: Callable[[int, int], _T],
    n_total: int,
    batch: int = DEFAULT_BATCH,
    workers: int = 1,
) -> list[_T]:
    """Evaluate work(batch_index, batch_size) over the partition of n_total.

    Batches may run on a thread pool; the returned list is always in batch
    order, so any order-sensitive reduction downstream sees the same sequence
    regardless of `workers`.
    """
    sizes = batch_sizes(n_total, batch)
    if workers <= 1 or len(sizes) <= 1:
        return [work(i, sz) for i, sz in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(work, i, sz) for i, sz in enumerate(sizes)]
        return [f.result() for f in futures]
