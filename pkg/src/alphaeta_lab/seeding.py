"""
Random stream management.

All randomness flows from one master seed. Streams for a module or worker are
derived from ``(master_seed, tag, worker)`` through ``numpy.random.SeedSequence``
so no two consumers share a stream and no ambient randomness is used.
"""

import logging
import zlib
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, TypeVar

import numpy as np

logger = logging.getLogger(__name__)

T = TypeVar("T")

# Trials per Monte Carlo chunk. Fixed so results do not depend on worker count.
DEFAULT_CHUNK = 65536


def tag_hash(tag: str) -> int:
    """Stable 32-bit hash of a module tag."""
    return zlib.crc32(tag.encode("utf-8")) & 0xFFFFFFFF


def derive_rng(master_seed: int, tag: str, worker: int = 0) -> np.random.Generator:
    """
    Derive an independent generator for one module/worker.

    Args:
        master_seed: Run-wide master seed (unsigned 64-bit)
        tag: Module or experiment tag, e.g. ``"bob-ber"``
        worker: Worker index

    Returns:
        numpy Generator seeded from (master_seed, tag, worker)
    """
    if master_seed < 0:
        raise ValueError(f"master seed must be non-negative, got {master_seed}")
    seq = np.random.SeedSequence([int(master_seed), tag_hash(tag), int(worker)])
    return np.random.default_rng(seq)


def chunk_sizes(total: int, chunk: int = DEFAULT_CHUNK) -> List[int]:
    """Split ``total`` trials into chunks of at most ``chunk``."""
    if total < 0:
        raise ValueError(f"trial count must be non-negative, got {total}")
    sizes = [chunk] * (total // chunk)
    if total % chunk:
        sizes.append(total % chunk)
    return sizes


def run_chunked(
    fn: Callable[[int, np.random.Generator], T],
    total: int,
    rng: np.random.Generator,
    chunk: int = DEFAULT_CHUNK,
    workers: Optional[int] = None,
) -> List[T]:
    """
    Run ``fn(size, chunk_rng)`` over fixed-size chunks of a trial budget.

    Each chunk gets its own generator seeded from a value drawn from ``rng``
    up front, so the returned list is identical for any ``workers`` value.

    Args:
        fn: Chunk worker taking (chunk size, generator)
        total: Total number of trials
        rng: Parent generator
        chunk: Trials per chunk
        workers: Thread pool size; ``None`` or 1 runs inline

    Returns:
        Per-chunk results in chunk order
    """
    sizes = chunk_sizes(total, chunk)
    seeds = rng.integers(0, 2**63 - 1, size=len(sizes), dtype=np.int64)
    jobs = [(size, np.random.default_rng(int(seed))) for size, seed in zip(sizes, seeds)]

    if workers is None or workers <= 1 or len(jobs) <= 1:
        return [fn(size, chunk_rng) for size, chunk_rng in jobs]

    logger.debug("Running %d chunks on %d workers", len(jobs), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))
