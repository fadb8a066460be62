"""
Counter-based random streams.

Every draw comes from a Philox generator keyed by (seed, channel, block),
where a block is a fixed run of BLOCK_SIZE consecutive paths. Output depends
only on the path index, never on how blocks are spread across workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List

import numpy as np

BLOCK_SIZE = 4096

CHANNEL_BROWNIAN = 0
CHANNEL_JUMPS = 1
CHANNEL_KULIK = 2
CHANNEL_PROBES = 3


def stream(seed: int, channel: int, block: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(channel), int(block)))
    return np.random.Generator(np.random.Philox(ss))


def _blocks(n_paths: int) -> List[range]:
    return [range(b, min(b + BLOCK_SIZE, n_paths)) for b in range(0, n_paths, BLOCK_SIZE)]


def _by_block(n_paths: int, draw: Callable[[int, int], np.ndarray], workers: int) -> np.ndarray:
    blocks = _blocks(n_paths)
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ib: draw(ib[0], len(ib[1])), enumerate(blocks)))
    else:
        parts = [draw(i, len(r)) for i, r in enumerate(blocks)]
    return np.concatenate(parts, axis=0)


def brownian_increments(seed: int, n_paths: int, steps: int, dim: int, dt: float,
                        workers: int = 1) -> np.ndarray:
    """N(0, dt) increments, shape [paths, steps, dim]."""
    scale = np.sqrt(dt)

    def draw(block: int, size: int) -> np.ndarray:
        return scale * stream(seed, CHANNEL_BROWNIAN, block).standard_normal((size, steps, dim))

    return _by_block(n_paths, draw, workers)


def jump_counts(seed: int, n_paths: int, steps: int, rates: np.ndarray, dt: float,
                workers: int = 1) -> np.ndarray:
    """Independent Poisson(w_a dt) counts per atom, shape [paths, steps, atoms]."""
    lam = np.asarray(rates, dtype=float) * dt
    if lam.size == 0:
        return np.zeros((n_paths, steps, 0), dtype=np.int64)

    def draw(block: int, size: int) -> np.ndarray:
        return stream(seed, CHANNEL_JUMPS, block).poisson(lam, size=(size, steps, lam.size))

    return _by_block(n_paths, draw, workers).astype(np.int64)
