"""Deterministic stratified sweeps over directions with a parallel reduction.

Direction i of n is omega_i = lo + (hi - lo) * (i + U_i) / n. The jitters U
of chunk c come from Philox(key=seed) advanced by c jumps, so every chunk
is reproducible on its own. Workers return integer survival counts per
grid point and the counts are added up in chunk order, which makes the
result independent of how many workers ran.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

CHUNK = 1 << 16
DEFAULT_SEED = 20240601


def parse_grid(spec: str) -> np.ndarray:
    """``min:max:count[:log]`` -> ascending lambda grid."""
    parts = spec.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "log"):
        raise ValueError(f"grid spec must be min:max:count[:log], got {spec!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValueError(f"grid spec must be min:max:count[:log], got {spec!r}") from None
    if count < 2 or not 0.0 < lo < hi or not math.isfinite(hi):
        raise ValueError(f"grid needs 0 < min < max and count >= 2, got {spec!r}")
    if len(parts) == 4:
        return np.geomspace(lo, hi, count)
    return np.linspace(lo, hi, count)


def default_workers() -> int:
    return max(1, os.cpu_count() or 1)


@dataclass(frozen=True)
class StratifiedSampler:
    n: int
    seed: int = DEFAULT_SEED
    lo: float = 0.0
    hi: float = 2.0 * math.pi
    chunk: int = CHUNK

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least one sample, got {self.n}")
        if not self.hi > self.lo:
            raise ValueError("empty angle range")

    @property
    def n_chunks(self) -> int:
        return -(-self.n // self.chunk)

    def directions(self, c: int) -> np.ndarray:
        start = c * self.chunk
        stop = min(start + self.chunk, self.n)
        rng = np.random.Generator(np.random.Philox(key=self.seed).jumped(c))
        u = rng.random(stop - start)
        idx = np.arange(start, stop, dtype=np.float64)
        return self.lo + (self.hi - self.lo) * (idx + u) / self.n

    def all_directions(self) -> np.ndarray:
        return np.concatenate([self.directions(c) for c in range(self.n_chunks)])


def survival_counts(values: np.ndarray, lambdas: np.ndarray) -> np.ndarray:
    """#{v > lam} per grid point; NaN and +inf count as exceeding every lambda."""
    v = np.where(np.isnan(values), np.inf, values)
    v = np.sort(v)
    return len(v) - np.searchsorted(v, lambdas, side="right")


def run(sampler: StratifiedSampler, kernel: Callable[[np.ndarray], np.ndarray],
        lambdas, workers: int = 1) -> np.ndarray:
    """Integer survival counts of kernel(directions) over all chunks."""
    lambdas = np.asarray(lambdas, dtype=float)
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")

    def one(c):
        return survival_counts(kernel(sampler.directions(c)), lambdas)

    if workers == 1:
        parts = [one(c) for c in range(sampler.n_chunks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, range(sampler.n_chunks)))
    total = np.zeros(len(lambdas), dtype=np.int64)
    for p in parts:
        total += p
    return total
