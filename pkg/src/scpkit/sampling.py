"""Without-replacement index sampling and the default subset-size schedule."""
from __future__ import annotations

import math

import numpy as np

from .errors import InvalidArgumentError
from .types import SubsetSample


def default_n_schedule(N: int) -> int:
    """Subset size min(N, ceil(10*sqrt(N)))."""
    if N < 1:
        raise InvalidArgumentError("N must be >= 1")
    return min(N, math.ceil(10.0 * math.sqrt(N)))


def log_n_schedule(N: int) -> int:
    """Aggressive alternative, min(N, ceil(10*log N)), for sweep experiments."""
    if N < 1:
        raise InvalidArgumentError("N must be >= 1")
    return min(N, max(1, math.ceil(10.0 * math.log(max(N, 2)))))


def derive_iteration_seed(master_seed: int, iteration: int) -> int:
    """Stable per-iteration child seed; SeedSequence hashing is version-pinned."""
    ss = np.random.SeedSequence((int(master_seed), int(iteration)))
    return int(ss.generate_state(1, np.uint64)[0])


def sample_without_replacement(N: int, n: int, seed: int, iteration: int = 0) -> SubsetSample:
    """Uniform n-subset of [0, N), sorted ascending, deterministic per seed."""
    if n < 1 or n > N:
        raise InvalidArgumentError(f"need 1 <= n <= N, got n={n}, N={N}")
    if n == N:
        idx = np.arange(N, dtype=np.int64)
    else:
        rng = np.random.default_rng(seed)
        idx = np.sort(rng.choice(N, size=n, replace=False)).astype(np.int64)
    return SubsetSample(indices=idx, n=n, N=N, seed=seed, iteration=iteration)


def full_sample(N: int, iteration: int = 0) -> SubsetSample:
    return SubsetSample(indices=np.arange(N, dtype=np.int64), n=N, N=N, seed=0, iteration=iteration)
