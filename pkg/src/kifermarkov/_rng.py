"""Seeded, splittable random streams.

Every replica gets its own Philox (counter-based) generator spawned from a
single ``SeedSequence``, so results depend only on ``(seed, replica index)``
and never on scheduling.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np

RNG_ALGORITHM = "numpy Philox4x64 via SeedSequence.spawn"


def as_seed_sequence(seed):
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, np.random.Generator):
        return np.random.SeedSequence(int(seed.integers(2**63)))
    return np.random.SeedSequence(seed)


def spawn_generators(seed, n):
    """``n`` independent generators derived from ``seed``."""
    children = as_seed_sequence(seed).spawn(n)
    return [np.random.Generator(np.random.Philox(c)) for c in children]


def generator(seed):
    return np.random.Generator(np.random.Philox(as_seed_sequence(seed)))


def map_replicas(func, generators, threads=1):
    """Apply ``func(index, rng)`` to every replica, preserving order."""
    if threads <= 1 or len(generators) <= 1:
        return [func(i, g) for i, g in enumerate(generators)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(func, i, g) for i, g in enumerate(generators)]
        return [f.result() for f in futures]
