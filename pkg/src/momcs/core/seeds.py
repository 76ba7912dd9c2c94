"""
Seed handling shared by every stochastic component.

All randomness goes through `numpy.random.Generator`. Public functions accept a `SeedLike`, which is
either an integer seed, an already constructed generator (used as is) or None (fresh OS entropy).
"""
from typing import List, Optional, Union

import numpy as np

SeedLike = Optional[Union[int, np.random.Generator]]


def as_generator(seed: SeedLike) -> np.random.Generator:
    """
    Resolve a seed into a generator.
    Args:
        seed: integer seed, generator or None

    Returns:
        A numpy generator. Generators are passed through untouched.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def spawn_generators(seed: int, count: int) -> List[np.random.Generator]:
    """
    Independent generator streams for restarts or trials, derived from a single master seed.
    """
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(count)]


def derive_seed(*counters: int) -> int:
    """
    Counter-based seed derivation.
    The integer tuple (for example master_seed, scenario_id, m, algorithm_id, trial) is used as the entropy
    of a `SeedSequence`, and its first 64-bit state word is the derived seed. Any cell can therefore be
    re-run on its own.
    Args:
        *counters: non negative integers

    Returns:
        A 64-bit seed.
    """
    if any(counter < 0 for counter in counters):
        raise ValueError(f"Seed counters must be non negative, got {counters}")
    state = np.random.SeedSequence(list(counters)).generate_state(1, dtype=np.uint64)
    return int(state[0])
