"""
Seed derivation for independent, order-insensitive trial streams.

Every trial of a sweep owns a 64-bit seed obtained by folding the master seed
and the trial coordinates through the splitmix64 finaliser, so trial k of
grid point j always draws the same graph no matter how trials are scheduled.
"""
import numpy as np

MASK_64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(value: int) -> int:
    z = (value + GOLDEN_GAMMA) & MASK_64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK_64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK_64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, *indices: int) -> int:
    state = splitmix64(master_seed & MASK_64)
    for index in indices:
        state = splitmix64(state ^ (index & MASK_64))
    return state


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)
