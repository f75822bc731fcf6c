import numpy as np

# Counter-based generator; the name is pinned in --version and CSV headers.
PRNG_NAME = "numpy.Philox4x64-10"

_SEED_MASK = (1 << 64) - 1


def make_rng(seed):
    """Return a Philox-backed numpy Generator for a 64-bit seed."""
    return np.random.Generator(np.random.Philox(int(seed) & _SEED_MASK))


def sub_seed(seed, index, stride):
    """Derived seed for round/trial `index`: seed + stride * index (mod 2^64)."""
    return (int(seed) + int(stride) * int(index)) & _SEED_MASK
