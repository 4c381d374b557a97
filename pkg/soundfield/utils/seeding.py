import numpy as np

from ..exceptions import ConfigurationError

MAX_SEED = 2 ** 64 - 1


def validate_seed(seed):
    try:
        seed = int(seed)
    except (TypeError, ValueError):
        raise ConfigurationError(f"Seed must be an integer, got {seed!r}") from None
    if not 0 <= seed <= MAX_SEED:
        raise ConfigurationError(f"Seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def item_rng(seed, index, stream=0):
    """Random stream for batch item `index`, independent of worker count and order.

    `stream` separates unrelated consumers (scene sampling vs. pair drawing) that share
    one user-facing seed.
    """
    sequence = np.random.SeedSequence(validate_seed(seed), spawn_key=(int(stream), int(index)))
    return np.random.default_rng(sequence)
