"""
Seeded randomness. Every task derives its own generator from (master seed, task
labels); generators are never shared between tasks.
"""
import logging
from typing import List, Union

import numpy as np
import xxhash
from sympy import nextprime, prevprime

from app.core.config import settings

logger = logging.getLogger(__name__)

TaskLabel = Union[int, str]


def _label_word(label: TaskLabel) -> int:
    if isinstance(label, str):
        return xxhash.xxh64_intdigest(label.encode("utf-8"))
    return int(label) & 0xFFFFFFFFFFFFFFFF


def derive_rng(master_seed: int, *labels: TaskLabel) -> np.random.Generator:
    """
    Generator for one task.

    Args:
        master_seed: 64-bit run seed
        labels: task index / task name path, e.g. ``("basis", 16, 3)``

    Returns:
        Independent numpy Generator, reproducible from its arguments
    """
    entropy = [int(master_seed) & 0xFFFFFFFFFFFFFFFF] + [_label_word(label) for label in labels]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def random_prime(rng: np.random.Generator, bits: int = None) -> int:
    """
    Prime drawn from [2^(bits-1), 2^bits).

    Args:
        rng: Task generator
        bits: Bit length, defaults to settings.PRIME_BITS

    Returns:
        A prime with exactly ``bits`` bits
    """
    bits = bits or settings.PRIME_BITS
    if not 3 <= bits <= 62:
        raise ValueError(f"prime bit length must lie in [3, 62], got {bits}")
    low, high = 1 << (bits - 1), 1 << bits
    start = int(rng.integers(low, high - 1))
    p = nextprime(start)
    if p >= high:
        p = prevprime(high)
    return int(p)


def random_primes(rng: np.random.Generator, count: int, bits: int = None) -> List[int]:
    """Distinct random primes of the given bit length."""
    primes: List[int] = []
    while len(primes) < count:
        p = random_prime(rng, bits)
        if p not in primes:
            primes.append(p)
    return primes
