"""
Permutations of tensor factors (the symmetric group acting on factor positions).

Convention: a permutation is stored 0-based as its images, ``image[k] = sigma(k)``.
``sigma.compose(tau)`` is the map k -> sigma(tau(k)).
"""
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations as _iter_permutations
from typing import Dict, List, Sequence, Tuple

from sympy.combinatorics import Permutation as _SympyPermutation

from app.core.exceptions import InputValidationError


@dataclass(frozen=True)
class FactorPermutation:
    """Bijection of {0..n-1} acting on factor positions."""

    image: Tuple[int, ...]

    def __post_init__(self):
        if sorted(self.image) != list(range(len(self.image))):
            raise InputValidationError(f"not a permutation: {self.image}")

    @classmethod
    def identity(cls, n: int) -> "FactorPermutation":
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, n: int, cycles: Sequence[Sequence[int]]) -> "FactorPermutation":
        image = list(range(n))
        for cycle in cycles:
            for pos, k in enumerate(cycle):
                image[k] = cycle[(pos + 1) % len(cycle)]
        return cls(tuple(image))

    @property
    def n(self) -> int:
        return len(self.image)

    def __call__(self, k: int) -> int:
        return self.image[k]

    def compose(self, other: "FactorPermutation") -> "FactorPermutation":
        if other.n != self.n:
            raise InputValidationError("composition of permutations of different sizes")
        return FactorPermutation(tuple(self.image[other.image[k]] for k in range(self.n)))

    def inverse(self) -> "FactorPermutation":
        inv = [0] * self.n
        for k, v in enumerate(self.image):
            inv[v] = k
        return FactorPermutation(tuple(inv))

    @property
    def sign(self) -> int:
        return _sign(self.image)

    def cycles(self) -> List[Tuple[int, ...]]:
        """All cycles including fixed points, each starting at its smallest element."""
        return [tuple(c) for c in _cycles(self.image)]

    def cycle_type(self) -> Tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def permute_sequence(self, items: Sequence) -> tuple:
        """Move the item at position k to position sigma(k)."""
        out = [None] * self.n
        for k, item in enumerate(items):
            out[self.image[k]] = item
        return tuple(out)


@lru_cache(maxsize=None)
def _sign(image: Tuple[int, ...]) -> int:
    return -1 if _SympyPermutation(list(image)).is_odd else 1


@lru_cache(maxsize=None)
def _cycles(image: Tuple[int, ...]) -> Tuple[Tuple[int, ...], ...]:
    return tuple(tuple(c) for c in _SympyPermutation(list(image)).full_cyclic_form)


@lru_cache(maxsize=None)
def all_permutations(n: int) -> Tuple[FactorPermutation, ...]:
    """All n! permutations in lexicographic order of their images."""
    return tuple(FactorPermutation(p) for p in _iter_permutations(range(n)))


@dataclass(frozen=True)
class ConjugacyClass:
    """A conjugacy class of the symmetric group, keyed by cycle type."""

    cycle_type: Tuple[int, ...]
    representative: FactorPermutation
    size: int

    @property
    def sign(self) -> int:
        return self.representative.sign


@lru_cache(maxsize=None)
def conjugacy_classes(n: int) -> Tuple[ConjugacyClass, ...]:
    """Classes ordered by cycle type (descending lexicographic)."""
    groups: Dict[Tuple[int, ...], List[FactorPermutation]] = {}
    for perm in all_permutations(n):
        groups.setdefault(perm.cycle_type(), []).append(perm)
    return tuple(
        ConjugacyClass(cycle_type=ct, representative=members[0], size=len(members))
        for ct, members in sorted(groups.items(), reverse=True)
    )
