"""
Sparse homogeneous polynomials in the coordinates x_I, I ∈ {0,1}^n.

A monomial is the sorted tuple of the flat indices of its variables (with
repetition), so x_00000^2 x_11111 at n=5 is (0, 0, 31).
"""
import logging
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

import numpy as np

from app.core.exceptions import InputValidationError
from app.core.permutations import FactorPermutation
from app.core.rationals import reduce_mod
from app.core.tensor import DenseTensor, bits_to_index, bits_to_key, index_to_bits, key_to_bits

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]


def monomial_from_keys(keys: Iterable[str]) -> Monomial:
    return tuple(sorted(bits_to_index(key_to_bits(k)) for k in keys))


def monomial_key(mono: Monomial, n: int) -> str:
    return ".".join(bits_to_key(index_to_bits(i, n)) for i in mono)


@lru_cache(maxsize=None)
def _index_permutation(image: Tuple[int, ...]) -> Tuple[int, ...]:
    """Flat index of I∘sigma for every I, where (I∘sigma)_j = I_sigma(j)."""
    n = len(image)
    table = []
    for index in range(1 << n):
        bits = index_to_bits(index, n)
        table.append(bits_to_index([bits[image[j]] for j in range(n)]))
    return tuple(table)


class SparsePolynomial:
    """Homogeneous polynomial with integer coefficients; zero coefficients are never stored."""

    __slots__ = ("n", "degree", "terms")

    def __init__(self, n: int, degree: int, terms: Mapping[Monomial, int] = None):
        self.n = n
        self.degree = degree
        clean: Dict[Monomial, int] = {}
        for mono, coeff in (terms or {}).items():
            mono = tuple(sorted(mono))
            if len(mono) != degree:
                raise InputValidationError(f"monomial {mono} is not of degree {degree}")
            if any(not 0 <= i < (1 << n) for i in mono):
                raise InputValidationError(f"monomial {mono} uses a variable outside x_I, I in {{0,1}}^{n}")
            clean[mono] = clean.get(mono, 0) + coeff
        self.terms = {m: c for m, c in clean.items() if c}

    @classmethod
    def from_monomial(cls, n: int, mono: Monomial, coeff: int = 1) -> "SparsePolynomial":
        return cls(n, len(mono), {mono: coeff})

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        return (isinstance(other, SparsePolynomial) and self.n == other.n
                and self.degree == other.degree and self.terms == other.terms)

    def __repr__(self) -> str:
        return f"SparsePolynomial(n={self.n}, degree={self.degree}, monomials={len(self.terms)})"

    def _check(self, other: "SparsePolynomial"):
        if (other.n, other.degree) != (self.n, self.degree):
            raise InputValidationError("polynomials of different shape or degree")

    def __add__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return SparsePolynomial(self.n, self.degree, out)

    def __neg__(self) -> "SparsePolynomial":
        return self.scaled(-1)

    def __sub__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        return self + (-other)

    def scaled(self, factor: Union[int, Fraction]) -> "SparsePolynomial":
        out = {}
        for m, c in self.terms.items():
            value = Fraction(c) * factor
            if value.denominator != 1:
                raise InputValidationError("scaling would leave integer coefficients")
            out[m] = int(value)
        return SparsePolynomial(self.n, self.degree, out)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, mono: Monomial) -> int:
        return self.terms.get(tuple(sorted(mono)), 0)

    def permuted(self, sigma: FactorPermutation) -> "SparsePolynomial":
        """The polynomial A -> f(apply_perm(A, sigma)): each x_I becomes x_{I∘sigma}."""
        if sigma.n != self.n:
            raise InputValidationError(f"permutation acts on {sigma.n} factors, polynomial on {self.n}")
        table = _index_permutation(sigma.image)
        return SparsePolynomial(self.n, self.degree, _collect(
            (tuple(table[i] for i in m), c) for m, c in self.terms.items()
        ))

    def _shift(self, factor: int, from_bit: int) -> "SparsePolynomial":
        mask = 1 << (self.n - 1 - factor)
        out: Dict[Monomial, int] = {}
        for mono, coeff in self.terms.items():
            counts: Dict[int, int] = {}
            for i in mono:
                counts[i] = counts.get(i, 0) + 1
            for i, mult in counts.items():
                if bool(i & mask) != bool(from_bit):
                    continue
                target = i ^ mask
                replaced = list(mono)
                replaced.remove(i)
                replaced.append(target)
                key = tuple(sorted(replaced))
                out[key] = out.get(key, 0) + coeff * mult
        return SparsePolynomial(self.n, self.degree, out)

    def raising(self, factor: int) -> "SparsePolynomial":
        """sum over I with I_factor = 1 of x_{I, bit cleared} d/dx_I."""
        return self._shift(factor, from_bit=1)

    def lowering(self, factor: int) -> "SparsePolynomial":
        """sum over I with I_factor = 0 of x_{I, bit set} d/dx_I."""
        return self._shift(factor, from_bit=0)

    def weight(self, mono: Monomial) -> Tuple[int, ...]:
        """Torus weight: sum of (2 I_k - 1) over the variables of the monomial, per factor k."""
        return tuple(
            sum(2 * ((i >> (self.n - 1 - k)) & 1) - 1 for i in mono) for k in range(self.n)
        )

    def is_weight_zero(self) -> bool:
        return all(not any(self.weight(m)) for m in self.terms)

    def evaluate(self, A: DenseTensor, modulus: Optional[int] = None) -> Union[Fraction, int]:
        if A.n != self.n:
            raise InputValidationError(f"polynomial in {self.n}-factor coordinates, tensor has {A.n} factors")
        if not self.terms:
            return 0 if modulus else Fraction(0)
        flat = (A.residue_array(modulus) if modulus else A.array).reshape(-1)
        monos = np.array(list(self.terms.keys()), dtype=np.int64).reshape(len(self.terms), self.degree)
        coeffs = np.empty(len(self.terms), dtype=object)
        coeffs[:] = [reduce_mod(c, modulus) if modulus else c for c in self.terms.values()]
        values = flat[monos]
        prods = coeffs
        for j in range(self.degree):
            prods = prods * values[:, j]
            if modulus:
                prods = prods % modulus
        total = prods.sum()
        return int(total) % modulus if modulus else Fraction(total)

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "terms": {monomial_key(m, self.n): c for m, c in sorted(self.terms.items())},
        }

    @classmethod
    def from_dict(cls, data: Mapping, n: int = 5) -> "SparsePolynomial":
        try:
            degree = int(data["degree"])
            raw_terms = data["terms"]
        except (KeyError, TypeError, ValueError) as e:
            raise InputValidationError(f"malformed polynomial document: {e}")
        terms = {monomial_from_keys(key.split(".")): int(c) for key, c in raw_terms.items()}
        return cls(n, degree, terms)


def _collect(pairs) -> Dict[Monomial, int]:
    out: Dict[Monomial, int] = {}
    for mono, coeff in pairs:
        key = tuple(sorted(mono))
        out[key] = out.get(key, 0) + coeff
    return out
