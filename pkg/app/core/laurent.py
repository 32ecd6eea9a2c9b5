"""
Laurent polynomials with integer coefficients, integer partitions, and monomial
matrices (one Laurent monomial per row and column) used for torus characters.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial
from typing import Dict, Iterator, Mapping, Sequence, Tuple

from sympy.utilities.iterables import partitions as _sympy_partitions

from app.core.exceptions import InputValidationError
from app.core.permutations import FactorPermutation

Exponent = Tuple[int, ...]


class LaurentPolynomial:
    """Sparse map from exponent vectors to nonzero integer coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Exponent, int] = None):
        if not 0 <= nvars <= 5:
            raise InputValidationError(f"Laurent polynomials use at most 5 variables, got {nvars}")
        self.nvars = nvars
        clean: Dict[Exponent, int] = {}
        for exp, coeff in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars:
                raise InputValidationError(f"exponent {exp} does not have {nvars} entries")
            if coeff:
                clean[exp] = clean.get(exp, 0) + int(coeff)
        self.terms = {e: c for e, c in clean.items() if c}

    @classmethod
    def constant(cls, nvars: int, value: int) -> "LaurentPolynomial":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def monomial(cls, exponent: Sequence[int], coeff: int = 1) -> "LaurentPolynomial":
        return cls(len(exponent), {tuple(exponent): coeff})

    @classmethod
    def variable(cls, index: int, nvars: int, power: int = 1) -> "LaurentPolynomial":
        exp = [0] * nvars
        exp[index] = power
        return cls(nvars, {tuple(exp): 1})

    def _check(self, other: "LaurentPolynomial"):
        if other.nvars != self.nvars:
            raise InputValidationError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPolynomial(self.nvars, out)

    def __neg__(self) -> "LaurentPolynomial":
        return LaurentPolynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "LaurentPolynomial":
        if isinstance(other, int):
            return LaurentPolynomial(self.nvars, {e: c * other for e, c in self.terms.items()})
        self._check(other)
        out: Dict[Exponent, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPolynomial(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentPolynomial":
        if k < 0:
            raise InputValidationError("negative powers of Laurent polynomials are not supported")
        result = LaurentPolynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentPolynomial) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"LaurentPolynomial({self.nvars}, {dict(sorted(self.terms.items()))})"

    def coefficient(self, exponent: Sequence[int]) -> int:
        return self.terms.get(tuple(exponent), 0)

    def constant_term(self) -> int:
        return self.coefficient((0,) * self.nvars)

    def is_zero(self) -> bool:
        return not self.terms


@dataclass(frozen=True)
class IntegerPartition:
    parts: Tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts) or list(parts) != sorted(parts, reverse=True):
            raise InputValidationError(f"partition parts must be positive and weakly decreasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def multiplicities(self) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        for p in self.parts:
            counts[p] = counts.get(p, 0) + 1
        return counts

    @property
    def centralizer_order(self) -> int:
        """z_lambda = prod_k k^{m_k} m_k!, the order of the centralizer of the cycle type."""
        z = 1
        for k, mult in self.multiplicities.items():
            z *= k ** mult * factorial(mult)
        return z


@lru_cache(maxsize=None)
def integer_partitions(d: int) -> Tuple[IntegerPartition, ...]:
    """All partitions of d, largest parts first."""
    if d < 0:
        raise InputValidationError(f"cannot partition a negative integer: {d}")
    out = []
    for p in _sympy_partitions(d):
        mult = dict(p)  # sympy reuses the yielded dict
        parts = sorted((k for k, c in mult.items() for _ in range(c)), reverse=True)
        out.append(IntegerPartition(tuple(parts)))
    return tuple(sorted(out, key=lambda q: q.parts, reverse=True))


@dataclass(frozen=True)
class MonomialMatrix:
    """
    Square matrix with exactly one nonzero Laurent-monomial entry per row and column.

    Column i maps basis vector e_i to ``weights[i] * e_{perm[i]}``.
    """

    nvars: int
    perm: Tuple[int, ...]
    weights: Tuple[Exponent, ...]
    _cycles: Tuple[Tuple[int, ...], ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise InputValidationError("monomial matrix needs exactly one entry per row and column")
        if len(self.weights) != len(self.perm):
            raise InputValidationError("one weight per column required")
        seen, cycles = set(), []
        for start in range(len(self.perm)):
            if start in seen:
                continue
            cycle, i = [], start
            while i not in seen:
                seen.add(i)
                cycle.append(i)
                i = self.perm[i]
            cycles.append(tuple(cycle))
        object.__setattr__(self, "_cycles", tuple(cycles))

    @property
    def size(self) -> int:
        return len(self.perm)

    @classmethod
    def for_permutation(cls, sigma: FactorPermutation) -> "MonomialMatrix":
        """
        The operator of (torus element, sigma) on V^{⊗n}.

        One torus variable per cycle of sigma acts on the first factor of the cycle
        (e_0 -> t e_0, e_1 -> t^-1 e_1) before the factors are permuted.
        """
        n = sigma.n
        cycles = sigma.cycles()
        perm, weights = [], []
        for index in range(1 << n):
            bits = [(index >> (n - 1 - k)) & 1 for k in range(n)]
            target = [0] * n
            for k, b in enumerate(bits):
                target[sigma(k)] = b
            perm.append(sum(b << (n - 1 - k) for k, b in enumerate(target)))
            weights.append(tuple(1 - 2 * bits[c[0]] for c in cycles))
        return cls(len(cycles), tuple(perm), tuple(weights))

    @classmethod
    def for_cycle(cls, length: int) -> "MonomialMatrix":
        """One 2^length block: the cyclic factor shift k -> k+1 with the torus on factor 0."""
        shift = FactorPermutation(tuple((k + 1) % length for k in range(length)))
        return cls.for_permutation(shift)

    def compose(self, other: "MonomialMatrix") -> "MonomialMatrix":
        """self @ other."""
        if other.size != self.size or other.nvars != self.nvars:
            raise InputValidationError("monomial matrices of different shapes")
        perm, weights = [], []
        for i in range(self.size):
            j = other.perm[i]
            perm.append(self.perm[j])
            weights.append(tuple(a + b for a, b in zip(other.weights[i], self.weights[j])))
        return MonomialMatrix(self.nvars, tuple(perm), tuple(weights))

    def trace(self) -> LaurentPolynomial:
        return LaurentPolynomial(self.nvars, _accumulate(
            (self.weights[i], 1) for i in range(self.size) if self.perm[i] == i
        ))

    def trace_power(self, k: int) -> LaurentPolynomial:
        """tr(M^k) = sum over cycles C of the basis permutation with |C| dividing k of |C| * w_C^(k/|C|)."""
        if k < 1:
            raise InputValidationError(f"power must be positive, got {k}")
        contributions = []
        for cycle in self._cycles:
            size = len(cycle)
            if k % size:
                continue
            orbit_weight = [sum(self.weights[i][v] for i in cycle) for v in range(self.nvars)]
            contributions.append((tuple(w * (k // size) for w in orbit_weight), size))
        return LaurentPolynomial(self.nvars, _accumulate(contributions))


def _accumulate(pairs: Iterator[Tuple[Exponent, int]]) -> Dict[Exponent, int]:
    out: Dict[Exponent, int] = {}
    for exp, coeff in pairs:
        out[exp] = out.get(exp, 0) + coeff
    return out
