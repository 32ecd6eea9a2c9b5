"""
Dimensions of the SL_2^×5-invariants U_d in Sym^d(V), V = (k^2)^{⊗5}, and of
their trivial and sign isotypic parts under the factor permutations.

tr(sigma | U_d) is the Weyl constant term over one torus variable per cycle of
sigma of  prod_c (1 - t_c^2) * sum_{lambda ⊢ d} z_lambda^-1 prod_j tr(M^lambda_j),
where M is the monomial operator of (torus element, sigma). M splits into one
block per cycle, so each partition term is a product of univariate constant terms.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Tuple

from app.core.config import settings
from app.core.exceptions import InputValidationError
from app.core.laurent import LaurentPolynomial, MonomialMatrix, integer_partitions
from app.core.permutations import ConjugacyClass, FactorPermutation, conjugacy_classes as _classes

logger = logging.getLogger(__name__)

FACTORS = 5


@lru_cache(maxsize=None)
def _block(length: int) -> MonomialMatrix:
    return MonomialMatrix.for_cycle(length)


@lru_cache(maxsize=None)
def _block_trace(length: int, k: int) -> LaurentPolynomial:
    return _block(length).trace_power(k)


def _weyl_constant_term(poly: LaurentPolynomial) -> int:
    """CT[(1 - t^2) * poly] for a univariate Laurent polynomial."""
    return poly.coefficient((0,)) - poly.coefficient((-2,))


@lru_cache(maxsize=None)
def _cycle_factor(length: int, parts: Tuple[int, ...]) -> int:
    poly = LaurentPolynomial.constant(1, 1)
    for k in parts:
        poly = poly * _block_trace(length, k)
    return _weyl_constant_term(poly)


@lru_cache(maxsize=None)
def _twisted_trace_by_type(cycle_type: Tuple[int, ...], d: int) -> int:
    if d == 0:
        return 1
    total = Fraction(0)
    for lam in integer_partitions(d):
        term = 1
        for length in cycle_type:
            term *= _cycle_factor(length, lam.parts)
            if term == 0:
                break
        if term:
            total += Fraction(term, lam.centralizer_order)
    if total.denominator != 1:
        raise ArithmeticError(f"non-integral twisted trace {total} for cycle type {cycle_type}, d={d}")
    return int(total)


def twisted_trace(sigma: FactorPermutation, d: int) -> int:
    """
    Trace of the factor permutation sigma on U_d.

    Args:
        sigma: Permutation of the five factors
        d: Degree (odd degrees give 0)

    Returns:
        Exact integer trace (a virtual character value, possibly negative)
    """
    if d < 0:
        raise InputValidationError(f"degree must be nonnegative, got {d}")
    if sigma.n != FACTORS:
        raise InputValidationError(f"expected a permutation of {FACTORS} factors, got {sigma.n}")
    return _twisted_trace_by_type(sigma.cycle_type(), d)


def dim_U(d: int) -> int:
    """dim (Sym^d V)^{SL_2^×5}."""
    return twisted_trace(FactorPermutation.identity(FACTORS), d)


def conjugacy_classes() -> Tuple[ConjugacyClass, ...]:
    """The seven classes of permutations of the five factors."""
    return _classes(FACTORS)


def _isotypic_dimension(d: int, signed: bool) -> int:
    total = 0
    order = 0
    for cls in conjugacy_classes():
        weight = cls.sign if signed else 1
        total += weight * cls.size * twisted_trace(cls.representative, d)
        order += cls.size
    if total % order:
        raise ArithmeticError(f"class sum {total} not divisible by {order} at d={d}")
    return total // order


def dim_U_sym(d: int) -> int:
    """Dimension of the permutation-invariant part of U_d."""
    return _isotypic_dimension(d, signed=False)


def dim_U_sgn(d: int) -> int:
    """Dimension of the sign-isotypic (skew-invariant) part of U_d."""
    return _isotypic_dimension(d, signed=True)


def dimension_for(d: int, symmetry: str) -> int:
    if symmetry == "full":
        return dim_U(d)
    if symmetry == "sym":
        return dim_U_sym(d)
    if symmetry == "sgn":
        return dim_U_sgn(d)
    raise InputValidationError(f"unknown symmetry {symmetry!r}, expected full, sym or sgn")


@dataclass(frozen=True)
class CharacterRow:
    d: int
    U: int
    sym: int
    sgn: int

    def to_dict(self) -> dict:
        return {"d": self.d, "U": self.U, "sym": self.sym, "sgn": self.sgn}


def character_table(max_degree: int) -> List[CharacterRow]:
    """
    Rows (d, dim U_d, dim U_d^sym, dim U_d^sgn) for d = 2, 4, ..., max_degree.

    Odd degrees are listed too when ``max_degree`` itself is odd.
    """
    if not 1 <= max_degree <= settings.MAX_DIMS_DEGREE:
        raise InputValidationError(f"max degree must lie in [1, {settings.MAX_DIMS_DEGREE}], got {max_degree}")
    step = 1 if max_degree % 2 else 2
    rows = []
    for d in range(step, max_degree + 1, step):
        row = CharacterRow(d=d, U=dim_U(d), sym=dim_U_sym(d), sgn=dim_U_sgn(d))
        logger.debug(f"[Characters] d={d}: U={row.U} sym={row.sym} sgn={row.sgn}")
        rows.append(row)
    return rows
