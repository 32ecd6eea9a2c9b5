"""
Invariant specifications: formal linear combinations of tableau quintuples,
optionally summed over all factor permutations (plain or sign-weighted).
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, partial
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import orjson
import xxhash

from app.core.contraction import OrientedColumns, contract_array
from app.core.exceptions import InputValidationError
from app.core.parallel import parallel_map
from app.core.permutations import FactorPermutation, all_permutations
from app.core.rationals import Scalar, format_rational, parse_rational, reduce_mod
from app.core.tableaux import TableauQuintuple
from app.core.tensor import DenseTensor, permute_array

logger = logging.getLogger(__name__)

SYMMETRIZATIONS = ("none", "sum", "signed")
Term = Tuple[Fraction, TableauQuintuple]


@dataclass(frozen=True)
class InvariantSpec:
    terms: Tuple[Term, ...]
    symmetrization: str = "none"

    def __post_init__(self):
        terms = tuple((Fraction(c), q) for c, q in self.terms)
        if not terms:
            raise InputValidationError("an invariant needs at least one term")
        if len({q.m for _, q in terms}) != 1 or len({q.n for _, q in terms}) != 1:
            raise InputValidationError("all quintuples of an invariant must share m and the factor count")
        if self.symmetrization not in SYMMETRIZATIONS:
            raise InputValidationError(
                f"symmetrization must be one of {SYMMETRIZATIONS}, got {self.symmetrization!r}"
            )
        object.__setattr__(self, "terms", terms)

    @classmethod
    def single(cls, quintuple: TableauQuintuple, symmetrization: str = "none", coeff: Scalar = 1) -> "InvariantSpec":
        return cls(((Fraction(coeff), quintuple),), symmetrization)

    @property
    def degree(self) -> int:
        return self.terms[0][1].degree

    @property
    def n(self) -> int:
        return self.terms[0][1].n

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "symmetrization": self.symmetrization,
            "terms": [
                {"coeff": format_rational(c), "quintuple": {"m": q.m, "tableaux": q.to_rows()}}
                for c, q in self.terms
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "InvariantSpec":
        """Inverse of ``to_dict``; non-canonical tableaux fold their sign into the coefficient."""
        try:
            terms = []
            for term in data["terms"]:
                quintuple, sign = TableauQuintuple.from_rows(term["quintuple"]["tableaux"])
                terms.append((sign * parse_rational(term["coeff"]), quintuple))
            spec = cls(tuple(terms), data.get("symmetrization", "none"))
        except (KeyError, TypeError) as e:
            raise InputValidationError(f"malformed invariant document: {e}")
        if "degree" in data and int(data["degree"]) != spec.degree:
            raise InputValidationError(f"declared degree {data['degree']} does not match quintuples of degree {spec.degree}")
        return spec

    @cached_property
    def identifier(self) -> str:
        """xxh64 of the canonical JSON form."""
        return xxhash.xxh64(orjson.dumps(self.to_dict(), option=orjson.OPT_SORT_KEYS)).hexdigest()


def linear_combination(specs: Sequence[InvariantSpec], coeffs: Sequence[Scalar]) -> InvariantSpec:
    """sum_k coeffs[k] * specs[k] as one spec; all specs must share their symmetrization."""
    if len(specs) != len(coeffs):
        raise InputValidationError("one coefficient per invariant required")
    if len({s.symmetrization for s in specs}) > 1:
        raise InputValidationError("cannot combine invariants with different symmetrizations")
    merged = {}
    order: List[TableauQuintuple] = []
    for spec, c in zip(specs, coeffs):
        for coeff, q in spec.terms:
            if q not in merged:
                merged[q] = Fraction(0)
                order.append(q)
            merged[q] += Fraction(c) * coeff
    terms = tuple((merged[q], q) for q in order if merged[q] != 0)
    if not terms:
        raise InputValidationError("linear combination is formally zero")
    return InvariantSpec(terms, specs[0].symmetrization)


def _terms_value(columns: Sequence[OrientedColumns], coeffs: Sequence, modulus: Optional[int],
                 strategy: str, array: np.ndarray):
    total = 0
    for cols, c in zip(columns, coeffs):
        value = contract_array(cols, array, modulus, strategy)
        total = total + c * value
        if modulus:
            total %= modulus
    return total


def symmetrization_weights(spec: InvariantSpec) -> List[Tuple[FactorPermutation, int]]:
    n = spec.n
    if spec.symmetrization == "none":
        return [(FactorPermutation.identity(n), 1)]
    signed = spec.symmetrization == "signed"
    return [(sigma, sigma.sign if signed else 1) for sigma in all_permutations(n)]


def evaluate_invariant(F: InvariantSpec, A: DenseTensor, modulus: Optional[int] = None,
                       strategy: str = "auto", threads: Optional[int] = None) -> Union[Fraction, int]:
    """
    Value of F at A.

    Symmetrized specs use (sigma·Q)(A) = Q(sigma^-1·A), so a full sum costs one base
    evaluation per permutation; results are reduced in permutation order.

    Args:
        F: Invariant
        A: Tensor with F.n factors (integer entries when ``modulus`` is set)
        modulus: Prime for modular evaluation
        strategy: Contraction strategy, see ``contraction.resolve_strategy``
        threads: Worker count for the per-permutation evaluations

    Returns:
        Fraction, or a residue in [0, modulus)
    """
    if F.n != A.n:
        raise InputValidationError(f"invariant on {F.n} factors, tensor has {A.n}")
    array = A.residue_array(modulus) if modulus else A.array
    coeffs = [reduce_mod(c, modulus) if modulus else c for c, _ in F.terms]
    columns = [q.columns for _, q in F.terms]
    weighted = symmetrization_weights(F)
    arrays = [permute_array(array, sigma.inverse()) for sigma, _ in weighted]
    values = parallel_map(partial(_terms_value, columns, coeffs, modulus, strategy), arrays, threads)
    total = 0
    for (_, weight), value in zip(weighted, values):
        total = total + weight * value
        if modulus:
            total %= modulus
    return int(total) % modulus if modulus else Fraction(total)
