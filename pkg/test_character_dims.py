#!/usr/bin/env python3
"""Test invariant dimensions from the twisted Weyl character formula."""
from fractions import Fraction

import pytest

from app.core.characters import (
    character_table,
    conjugacy_classes,
    dim_U,
    dim_U_sgn,
    dim_U_sym,
    dimension_for,
    twisted_trace,
)
from app.core.equation_search import action_trace_on_basis, build_basis
from app.core.exceptions import InputValidationError
from app.core.laurent import LaurentPolynomial, MonomialMatrix, integer_partitions
from app.core.permutations import FactorPermutation
from app.core.seeds import derive_rng
from app.core.tensor import sample_generic

# d: (dim U_d, sym part, sgn part)
KNOWN_DIMENSIONS = {
    2: (0, 0, 0),
    4: (5, 1, 0),
    6: (1, 0, 1),
    8: (36, 4, 0),
    10: (15, 0, 2),
    12: (228, 12, 2),
    14: (231, 2, 9),
    16: (1313, 39, 10),
}


def test_character_table_matches_known_dimensions():
    rows = character_table(16)
    assert [row.d for row in rows] == sorted(KNOWN_DIMENSIONS)
    for row in rows:
        assert (row.U, row.sym, row.sgn) == KNOWN_DIMENSIONS[row.d]


@pytest.mark.parametrize("d", [4, 6, 10])
def test_dimension_helpers_agree(d):
    U, sym, sgn = KNOWN_DIMENSIONS[d]
    assert dim_U(d) == dimension_for(d, "full") == U
    assert dim_U_sym(d) == dimension_for(d, "sym") == sym
    assert dim_U_sgn(d) == dimension_for(d, "sgn") == sgn


def test_small_tables():
    assert [r.to_dict() for r in character_table(2)] == [{"d": 2, "U": 0, "sym": 0, "sgn": 0}]
    odd = character_table(3)
    assert [r.d for r in odd] == [1, 2, 3]
    assert all(r.U == 0 for r in odd)


def test_character_table_bounds():
    with pytest.raises(InputValidationError):
        character_table(33)
    with pytest.raises(InputValidationError):
        character_table(0)
    with pytest.raises(InputValidationError):
        dimension_for(4, "alternating")


def test_odd_degrees_have_no_invariants():
    for d in (1, 3, 5, 7):
        assert dim_U(d) == 0


def test_centralizer_orders_sum_to_one():
    parts = integer_partitions(5)
    assert len(parts) == 7
    assert sum(Fraction(1, lam.centralizer_order) for lam in parts) == 1


def test_conjugacy_classes_partition_the_group():
    classes = conjugacy_classes()
    assert sorted(c.size for c in classes) == [1, 10, 15, 20, 20, 24, 30]
    assert sum(c.size for c in classes) == 120


def test_identity_trace_is_full_dimension():
    identity = FactorPermutation.identity(5)
    for d in (4, 8, 12):
        assert twisted_trace(identity, d) == KNOWN_DIMENSIONS[d][0]


def test_trace_is_a_class_function():
    a = FactorPermutation.from_cycles(5, [(0, 1, 2)])
    b = FactorPermutation.from_cycles(5, [(2, 4, 3)])
    assert twisted_trace(a, 8) == twisted_trace(b, 8)


def test_trace_rejects_wrong_factor_count():
    with pytest.raises(InputValidationError):
        twisted_trace(FactorPermutation.identity(4), 4)
    with pytest.raises(InputValidationError):
        twisted_trace(FactorPermutation.identity(5), -2)


def test_laurent_arithmetic():
    t = LaurentPolynomial.variable(0, 1)
    inv = LaurentPolynomial.variable(0, 1, -1)
    square = (t + inv) ** 2
    assert square.constant_term() == 2
    assert square.coefficient((2,)) == 1
    assert square.coefficient((-2,)) == 1
    assert (t - t).is_zero()


def test_cycle_block_trace_of_identity_factor():
    # a fixed factor has torus character t + t^-1
    block = MonomialMatrix.for_cycle(1)
    assert block.size == 2
    assert block.trace().coefficient((1,)) == 1
    assert block.trace().coefficient((-1,)) == 1


def test_degree4_traces_match_evaluated_basis_action():
    rng = derive_rng(40, "trace-oracle")
    basis, _ = build_basis(4, "full", rng)
    assert len(basis) == 5
    points = [sample_generic(5, 10, rng) for _ in range(8)]
    for cls in conjugacy_classes():
        assert action_trace_on_basis(basis, cls.representative, points) == twisted_trace(cls.representative, 4)
