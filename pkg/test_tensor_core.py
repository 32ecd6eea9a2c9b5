#!/usr/bin/env python3
"""Test exact tensors, permutations, sampling and flattenings."""
from fractions import Fraction

import numpy as np
import pytest

from app.core.exceptions import InputValidationError
from app.core.permutations import FactorPermutation, all_permutations, conjugacy_classes
from app.core.rationals import parse_rational, rational_reconstruction, reduce_mod
from app.core.seeds import derive_rng, random_prime, random_primes
from app.core.tensor import (
    DenseTensor,
    Sl2Tuple,
    _rank1_array,
    apply_group,
    apply_perm,
    bipartitions,
    bits_to_index,
    flatten,
    flattening_ranks,
    index_to_bits,
    random_sl2_tuple,
    sample_generic,
    sample_rank1,
    sample_secant,
    scale,
)


# --- indices and rationals ------------------------------------------------------

def test_factor_zero_is_most_significant_bit():
    assert bits_to_index((1, 0, 0, 0, 0)) == 16
    assert index_to_bits(1, 5) == (0, 0, 0, 0, 1)
    assert index_to_bits(bits_to_index((0, 1, 1, 0, 1)), 5) == (0, 1, 1, 0, 1)


def test_parse_rational_reduces_and_rejects_garbage():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert parse_rational("-7") == Fraction(-7)
    assert parse_rational(4) == Fraction(4)
    for bad in ("1/0", "abc", "1.5", True):
        with pytest.raises(InputValidationError):
            parse_rational(bad)


def test_rational_reconstruction_recovers_small_fractions():
    p = 2**31 - 1
    for value in (Fraction(-3, 7), Fraction(5), Fraction(0), Fraction(12, 35)):
        assert rational_reconstruction(reduce_mod(value, p), p) == value


# --- tensors -----------------------------------------------------------------

def test_mapping_omits_zeros_and_fills_missing_keys():
    A = DenseTensor.from_mapping(3, {"010": "3/2", "111": "-1", "000": "0"})
    assert A[(0, 1, 0)] == Fraction(3, 2)
    assert A[(1, 0, 0)] == 0
    assert A.to_mapping() == {"010": "3/2", "111": "-1"}
    assert not A.is_integral


def test_tensor_rejects_wrong_entry_count_and_bad_keys():
    with pytest.raises(InputValidationError):
        DenseTensor(2, (1, 2, 3))
    with pytest.raises(InputValidationError):
        DenseTensor.from_mapping(3, {"01": 1})
    with pytest.raises(InputValidationError):
        DenseTensor.from_mapping(2, {"02": 1})


def test_residue_array_needs_integer_entries():
    A = DenseTensor.from_mapping(2, {"01": "1/2"})
    with pytest.raises(InputValidationError):
        A.residue_array(101)


# --- permutations -------------------------------------------------------------

def test_permutation_group_structure():
    perms = all_permutations(5)
    assert len(perms) == 120
    assert sum(1 for p in perms if p.sign == 1) == 60
    swap = FactorPermutation.from_cycles(5, [(0, 1)])
    assert swap.sign == -1
    cycle = FactorPermutation.from_cycles(5, [(0, 1, 2, 3, 4)])
    assert cycle.cycle_type() == (5,)
    assert cycle.compose(cycle.inverse()) == FactorPermutation.identity(5)


def test_conjugacy_class_sizes():
    classes = conjugacy_classes(5)
    assert len(classes) == 7
    assert sorted(c.size for c in classes) == [1, 10, 15, 20, 20, 24, 30]
    assert sum(c.size for c in classes) == 120


def test_apply_perm_moves_factor_vectors():
    vectors = [(1, 2), (3, -1), (0, 5), (2, 2), (-4, 1)]
    A = DenseTensor.from_array(_rank1_array(vectors))
    sigma = FactorPermutation.from_cycles(5, [(0, 2, 3)])
    expected = DenseTensor.from_array(_rank1_array(sigma.permute_sequence(vectors)))
    assert apply_perm(A, sigma) == expected


def test_apply_perm_is_a_left_action():
    rng = derive_rng(1, "perm-action")
    perms = all_permutations(5)
    for _ in range(50):
        A = sample_generic(5, 20, rng)
        s = perms[int(rng.integers(0, 120))]
        t = perms[int(rng.integers(0, 120))]
        assert apply_perm(apply_perm(A, s), t) == apply_perm(A, t.compose(s))


# --- group action ----------------------------------------------------------------

def test_sl2_tuple_checks_determinant():
    with pytest.raises(InputValidationError):
        Sl2Tuple((((2, 0), (0, 1)),))
    assert Sl2Tuple.identity(3).n == 3


def test_group_action_composes_and_commutes_with_permutations():
    rng = derive_rng(2, "group-action")
    A = sample_generic(5, 10, rng)
    g = random_sl2_tuple(5, rng)
    h = random_sl2_tuple(5, rng)
    assert apply_group(A, Sl2Tuple.identity(5)) == A
    assert apply_group(apply_group(A, h), g) == apply_group(A, g.compose(h))
    sigma = FactorPermutation.from_cycles(5, [(1, 4), (0, 2, 3)])
    assert apply_perm(apply_group(A, g), sigma) == apply_group(apply_perm(A, sigma), g.permuted(sigma))


# --- flattenings and sampling --------------------------------------------------------

def test_bipartitions_count_each_split_once():
    # 2^(n-1) - 1 unordered splits
    assert len(bipartitions(5)) == 15
    assert len(bipartitions(4)) == 7


def test_flatten_layout_and_rank_one():
    A = sample_rank1(5, 10, derive_rng(3, "rank1"))
    M = flatten(A, [0, 2])
    assert len(M) == 4 and len(M[0]) == 8
    assert set(flattening_ranks(A).values()) == {1}


def test_flatten_rejects_trivial_subsets():
    A = sample_generic(3, 5, derive_rng(4, "flat"))
    for left in ([], [0, 1, 2], [3]):
        with pytest.raises(InputValidationError):
            flatten(A, left)


def test_secant_samples_bound_flattening_ranks():
    rng = derive_rng(5, "secant")
    A = sample_secant(2, 5, 10, rng)
    assert max(flattening_ranks(A).values()) <= 2
    B = sample_secant(5, 5, 10, rng)
    assert all(r <= 4 for r in flattening_ranks(B).values())


def test_sampling_is_reproducible_from_the_seed():
    a = sample_secant(5, 5, 10, derive_rng(9, "sample", 5))
    b = sample_secant(5, 5, 10, derive_rng(9, "sample", 5))
    c = sample_secant(5, 5, 10, derive_rng(10, "sample", 5))
    assert a == b
    assert a != c


def test_scale_multiplies_every_entry():
    A = sample_generic(3, 5, derive_rng(6, "scale"))
    assert scale(A, Fraction(1, 2)).entries == tuple(e / 2 for e in A.entries)


def test_random_primes_have_requested_size():
    rng = derive_rng(7, "primes")
    p = random_prime(rng, 60)
    assert 2**59 <= p < 2**60
    primes = random_primes(rng, 3, 31)
    assert len(set(primes)) == 3
    assert all(2**30 <= q < 2**31 for q in primes)
    with pytest.raises(ValueError):
        random_prime(rng, 70)
