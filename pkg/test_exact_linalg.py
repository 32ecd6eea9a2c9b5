#!/usr/bin/env python3
"""Test exact and modular rank, kernels and solving."""
from fractions import Fraction

import numpy as np
import pytest

from app.core.exceptions import ModularRankMismatch
from app.core.linalg import (
    bareiss_rank,
    exact_rank,
    kernel_mod_p,
    left_kernel,
    left_kernel_mod_p,
    modular_ranks,
    nullspace,
    rank_mod_p,
    rref,
    solve,
)
from app.core.seeds import derive_rng, random_prime

MERSENNE_61 = 2**61 - 1


def _low_rank(rows: int, cols: int, rank: int, seed: int):
    rng = derive_rng(seed, "low-rank")
    B = rng.integers(-9, 10, size=(rows, rank)).tolist()
    C = rng.integers(-9, 10, size=(rank, cols)).tolist()
    return [[sum(B[i][k] * C[k][j] for k in range(rank)) for j in range(cols)] for i in range(rows)]


def test_bareiss_rank_small_cases():
    assert bareiss_rank([[1, 2], [2, 4]]) == 1
    assert bareiss_rank([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == 3
    assert bareiss_rank([[0, 0], [0, 0]]) == 0
    assert bareiss_rank([[0, 1, 2], [0, 2, 4], [1, 0, 0]]) == 2
    assert bareiss_rank([[Fraction(1, 2), Fraction(1, 3)], [3, 2]]) == 1


def test_modular_and_exact_rank_agree():
    M = _low_rank(6, 8, 3, seed=11)
    assert exact_rank(M) == 3
    primes = (1000003, 2**31 - 1, MERSENNE_61)
    assert set(modular_ranks(M, primes).values()) == {3}
    assert exact_rank(M, primes) == 3


def test_exact_and_60_bit_modular_rank_agree_on_random_matrices():
    rng = derive_rng(12, "rank-agreement")
    for k in range(100):
        rows, cols = (int(n) for n in rng.integers(1, 41, size=2))
        rank = int(rng.integers(0, min(rows, cols) + 1)) if k % 2 else min(rows, cols)
        M = (rng.integers(-9, 10, size=(rows, rank)) @ rng.integers(-9, 10, size=(rank, cols))).tolist()
        assert rank_mod_p(M, random_prime(rng, 60)) == exact_rank(M)


def test_exact_rank_certifies_full_rank_from_primes():
    M = [[2, 1], [1, 1]]
    assert exact_rank(M, (101, 103)) == 2


def test_exact_rank_raises_on_disagreeing_primes():
    with pytest.raises(ModularRankMismatch) as excinfo:
        exact_rank([[7]], (7, 11))
    assert excinfo.value.ranks == {7: 0, 11: 1}


def test_rref_and_nullspace():
    M = [[1, 2, 3], [2, 4, 6], [1, 0, 1]]
    R, pivots = rref(M)
    assert pivots == [0, 1]
    kernel = nullspace(M)
    assert len(kernel) == 1
    assert list(np.array(M, dtype=object).dot(kernel[0])) == [0, 0, 0]


def test_left_kernel_annihilates_rows():
    M = _low_rank(7, 5, 2, seed=12)
    kernel = left_kernel(M)
    assert len(kernel) == 7 - 2
    for v in kernel:
        assert list(np.array(v, dtype=object).dot(np.array(M, dtype=object))) == [0] * 5


def test_modular_kernels():
    p = 1000003
    M = _low_rank(5, 6, 2, seed=13)
    for v in kernel_mod_p(M, p):
        assert all(x % p == 0 for x in np.array(M, dtype=object).dot(v))
    left = left_kernel_mod_p(M, p)
    assert len(left) == 3
    for v in left:
        assert all(x % p == 0 for x in np.array(v, dtype=object).dot(np.array(M, dtype=object)))


def test_int64_and_object_paths_match():
    M = _low_rank(6, 6, 4, seed=14)
    as_array = np.array(M, dtype=np.int64)
    assert rank_mod_p(as_array, 2**31 - 1) == rank_mod_p(M, MERSENNE_61) == 4


def test_solve_consistent_and_inconsistent():
    M = [[1, 1], [1, -1], [2, 0]]
    assert solve(M, [3, 1, 4]) == [Fraction(2), Fraction(1)]
    assert solve(M, [3, 1, 5]) is None
