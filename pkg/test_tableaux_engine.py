#!/usr/bin/env python3
"""Test tableaux, bracket contraction strategies and invariant specifications."""
import time
from fractions import Fraction

import pytest

from app.core.contraction import contract_array, contract_columns, elimination_plan, evaluate_quintuple, resolve_strategy
from app.core.exceptions import EvaluationBudgetExceeded, InputValidationError
from app.core.invariants import InvariantSpec, evaluate_invariant, linear_combination
from app.core.permutations import FactorPermutation, all_permutations
from app.core.rationals import reduce_mod
from app.core.seeds import derive_rng
from app.core.tableaux import (
    TableauQuintuple,
    TwoRowTableau,
    degree6_quintuple,
    enumerate_standard,
    random_quintuple,
)
from app.core.tensor import apply_group, apply_perm, random_sl2_tuple, sample_generic, sample_rank1, sample_secant, scale

CATALAN = {1: 1, 2: 2, 3: 5, 4: 14, 5: 42, 6: 132, 7: 429, 8: 1430}
PRIME = 1000000007


# --- tableaux ----------------------------------------------------------------

@pytest.mark.parametrize("m", sorted(CATALAN))
def test_standard_tableaux_are_counted_by_catalan_numbers(m):
    tableaux = enumerate_standard(m)
    assert len(tableaux) == CATALAN[m]
    assert all(t.is_standard for t in tableaux)


def test_from_rows_tracks_column_flips():
    tab, sign = TwoRowTableau.from_rows([[2, 3], [1, 4]])
    assert tab.columns == ((1, 2), (3, 4))
    assert sign == -1
    q, qsign = TableauQuintuple.from_rows([[[2], [1]]] * 3)
    assert qsign == -1
    assert q.degree == 2


def test_non_canonical_tableau_is_rejected():
    with pytest.raises(InputValidationError):
        TwoRowTableau(((2, 1),))
    with pytest.raises(InputValidationError):
        TwoRowTableau(((2, 4), (1, 3)))


def test_degree6_quintuple_is_standard():
    q = degree6_quintuple()
    assert str(q) == "135/246 134/256 125/346 124/356 123/456"
    assert all(t.is_standard for t in q.tableaux)


# --- contraction -------------------------------------------------------------------

def test_bracket_is_antisymmetric():
    A = sample_generic(5, 10, derive_rng(20, "antisym"))
    columns = [[(1, 2), (3, 4)], [(1, 3), (2, 4)], [(1, 4), (2, 3)], [(1, 2), (3, 4)], [(1, 3), (2, 4)]]
    flipped = [list(c) for c in columns]
    flipped[2] = [(4, 1), (2, 3)]
    value = contract_columns(columns, A)
    assert contract_columns(flipped, A) == -value


@pytest.mark.parametrize("max_m", [3, pytest.param(4, marks=pytest.mark.slow)])
def test_enumeration_and_elimination_agree(max_m):
    rng = derive_rng(21, "strategies", max_m)
    for k in range(50):
        q = random_quintuple(1 + k % max_m, rng)
        A = sample_generic(5, 10, rng)
        exact = evaluate_quintuple(q, A, strategy="enumerate")
        assert evaluate_quintuple(q, A, strategy="eliminate") == exact
        assert evaluate_quintuple(q, A, strategy="eliminate", modulus=PRIME) == reduce_mod(exact, PRIME)
        assert evaluate_quintuple(q, A, strategy="enumerate", modulus=PRIME) == reduce_mod(exact, PRIME)


def test_auto_strategy_switches_on_m():
    assert resolve_strategy("auto", 4) == "enumerate"
    assert resolve_strategy("auto", 5) == "eliminate"
    with pytest.raises(InputValidationError):
        resolve_strategy("magic", 2)


@pytest.mark.parametrize("strategy", ["enumerate", "eliminate"])
def test_contraction_stops_at_deadline(strategy):
    rng = derive_rng(26, "deadline", strategy)
    q = random_quintuple(3, rng)
    A = sample_generic(5, 10, rng)
    with pytest.raises(EvaluationBudgetExceeded):
        contract_array(q.columns, A.array, None, strategy, deadline=time.monotonic())
    later = time.monotonic() + 3600
    assert contract_array(q.columns, A.array, None, strategy, deadline=later) == evaluate_quintuple(q, A)


def test_elimination_plan_orders_every_copy():
    q = random_quintuple(4, derive_rng(22, "plan"))
    plan = elimination_plan(q.columns)
    assert sorted(plan.order) == list(range(8))


def test_quintuple_is_homogeneous_of_degree_2m():
    rng = derive_rng(23, "homogeneous")
    q = random_quintuple(2, rng)
    A = sample_generic(5, 10, rng)
    lam = Fraction(3, 2)
    assert evaluate_quintuple(q, scale(A, lam)) == lam ** 4 * evaluate_quintuple(q, A)


def test_quintuple_is_sl2_invariant():
    rng = derive_rng(24, "sl2")
    for m in (1, 2, 3):
        q = random_quintuple(m, rng)
        A = sample_generic(5, 10, rng)
        g = random_sl2_tuple(5, rng)
        assert evaluate_quintuple(q, apply_group(A, g)) == evaluate_quintuple(q, A)


def test_quintuple_permutation_equivariance():
    rng = derive_rng(25, "equivariance")
    q = random_quintuple(2, rng)
    A = sample_generic(5, 10, rng)
    for sigma in all_permutations(5):
        assert evaluate_quintuple(q.permuted(sigma), A) == evaluate_quintuple(q, apply_perm(A, sigma.inverse()))


def test_quintuples_vanish_on_rank_one():
    rng = derive_rng(26, "rank1")
    for m in (1, 2, 4):
        assert evaluate_quintuple(random_quintuple(m, rng), sample_rank1(5, 10, rng)) == 0


def test_degree6_quintuple_vanishes_on_rank_five():
    rng = derive_rng(27, "rank5")
    q = degree6_quintuple()
    for _ in range(3):
        assert evaluate_quintuple(q, sample_secant(5, 5, 10, rng)) == 0


def test_factor_count_mismatch():
    q = degree6_quintuple()
    with pytest.raises(InputValidationError):
        evaluate_quintuple(q, sample_generic(4, 5, derive_rng(28, "n4")))


# --- invariant specifications --------------------------------------------------------

def test_spec_document_folds_column_signs():
    document = {
        "degree": 2,
        "symmetrization": "none",
        "terms": [{"coeff": "3/2", "quintuple": {"m": 1, "tableaux": [[[2], [1]]] + [[[1], [2]]] * 4}}],
    }
    spec = InvariantSpec.from_dict(document)
    assert spec.terms[0][0] == Fraction(-3, 2)
    assert InvariantSpec.from_dict(spec.to_dict()) == spec
    assert InvariantSpec.from_dict(spec.to_dict()).identifier == spec.identifier


def test_spec_document_degree_must_match():
    document = {"degree": 4, "terms": [{"coeff": "1", "quintuple": {"m": 1, "tableaux": [[[1], [2]]] * 5}}]}
    with pytest.raises(InputValidationError):
        InvariantSpec.from_dict(document)


def test_identifier_depends_on_symmetrization():
    q = degree6_quintuple()
    ids = {InvariantSpec.single(q, s).identifier for s in ("none", "sum", "signed")}
    assert len(ids) == 3


def test_linear_combination_evaluates_linearly():
    rng = derive_rng(29, "linear")
    p, q = random_quintuple(2, rng), random_quintuple(2, rng)
    A = sample_generic(5, 10, rng)
    combo = linear_combination([InvariantSpec.single(p), InvariantSpec.single(q)], [2, -1])
    expected = 2 * evaluate_quintuple(p, A) - evaluate_quintuple(q, A)
    assert evaluate_invariant(combo, A) == expected


def test_symmetrized_invariants_transform_by_their_character():
    rng = derive_rng(30, "characters")
    A = sample_generic(5, 10, rng)
    tau = FactorPermutation.from_cycles(5, [(0, 3)])
    sym = InvariantSpec.single(random_quintuple(2, rng), "sum")
    assert evaluate_invariant(sym, apply_perm(A, tau)) == evaluate_invariant(sym, A)
    skew = InvariantSpec.single(degree6_quintuple(), "signed")
    assert evaluate_invariant(skew, apply_perm(A, tau)) == -evaluate_invariant(skew, A)


def test_modular_invariant_matches_exact_value():
    rng = derive_rng(31, "modular")
    # symmetrized sums cost 120 evaluations, so they stay at small m
    shapes = [(3, "none"), (2, "sum"), (1, "signed")]
    for k in range(50):
        m, symmetrization = shapes[k % 3]
        spec = InvariantSpec.single(random_quintuple(m, rng), symmetrization)
        A = sample_generic(5, 10, rng)
        exact = evaluate_invariant(spec, A)
        assert evaluate_invariant(spec, A, modulus=PRIME) == reduce_mod(exact, PRIME)


def test_modular_invariant_is_thread_independent():
    rng = derive_rng(32, "modular-threads")
    spec = InvariantSpec.single(random_quintuple(3, rng), "signed")
    A = sample_generic(5, 10, rng)
    exact = evaluate_invariant(spec, A)
    assert evaluate_invariant(spec, A, modulus=PRIME, threads=2) == reduce_mod(exact, PRIME)
