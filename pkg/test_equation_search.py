#!/usr/bin/env python3
"""Test basis construction, secant kernels, quotients and monomial interpolation."""
from fractions import Fraction

import pytest

from app.core import equation_search
from app.core.characters import dimension_for
from app.core.equation_search import (
    KNOWN_OUTCOMES,
    TWISTED_SYMMETRY,
    EvaluationMatrix,
    KernelCertificate,
    _IncrementalEchelon,
    build_basis,
    check_rank_modulo,
    kernel_on_variety,
    quotient_by_products,
    resolve_primes,
    run_search,
    smoke_symmetrized_evaluation,
    verify_certificate,
)
from app.core.exceptions import EvaluationBudgetExceeded, InputValidationError, ModularRankMismatch
from app.core.f6_kit import construct_f6
from app.core.interpolation import compare_with_f6, monomial_interpolation, weight_monomials
from app.core.polynomial import monomial_key
from app.core.seeds import derive_rng

P1 = 1000000007
P2 = 998244353


# --- incremental echelon ---------------------------------------------------------

def test_echelon_rejects_dependent_rows():
    echelon = _IncrementalEchelon()
    assert echelon.add([1, 2, 3])
    assert echelon.add([0, 1, 1])
    assert not echelon.add([2, 5, 7])
    assert not echelon.add([0, 0, 0])
    assert echelon.rank == 2


def test_echelon_mod_p():
    echelon = _IncrementalEchelon(7)
    assert echelon.add([1, 3])
    assert not echelon.add([2, 6])
    assert echelon.add([0, 5])
    assert echelon.rank == 2


# --- basis construction ---------------------------------------------------------------

@pytest.mark.parametrize("d,symmetry,expected", [(6, "sgn", 1), (4, "full", 5), (4, "sym", 1), (4, "sgn", 0)])
def test_build_basis_reaches_character_dimension(d, symmetry, expected):
    basis, matrix = build_basis(d, symmetry, derive_rng(50, "basis", d, symmetry))
    assert len(basis) == expected
    assert matrix.shape == (expected, expected)
    assert matrix.rank() == expected
    assert len({s.identifier for s in basis}) == expected


def test_build_basis_modulo_a_prime():
    basis, matrix = build_basis(4, "full", derive_rng(51, "basis-mod"), modulus=P1)
    assert len(basis) == 5
    assert matrix.modulus == P1
    assert matrix.rank() == 5


@pytest.mark.parametrize("d,symmetry", [(5, "full"), (0, "full"), (4, "twisted")])
def test_build_basis_rejects_bad_requests(d, symmetry):
    with pytest.raises(InputValidationError):
        build_basis(d, symmetry, derive_rng(52, "bad"))


def test_evaluation_matrix_round_trip_keeps_rank():
    _, matrix = build_basis(4, "full", derive_rng(53, "round-trip"))
    restored = EvaluationMatrix.from_dict(matrix.to_dict())
    assert restored.entries == matrix.entries
    assert restored.rank() == 5


def test_evaluation_matrix_rejects_missing_entries():
    with pytest.raises(InputValidationError):
        EvaluationMatrix(["a", "b"], ["p"], [[Fraction(1)]])
    with pytest.raises(InputValidationError):
        EvaluationMatrix(["a"], ["p", "q"], [[Fraction(1)]])


# --- prime policy ---------------------------------------------------------------------

def test_resolve_primes():
    rng = derive_rng(54, "primes")
    assert resolve_primes("exact", 16, rng) is None
    assert resolve_primes(None, 16, rng) is None
    assert resolve_primes("auto", 10, rng) is None
    primes = resolve_primes("auto", 12, rng)
    assert len(primes) == 2 and primes[0] != primes[1]
    assert resolve_primes([P1, P2], 6, rng) == [P1, P2]
    with pytest.raises(InputValidationError):
        resolve_primes([], 6, rng)


# --- kernels ------------------------------------------------------------------------------

def test_degree6_skew_invariant_vanishes_on_fifth_secant():
    basis, _ = build_basis(6, "sgn", derive_rng(55, "basis"))
    cert = kernel_on_variety(basis, 5, 7, derive_rng(55, "kernel"), modulus="exact")
    assert cert.dimension == 1
    assert cert.rank == 0
    assert cert.modulus is None
    assert cert.verification["pass"]
    assert cert.verification["identically_zero_vectors"] == []
    assert set(cert.modular_ranks.values()) == {0}


def test_degree6_kernel_modulo_primes():
    basis, _ = build_basis(6, "sgn", derive_rng(56, "basis"), modulus=P1)
    cert = kernel_on_variety(basis, 5, 7, derive_rng(56, "kernel"), modulus=[P1, P2])
    assert cert.dimension == 1
    assert cert.modulus == P1
    assert cert.modular_ranks == {P1: 0, P2: 0}
    assert cert.to_dict()["modulus"] == str(P1)


def test_degree4_invariants_all_vanish_on_rank_one():
    basis, _ = build_basis(4, "full", derive_rng(57, "basis"))
    cert = kernel_on_variety(basis, 1, 11, derive_rng(57, "kernel"), modulus="exact")
    assert cert.dimension == 5
    assert cert.verification["pass"]


def test_degree4_invariants_have_no_equation_at_rank_five():
    basis, _ = build_basis(4, "full", derive_rng(58, "basis"))
    cert = kernel_on_variety(basis, 5, 11, derive_rng(58, "kernel"), modulus="exact")
    assert cert.dimension == 0
    assert cert.rank == 5


def test_exact_rank_must_agree_with_check_primes():
    # det = 7, so the rank drops modulo 7 only
    matrix = EvaluationMatrix(["a", "b"], ["p", "q"], [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(7)]])
    assert check_rank_modulo(matrix, 2, [11, 13]) == {11: 2, 13: 2}
    with pytest.raises(ModularRankMismatch) as excinfo:
        check_rank_modulo(matrix, 2, [11, 7])
    assert excinfo.value.ranks == {11: 2, 7: 1}


def test_exact_kernel_rejects_disagreeing_check_primes(monkeypatch):
    basis, _ = build_basis(4, "full", derive_rng(63, "basis"))
    monkeypatch.setattr(equation_search, "rank_mod_p", lambda M, p: 0)
    with pytest.raises(ModularRankMismatch):
        kernel_on_variety(basis, 5, 11, derive_rng(63, "kernel"), modulus="exact", verify=False)

def test_rank_one_certificate_fails_on_fifth_secant():
    # degree-4 invariants cut out the rank-one locus but nothing on the fifth secant
    basis, _ = build_basis(4, "full", derive_rng(61, "basis"))
    cert = kernel_on_variety(basis, 1, 11, derive_rng(61, "kernel"), modulus="exact")
    report = verify_certificate(cert, basis, 5, derive_rng(61, "verify"), fresh_points=4)
    assert not report["pass"]
    assert report["vanishing_failures"]
    assert report["identically_zero_vectors"] == []


def test_certificate_rows_must_match_basis():
    basis, _ = build_basis(4, "full", derive_rng(62, "basis"))
    cert = kernel_on_variety(basis, 1, 11, derive_rng(62, "kernel"), modulus="exact")
    with pytest.raises(InputValidationError):
        verify_certificate(cert, basis[1:], 1, derive_rng(62, "verify"))


def test_kernel_needs_enough_points():
    basis, _ = build_basis(4, "full", derive_rng(59, "basis"))
    with pytest.raises(InputValidationError):
        kernel_on_variety(basis, 5, 3, derive_rng(59, "kernel"))
    with pytest.raises(InputValidationError):
        kernel_on_variety(basis, 0, 11, derive_rng(59, "kernel"))


# --- quotient ----------------------------------------------------------------------------

def test_degree6_kernel_is_spanned_by_f6():
    basis, _ = build_basis(6, "sgn", derive_rng(60, "basis"))
    cert = kernel_on_variety(basis, 5, 7, derive_rng(60, "kernel"), modulus="exact")
    result = quotient_by_products(cert, basis, construct_f6(), derive_rng(60, "quotient"))
    assert result.status == "ok"
    assert result.new_generators == 0
    assert result.representatives == []
    assert [t["rank_products"] for t in result.trials] == [1, 1]


def test_empty_kernel_has_no_new_generators():
    cert = KernelCertificate("sym", 4, 1, [], ["x"], ["p"])
    result = quotient_by_products(cert, [], construct_f6(), derive_rng(61, "empty"))
    assert result.to_dict()["new_generators"] == 0
    assert result.status == "ok"


# --- orchestration ------------------------------------------------------------------------------

def test_run_search_degree6_report():
    report = run_search(6, "sgn", 5, seed=7)
    assert report["primes"] == []
    assert len(report["basis"]) == 1
    assert report["points"] == 1 + 6
    assert report["kernel"]["dimension"] == 1
    assert report["quotient"]["new_generators"] == 0
    assert report["known_outcome"] == {"kernel_dimension": 1, "new_generators": 0, "matches": True}


def test_run_search_is_reproducible():
    first = run_search(4, "sym", 5, seed=3, quotient=False)
    second = run_search(4, "sym", 5, seed=3, quotient=False, threads=2)
    assert first == second
    assert "quotient" not in first


def test_known_outcome_only_at_rank_five():
    assert "known_outcome" not in run_search(6, "sgn", 2, seed=7, quotient=False)
    assert equation_search.known_outcome(6, "full", 5, 1, None)["matches"]
    assert not equation_search.known_outcome(16, "sym", 5, 3, 0)["matches"]
    assert equation_search.known_outcome(12, "full", 5, 0, None) is None


@pytest.mark.parametrize("key", sorted(KNOWN_OUTCOMES))
def test_known_outcomes_agree_with_f6_multiples(key):
    d, symmetry = key
    kernel_dimension, new = KNOWN_OUTCOMES[key]
    if d < 6:
        multiples = 0
    elif d == 6:
        multiples = int(symmetry != "sym")
    else:
        multiples = dimension_for(d - 6, TWISTED_SYMMETRY[symmetry])
    assert kernel_dimension - new == multiples
    assert kernel_dimension <= dimension_for(d, symmetry)


def test_run_search_guards_extended_degrees():
    with pytest.raises(InputValidationError):
        run_search(12, "sgn", 5, seed=0)


def test_smoke_evaluation_respects_budget():
    with pytest.raises(EvaluationBudgetExceeded, match="during term 1 of 120"):
        smoke_symmetrized_evaluation(degree=8, seed=1, budget_seconds=0)


@pytest.mark.slow
def test_smoke_evaluation_degree16_finishes():
    result = smoke_symmetrized_evaluation(degree=16, seed=1)
    assert result["degree"] == 16
    assert int(result["value"]) < int(result["prime"])


@pytest.mark.slow
def test_degree8_symmetric_invariants_have_no_equation():
    report = run_search(8, "sym", 5, seed=11)
    assert len(report["basis"]) == 4
    assert report["kernel"]["dimension"] == 0
    assert report["quotient"]["new_generators"] == 0


@pytest.mark.slow
def test_degree10_skew_kernel_is_generated_by_f6():
    report = run_search(10, "sgn", 5, seed=11)
    assert len(report["basis"]) == 2
    assert report["kernel"]["dimension"] == 1
    assert report["quotient"]["status"] == "ok"
    assert report["quotient"]["new_generators"] == 0


# --- monomial interpolation -----------------------------------------------------------------

def test_weight_zero_monomials():
    assert len(weight_monomials(2)) == 16
    assert weight_monomials(3) == ()
    assert weight_monomials(2, (2, 0, 0, 0, 0)) != ()
    assert weight_monomials(2, (4, 0, 0, 0, 0)) == ()


def test_no_quadric_vanishes_on_fifth_secant():
    cert = monomial_interpolation(2, r=5, rng=derive_rng(62, "interp"))
    assert cert.dimension == 0
    assert cert.rank == 16


def test_rank_one_interpolation_reconstructs_exact_kernel():
    cert = monomial_interpolation(4, r=1, rng=derive_rng(63, "interp"))
    assert cert.rank == 1
    assert cert.dimension == len(weight_monomials(4)) - 1
    assert cert.dimension >= 5
    assert cert.modulus is None
    assert cert.verification["pass"]
    assert cert.verification["exact"]


def test_interpolation_degree_guard():
    with pytest.raises(InputValidationError):
        monomial_interpolation(8, rng=derive_rng(64, "guard"))
    with pytest.raises(InputValidationError):
        monomial_interpolation(2, torus_weight=(0, 0, 0), rng=derive_rng(64, "guard"))


def test_compare_with_f6_reads_ratio():
    f6 = construct_f6()
    rows = sorted(f6.terms)
    cert = KernelCertificate("monomial", 6, 0, [[Fraction(3) * f6.terms[m] for m in rows]],
                             [monomial_key(m, 5) for m in rows], [])
    comparison = compare_with_f6(cert)
    assert comparison["proportional"]
    assert comparison["ratio"] == "3"
    assert comparison["f6_terms"] == 864


def test_compare_with_f6_needs_one_vector():
    cert = KernelCertificate("monomial", 6, 2, [], [], [])
    assert compare_with_f6(cert)["proportional"] is False


@pytest.mark.slow
def test_degree6_interpolation_recovers_f6():
    cert = monomial_interpolation(6, r=5, rng=derive_rng(65, "interp"))
    assert cert.dimension == 1
    assert compare_with_f6(cert)["proportional"]
