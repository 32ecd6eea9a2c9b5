"""
The degree-6 equation f6 of the fifth secant variety of (P^1)^×5: explicit
construction from 15 skew-symmetrized seed monomials, its verification suite,
the degree product of the complete intersection, lifting to more factors, and
inheritance to factors of larger dimension.
"""
import logging
from fractions import Fraction
from functools import lru_cache, partial, reduce
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.core.config import settings
from app.core.exceptions import InputValidationError, VerificationFailed
from app.core.invariants import InvariantSpec, evaluate_invariant
from app.core.linalg import exact_rank
from app.core.parallel import parallel_map
from app.core.permutations import all_permutations
from app.core.polynomial import Monomial, SparsePolynomial, monomial_from_keys, monomial_key
from app.core.rationals import format_rational
from app.core.seeds import derive_rng
from app.core.tableaux import degree6_quintuple
from app.core.tensor import DenseTensor, apply_factor_maps, apply_perm, sample_generic, sample_secant

logger = logging.getLogger(__name__)

FACTORS = 5
F6_DEGREE = 6
F16_DEGREE = 16

# (printed sign, seed monomial)
F6_SEED_MONOMIALS: Tuple[Tuple[int, Tuple[str, ...]], ...] = (
    (-1, ("00000", "01010", "01101", "10011", "10100", "11111")),
    (+1, ("00000", "01100", "01111", "10010", "10111", "11001")),
    (-1, ("00000", "01100", "01111", "10011", "10110", "11001")),
    (+1, ("00000", "01101", "01110", "10011", "10110", "11001")),
    (-1, ("00110", "01000", "01101", "10000", "10011", "11111")),
    (+1, ("00100", "01010", "01111", "10000", "10111", "11001")),
    (+1, ("00100", "01000", "01111", "10011", "10110", "11001")),
    (+1, ("00110", "01000", "01101", "10001", "10010", "11111")),
    (-1, ("00100", "01010", "01111", "10001", "10111", "11000")),
    (+1, ("00100", "01010", "01111", "10011", "10101", "11000")),
    (-1, ("00101", "01010", "01111", "10000", "10110", "11001")),
    (+1, ("00100", "01011", "01110", "10011", "10101", "11000")),
    (-1, ("00110", "01001", "01100", "10001", "10010", "11111")),
    (+1, ("00110", "01001", "01111", "10011", "10100", "11000")),
    (+1, ("00111", "01010", "01101", "10011", "10100", "11000")),
)


def skew_symmetrize_monomial(mono: Monomial, n: int = FACTORS) -> SparsePolynomial:
    """
    Signed orbit sum  sum_sigma sgn(sigma) (mono∘sigma), scaled so ``mono`` has coefficient +1.

    The orbit sum gives ``mono`` the coefficient sum of sgn over its stabilizer; that is
    zero exactly when the stabilizer holds an odd permutation, and then the zero
    polynomial is returned.
    """
    seed_mono = tuple(sorted(mono))
    seed = SparsePolynomial.from_monomial(n, seed_mono)
    orbit: Dict[Monomial, int] = {}
    for sigma in all_permutations(n):
        image = next(iter(seed.permuted(sigma).terms))
        orbit[image] = orbit.get(image, 0) + sigma.sign
    total = SparsePolynomial(n, len(seed_mono), orbit)
    c = total.coefficient(seed_mono)
    if c == 0:
        return SparsePolynomial(n, len(seed_mono))
    logger.debug(f"[F6Kit] skew orbit of {monomial_key(seed_mono, n)}: {len(total)} monomials, stabilizer {abs(c)}")
    return total.scaled(Fraction(1, c))


@lru_cache(maxsize=1)
def construct_f6() -> SparsePolynomial:
    """Sum of the skew-symmetrized seed monomials with their printed signs."""
    f6 = SparsePolynomial(FACTORS, F6_DEGREE)
    for sign, keys in F6_SEED_MONOMIALS:
        f6 = f6 + skew_symmetrize_monomial(monomial_from_keys(keys)).scaled(sign)
    logger.info(f"[F6Kit] constructed f6 with {len(f6)} monomials")
    return f6


def bezout_degree(degrees: Sequence[int] = (F6_DEGREE, F16_DEGREE)) -> int:
    """Degree of a complete intersection cut out by equations of the given degrees."""
    result = 1
    for d in degrees:
        if d < 1:
            raise InputValidationError(f"equation degrees must be positive, got {d}")
        result *= d
    return result


def bezout_report() -> Dict[str, Any]:
    return {
        "degrees": [F6_DEGREE, F16_DEGREE],
        "bezout_degree": bezout_degree(),
        "secant_degree_lower_bound": "out of scope: the bound deg(X) >= 96 comes from numerical homotopy continuation",
    }


# --- verification -----------------------------------------------------------

def _f6_value(A: DenseTensor) -> Fraction:
    return construct_f6().evaluate(A)


def _check_skew(rng: np.random.Generator, samples: int, height: int) -> Dict[str, Any]:
    f6 = construct_f6()
    symbolic_failures = [
        list(sigma.image) for sigma in all_permutations(FACTORS)
        if f6.permuted(sigma) != f6.scaled(sigma.sign)
    ]
    pointwise_failures = []
    for k in range(samples):
        A = sample_generic(FACTORS, height, rng)
        base = _f6_value(A)
        for sigma in all_permutations(FACTORS):
            if _f6_value(apply_perm(A, sigma)) != sigma.sign * base:
                pointwise_failures.append({"sample": k, "sigma": list(sigma.image)})
    return {
        "pass": not symbolic_failures and not pointwise_failures,
        "permutations": len(all_permutations(FACTORS)),
        "points": samples,
        "symbolic_failures": symbolic_failures[:5],
        "pointwise_failures": pointwise_failures[:5],
    }


def _check_sl2(f6: SparsePolynomial) -> Dict[str, Any]:
    nonzero = []
    for factor in range(FACTORS):
        for name, op in (("raising", f6.raising), ("lowering", f6.lowering)):
            image = op(factor)
            if not image.is_zero():
                nonzero.append({"factor": factor, "operator": name, "monomials": len(image)})
    weight_zero = f6.is_weight_zero()
    return {"pass": not nonzero and weight_zero, "operators": 2 * FACTORS,
            "weight_zero": weight_zero, "failures": nonzero}


def _secant_value(seed: int, height: int, index: int) -> Fraction:
    rng = derive_rng(seed, "verify-f6", "secant", index)
    return _f6_value(sample_secant(5, FACTORS, height, rng))


def _check_vanishing(seed: int, points: int, height: int, threads: Optional[int]) -> Dict[str, Any]:
    values = parallel_map(partial(_secant_value, seed, height), range(points), threads)
    witnesses = [{"point": k, "value": format_rational(v)} for k, v in enumerate(values) if v != 0]
    return {"pass": not witnesses, "points": points, "rank": 5, "witnesses": witnesses[:5]}


def _check_nonvanishing(rng: np.random.Generator, height: int, rank6_tries: int = 10) -> Dict[str, Any]:
    generic = _f6_value(sample_generic(FACTORS, settings.GENERIC_HEIGHT, rng))
    rank6 = None
    for attempt in range(rank6_tries):
        value = _f6_value(sample_secant(6, FACTORS, height, rng))
        if value != 0:
            rank6 = {"attempt": attempt, "value": format_rational(value)}
            break
    return {"pass": generic != 0 and rank6 is not None,
            "generic_value": format_rational(generic), "rank6": rank6}


def _check_tableau_proportionality(rng: np.random.Generator, points: int, threads: Optional[int]) -> Dict[str, Any]:
    spec = InvariantSpec.single(degree6_quintuple(), "signed")
    ratios = set()
    zero_mismatch = []
    for k in range(points):
        A = sample_generic(FACTORS, settings.SECANT_HEIGHT, rng)
        tab = evaluate_invariant(spec, A, threads=threads)
        f = _f6_value(A)
        if f == 0 or tab == 0:
            if f != tab:
                zero_mismatch.append(k)
            continue
        ratios.add(tab / f)
    ratio = next(iter(ratios)) if len(ratios) == 1 else None
    return {
        "pass": ratio is not None and not zero_mismatch,
        "points": points,
        "ratio": format_rational(ratio) if ratio is not None else None,
        "distinct_ratios": len(ratios),
    }


def verify_f6(points: int = 100, seed: Optional[int] = None, threads: Optional[int] = None,
              height: Optional[int] = None, proportionality_points: int = 12,
              raise_on_failure: bool = True) -> Dict[str, Any]:
    """
    Run the f6 checks and return the report.

    Checks: (a) skew-invariance under all factor permutations, symbolically and at
    random points; (b) annihilation by the raising and lowering operator of each
    factor plus weight zero; (c) exact vanishing at ``points`` rank-5 samples;
    (d) nonvanishing at a generic tensor and at a rank-6 sample; (e) proportionality
    with the signed symmetrization of the degree-6 standard quintuple.

    Raises:
        VerificationFailed: first failing check, carrying the report so far
    """
    seed = settings.DEFAULT_SEED if seed is None else seed
    height = settings.SECANT_HEIGHT if height is None else height
    f6 = construct_f6()
    report: Dict[str, Any] = {"monomials": len(f6), "checks": {}}
    steps = (
        ("a_skew_invariance", lambda: _check_skew(derive_rng(seed, "verify-f6", "skew"), 5, settings.GENERIC_HEIGHT)),
        ("b_sl2_annihilation", lambda: _check_sl2(f6)),
        ("c_secant_vanishing", lambda: _check_vanishing(seed, points, height, threads)),
        ("d_nonvanishing", lambda: _check_nonvanishing(derive_rng(seed, "verify-f6", "generic"), height)),
        ("e_tableau_proportionality", lambda: _check_tableau_proportionality(
            derive_rng(seed, "verify-f6", "tableau"), proportionality_points, threads)),
    )
    for name, run in steps:
        result = run()
        report["checks"][name] = result
        logger.info(f"[F6Kit] check {name}: {'pass' if result['pass'] else 'FAIL'}")
        if not result["pass"] and raise_on_failure:
            report["bezout"] = bezout_report()
            raise VerificationFailed(name, report)
    report["bezout"] = bezout_report()
    report["pass"] = all(c["pass"] for c in report["checks"].values())
    return report


# --- lifting ------------------------------------------------------------------

Grouping = Sequence[Sequence[int]]


def _validate_grouping(grouping: Grouping, n: int) -> List[List[int]]:
    blocks = [sorted(int(k) for k in block) for block in grouping]
    if len(blocks) != FACTORS or any(not b for b in blocks):
        raise InputValidationError(f"grouping needs exactly {FACTORS} nonempty blocks, got {blocks}")
    flat = sorted(k for b in blocks for k in b)
    if flat != list(range(n)):
        raise InputValidationError(f"grouping must partition the factors 0..{n - 1}, got {blocks}")
    return blocks


def _projection_maps(widths: Sequence[int], projections: Sequence[Sequence[Sequence[int]]],
                     labels: Sequence[str]) -> List[np.ndarray]:
    """Exact 2 x width object matrices, each checked to have rank 2."""
    if len(projections) != len(widths):
        raise InputValidationError(f"need {len(widths)} projections, got {len(projections)}")
    maps = []
    for width, proj, label in zip(widths, projections, labels):
        if len(proj) != 2 or any(len(row) != width for row in proj):
            raise InputValidationError(f"projection for {label} must be 2 x {width}")
        if exact_rank(proj) != 2:
            raise InputValidationError(f"projection for {label} does not have rank 2")
        mat = np.empty((2, width), dtype=object)
        mat[:, :] = [[Fraction(v) for v in row] for row in proj]
        maps.append(mat)
    return maps


def lift_and_evaluate(A: DenseTensor, grouping: Grouping, projections: Sequence[Sequence[Sequence[int]]],
                      f: Optional[SparsePolynomial] = None) -> Fraction:
    """
    Evaluate f at the 5-factor tensor obtained by projecting each block of factors of A
    onto a 2-dimensional space.

    Args:
        A: Tensor with n >= 5 factors
        grouping: Five nonempty blocks partitioning 0..n-1
        projections: Per block, a 2 x 2^|block| exact matrix of rank 2 (columns indexed
            by the block's bits, lowest factor most significant)
        f: Polynomial on 5 factors, f6 by default

    Returns:
        Exact value
    """
    f = f if f is not None else construct_f6()
    if A.n < FACTORS:
        raise InputValidationError(f"lifting needs at least {FACTORS} factors, got {A.n}")
    blocks = _validate_grouping(grouping, A.n)
    maps = _projection_maps([1 << len(b) for b in blocks], projections, [f"block {b}" for b in blocks])
    order = [k for b in blocks for k in b]
    grouped = np.transpose(A.array, order).reshape(tuple(1 << len(b) for b in blocks))
    projected = DenseTensor.from_array(apply_factor_maps(grouped, maps))
    return f.evaluate(projected)


def random_grouping(n: int, rng: np.random.Generator) -> List[List[int]]:
    """Uniformly shuffled factors; the first five seed the blocks, the rest join random blocks."""
    if n < FACTORS:
        raise InputValidationError(f"need at least {FACTORS} factors, got {n}")
    order = [int(k) for k in rng.permutation(n)]
    blocks = [[k] for k in order[:FACTORS]]
    for k in order[FACTORS:]:
        blocks[int(rng.integers(0, FACTORS))].append(k)
    return sorted(sorted(b) for b in blocks)


def _random_projection(width: int, rng: np.random.Generator, height: int) -> List[List[int]]:
    while True:
        proj = rng.integers(-height, height + 1, size=(2, width)).tolist()
        if exact_rank(proj) == 2:
            return proj


def random_projections(grouping: Grouping, rng: np.random.Generator, height: int = 10) -> List[List[List[int]]]:
    return [_random_projection(1 << len(block), rng, height) for block in grouping]


def lift_trials(n: int, r: int, trials: int, seed: int, height: Optional[int] = None,
                threads: Optional[int] = None) -> List[Dict[str, Any]]:
    """Lifted f6 at ``trials`` rank-r tensors with n factors, each under a fresh grouping and projection."""
    return parallel_map(partial(_lift_trial, n, r, seed, height), range(trials), threads)


def _lift_trial(n: int, r: int, seed: int, height: Optional[int], index: int) -> Dict[str, Any]:
    rng = derive_rng(seed, "lift", n, r, index)
    A = sample_secant(r, n, height, rng)
    grouping = random_grouping(n, rng)
    projections = random_projections(grouping, rng)
    value = lift_and_evaluate(A, grouping, projections)
    return {"trial": index, "grouping": grouping, "value": format_rational(value)}


def lift_generic_witness(n: int, seed: int, attempts: int = 10) -> Optional[Dict[str, Any]]:
    """First nonzero lifted f6 value at a generic n-factor tensor, or None."""
    rng = derive_rng(seed, "lift", n, "generic")
    A = sample_generic(n, settings.SECANT_HEIGHT, rng)
    for attempt in range(attempts):
        grouping = random_grouping(n, rng)
        value = lift_and_evaluate(A, grouping, random_projections(grouping, rng))
        if value != 0:
            return {"attempt": attempt, "grouping": grouping, "value": format_rational(value)}
    return None


# --- inheritance to larger factor dimensions --------------------------------------

def _validate_dims(dims: Sequence[int]) -> List[int]:
    dims = [int(a) for a in dims]
    if len(dims) != FACTORS or any(a < 2 for a in dims):
        raise InputValidationError(f"need {FACTORS} factor dimensions, each at least 2, got {dims}")
    return dims


def inherit_and_evaluate(T: np.ndarray, projections: Sequence[Sequence[Sequence[int]]],
                         f: Optional[SparsePolynomial] = None) -> Fraction:
    """
    Evaluate f at the (k^2)^⊗5 tensor obtained by projecting factor i of T from k^{a_i}
    onto k^2. As the projections vary these values span the inherited equations on
    k^{a_1} ⊗ ... ⊗ k^{a_5}.

    Args:
        T: Exact array of shape (a_1, ..., a_5), every a_i >= 2
        projections: Per factor, a 2 x a_i matrix of rank 2
        f: Polynomial on 5 binary factors, f6 by default
    """
    f = f if f is not None else construct_f6()
    dims = _validate_dims(T.shape)
    maps = _projection_maps(dims, projections, [f"factor {i}" for i in range(FACTORS)])
    exact = np.array([Fraction(v) for v in T.reshape(-1).tolist()], dtype=object).reshape(T.shape)
    return f.evaluate(DenseTensor.from_array(apply_factor_maps(exact, maps)))


def sample_secant_in_dims(r: int, dims: Sequence[int], height: Optional[int] = None,
                          rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Sum of r rank-1 tensors u_1 ⊗ ... ⊗ u_5 with u_i in [-height, height]^{a_i}, as an object array."""
    if r < 1:
        raise InputValidationError(f"secant rank must be at least 1, got {r}")
    dims = _validate_dims(dims)
    height = settings.SECANT_HEIGHT if height is None else height
    rng = rng if rng is not None else np.random.default_rng(settings.DEFAULT_SEED)
    total = np.zeros(tuple(dims), dtype=object)
    for _ in range(r):
        vectors = []
        for a in dims:
            v = rng.integers(-height, height + 1, size=a)
            while not v.any():
                v = rng.integers(-height, height + 1, size=a)
            vectors.append(np.array([int(x) for x in v], dtype=object))
        total = total + reduce(np.multiply.outer, vectors)
    return total


def _dims_label(dims: Sequence[int]) -> str:
    return "x".join(str(a) for a in dims)


def inherit_trials(dims: Sequence[int], r: int, trials: int, seed: int, height: Optional[int] = None,
                   threads: Optional[int] = None) -> List[Dict[str, Any]]:
    """f6 through random projections at ``trials`` rank-r tensors of shape ``dims``."""
    dims = _validate_dims(dims)
    return parallel_map(partial(_inherit_trial, tuple(dims), r, seed, height), range(trials), threads)


def _inherit_trial(dims: Tuple[int, ...], r: int, seed: int, height: Optional[int], index: int) -> Dict[str, Any]:
    rng = derive_rng(seed, "inherit", _dims_label(dims), r, index)
    T = sample_secant_in_dims(r, dims, height, rng)
    projections = [_random_projection(a, rng, 10) for a in dims]
    return {"trial": index, "value": format_rational(inherit_and_evaluate(T, projections))}


def inherit_generic_witness(dims: Sequence[int], seed: int, attempts: int = 10) -> Optional[Dict[str, Any]]:
    """First nonzero inherited f6 value at a generic tensor of shape ``dims``, or None."""
    dims = _validate_dims(dims)
    rng = derive_rng(seed, "inherit", _dims_label(dims), "generic")
    height = settings.SECANT_HEIGHT
    T = np.array([int(v) for v in rng.integers(-height, height + 1, size=int(np.prod(dims)))],
                 dtype=object).reshape(tuple(dims))
    for attempt in range(attempts):
        value = inherit_and_evaluate(T, [_random_projection(a, rng, 10) for a in dims])
        if value != 0:
            return {"attempt": attempt, "value": format_rational(value)}
    return None
