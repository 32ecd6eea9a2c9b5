"""
Naive interpolation: evaluate every monomial of a fixed torus weight at points of the
r-th secant variety and take the kernel.

Runs modulo a prime below 2^31 so the evaluation matrix and its row reduction stay
in int64; kernel vectors are then lifted by rational reconstruction and re-checked
exactly. Only practical for small degrees.
"""
import logging
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.core.config import settings
from app.core.equation_search import KernelCertificate
from app.core.exceptions import InputValidationError
from app.core.f6_kit import construct_f6
from app.core.linalg import kernel_mod_p
from app.core.polynomial import Monomial, SparsePolynomial, monomial_key
from app.core.rationals import clear_denominators, format_rational, rational_reconstruction, reduce_mod
from app.core.seeds import random_prime
from app.core.tensor import DenseTensor, index_to_bits, sample_generic, sample_secant

logger = logging.getLogger(__name__)

FACTORS = 5
ROW_BLOCK = 512


@lru_cache(maxsize=None)
def weight_monomials(d: int, torus_weight: Tuple[int, ...] = (0,) * FACTORS) -> Tuple[Monomial, ...]:
    """
    All degree-d monomials (sorted flat-index tuples) of the given torus weight.

    x_I has weight 2I - 1 per factor; candidates are extended in nondecreasing index
    order and pruned once a factor's remaining gap exceeds the remaining degree.
    """
    n = len(torus_weight)
    target = tuple(torus_weight)
    if any((t - d) % 2 for t in target):
        return ()
    weights = [tuple(2 * b - 1 for b in index_to_bits(i, n)) for i in range(1 << n)]
    found: List[Monomial] = []
    prefix: List[int] = []

    def extend(start: int, remaining: int, current: Tuple[int, ...]):
        if remaining == 0:
            if current == target:
                found.append(tuple(prefix))
            return
        for i in range(start, 1 << n):
            nxt = tuple(c + w for c, w in zip(current, weights[i]))
            if all(abs(t - x) <= remaining - 1 for t, x in zip(target, nxt)):
                prefix.append(i)
                extend(i, remaining - 1, nxt)
                prefix.pop()

    extend(0, d, (0,) * n)
    return tuple(found)


def _evaluation_matrix(monomials: Sequence[Monomial], points: Sequence[DenseTensor], modulus: int) -> np.ndarray:
    """V[k, j] = monomial j at point k, modulo a prime below 2^31."""
    residues = np.array([p.residue_array(modulus).reshape(-1).astype(np.int64) for p in points], dtype=np.int64)
    monos = np.array(monomials, dtype=np.int64)
    V = np.empty((len(points), len(monomials)), dtype=np.int64)
    for start in range(0, len(points), ROW_BLOCK):
        block = residues[start:start + ROW_BLOCK]
        values = block[:, monos[:, 0]]
        for j in range(1, monos.shape[1]):
            values = values * block[:, monos[:, j]] % modulus
        V[start:start + ROW_BLOCK] = values
    return V


def _reconstruct(vector: Sequence[int], modulus: int):
    lifted = []
    for v in vector:
        value = rational_reconstruction(int(v), modulus)
        if value is None:
            return None
        lifted.append(value)
    return lifted


def _as_polynomial(vector, monomials: Sequence[Monomial], d: int) -> SparsePolynomial:
    coeffs = clear_denominators(vector)
    return SparsePolynomial(FACTORS, d, {m: c for m, c in zip(monomials, coeffs) if c})


def monomial_interpolation(d: int, torus_weight: Sequence[int] = (0,) * FACTORS, r: int = 5,
                           rng: Optional[np.random.Generator] = None, num_points: Optional[int] = None,
                           height: Optional[int] = None) -> KernelCertificate:
    """
    Kernel of the weight-restricted monomial evaluation matrix at secant points.

    Args:
        d: Degree, at most INTERPOLATION_MAX_DEGREE
        torus_weight: Weight vector of the monomials (one entry per factor)
        r: Secant rank of the sample points
        rng: Task generator (prime and points)
        num_points: Defaults to #monomials + POINT_MARGIN

    Returns:
        Exact certificate when every kernel vector reconstructs and re-verifies,
        otherwise the modular certificate
    """
    if d < 1 or d > settings.INTERPOLATION_MAX_DEGREE:
        raise InputValidationError(f"monomial interpolation supports degrees 1..{settings.INTERPOLATION_MAX_DEGREE}, got {d}")
    weight = tuple(int(w) for w in torus_weight)
    if len(weight) != FACTORS:
        raise InputValidationError(f"torus weight needs {FACTORS} entries, got {len(weight)}")
    rng = rng if rng is not None else np.random.default_rng(settings.DEFAULT_SEED)
    monomials = weight_monomials(d, weight)
    row_ids = [monomial_key(m, FACTORS) for m in monomials]
    provenance: Dict[str, Any] = {"kind": "monomial_interpolation", "degree": d, "torus_weight": list(weight),
                                  "rank": r, "monomials": len(monomials)}
    if not monomials:
        return KernelCertificate("monomial", d, 0, [], row_ids, [], provenance=provenance)

    prime = random_prime(rng, settings.FAST_PRIME_BITS)
    num_points = len(monomials) + settings.POINT_MARGIN if num_points is None else num_points
    points = [sample_secant(r, FACTORS, height, rng) for _ in range(num_points)]
    column_ids = [f"secant-r{r}-{k}" for k in range(num_points)]
    provenance.update({"prime": str(prime), "points": num_points})
    logger.info(f"[Interpolation] d={d}: {len(monomials)} monomials at {num_points} points mod {prime}")

    V = _evaluation_matrix(monomials, points, prime)
    kernel = kernel_mod_p(V, prime)
    rank = len(monomials) - len(kernel)
    logger.info(f"[Interpolation] d={d}: rank {rank}, kernel dimension {len(kernel)}")

    lifted = [_reconstruct(v, prime) for v in kernel]
    fresh = [sample_secant(r, FACTORS, height, rng) for _ in range(settings.FRESH_POINTS)]
    if all(v is not None for v in lifted):
        polys = [_as_polynomial(v, monomials, d) for v in lifted]
        failures = [k for k, f in enumerate(polys) if any(f.evaluate(p) != 0 for p in fresh)]
        generic = sample_generic(FACTORS, settings.SECANT_HEIGHT, rng)
        zero_at_generic = [k for k, f in enumerate(polys) if f.evaluate(generic) == 0]
        verification = {
            "pass": not failures,
            "exact": True,
            "fresh_points": len(fresh),
            "vanishing_failures": failures[:5],
            "zero_at_generic": zero_at_generic[:5],
        }
        if not failures:
            return KernelCertificate("monomial", d, rank, lifted, row_ids, column_ids, None,
                                     {prime: rank}, verification, provenance)
        logger.warning(f"[Interpolation] {len(failures)} reconstructed vectors fail exact verification")
    else:
        logger.warning("[Interpolation] rational reconstruction failed, keeping the modular kernel")

    polys_mod = [SparsePolynomial(FACTORS, d, {m: c for m, c in zip(monomials, v) if c}) for v in kernel]
    failures = [k for k, f in enumerate(polys_mod) if any(f.evaluate(p, prime) for p in fresh)]
    verification = {"pass": not failures, "exact": False, "fresh_points": len(fresh),
                    "vanishing_failures": failures[:5]}
    return KernelCertificate("monomial", d, rank, kernel, row_ids, column_ids, prime,
                             {prime: rank}, verification, provenance)


def compare_with_f6(cert: KernelCertificate) -> Dict[str, Any]:
    """
    Whether a one-dimensional degree-6 kernel is proportional to f6.

    The ratio is read at the first f6 monomial and checked on every row (modulo the
    certificate's prime for modular certificates).
    """
    if cert.degree != 6 or cert.dimension != 1:
        return {"proportional": False, "reason": f"need a one-dimensional degree-6 kernel, got dimension {cert.dimension}"}
    f6 = construct_f6()
    f6_coeffs = {monomial_key(m, FACTORS): c for m, c in f6.terms.items()}
    vector = dict(zip(cert.row_ids, cert.basis[0]))
    missing = [key for key in f6_coeffs if key not in vector]
    if missing:
        return {"proportional": False, "reason": f"{len(missing)} f6 monomials outside the interpolation basis"}
    pivot = next(iter(sorted(f6_coeffs)))
    p = cert.modulus
    if p:
        ratio = vector[pivot] * pow(reduce_mod(f6_coeffs[pivot], p), -1, p) % p
        proportional = all((vector[k] - ratio * f6_coeffs.get(k, 0)) % p == 0 for k in cert.row_ids)
    else:
        ratio = Fraction(vector[pivot]) / f6_coeffs[pivot]
        proportional = all(vector[k] == ratio * f6_coeffs.get(k, 0) for k in cert.row_ids)
    return {
        "proportional": proportional and ratio != 0,
        "ratio": format_rational(ratio),
        "f6_terms": len(f6_coeffs),
        "kernel_support": sum(1 for v in cert.basis[0] if v),
    }
