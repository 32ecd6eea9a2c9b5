"""
Exact and modular linear algebra over Q and Z/pZ.

Matrices are plain nested lists (or 2-D arrays) of ints / Fractions. Exact rank uses
fraction-free (Bareiss) elimination on denominator-cleared rows; kernels use Fraction
row reduction. Modular routines run vectorized on int64 when p < 2^31 and on Python
ints otherwise.
"""
import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.core.exceptions import InputValidationError, ModularRankMismatch
from app.core.rationals import Scalar, clear_denominators, reduce_mod

logger = logging.getLogger(__name__)

INT64_PRIME_LIMIT = 1 << 31


def _shape(M) -> Tuple[int, int]:
    rows = len(M)
    cols = len(M[0]) if rows else 0
    for row in M:
        if len(row) != cols:
            raise InputValidationError("ragged matrix")
    return rows, cols


def transpose(M: Sequence[Sequence[Scalar]]) -> List[List[Scalar]]:
    rows, cols = _shape(M)
    return [[M[i][j] for i in range(rows)] for j in range(cols)]


def bareiss_rank(M: Sequence[Sequence[Scalar]]) -> int:
    """Rank over Q by fraction-free elimination, skipping pivot-free columns."""
    rows, cols = _shape(M)
    if rows == 0 or cols == 0:
        return 0
    A = np.empty((rows, cols), dtype=object)
    for i, row in enumerate(M):
        A[i, :] = clear_denominators(row)
    rank, prev = 0, 1
    for c in range(cols):
        if rank == rows:
            break
        nz = [i for i in range(rank, rows) if A[i, c] != 0]
        if not nz:
            continue
        if nz[0] != rank:
            A[[rank, nz[0]]] = A[[nz[0], rank]]
        pivot = A[rank, c]
        if rank + 1 < rows and c + 1 < cols:
            A[rank + 1:, c + 1:] = (
                pivot * A[rank + 1:, c + 1:] - np.outer(A[rank + 1:, c], A[rank, c + 1:])
            ) // prev
        A[rank + 1:, c] = 0
        prev = pivot
        rank += 1
    return rank


def _residue_array(M, modulus: int) -> np.ndarray:
    rows, cols = _shape(M)
    if modulus < INT64_PRIME_LIMIT:
        A = np.empty((rows, cols), dtype=np.int64)
    else:
        A = np.empty((rows, cols), dtype=object)
    for i, row in enumerate(M):
        A[i, :] = [reduce_mod(v, modulus) if isinstance(v, Fraction) else int(v) % modulus for v in row]
    return A


def rref_mod_p(M, modulus: int) -> Tuple[np.ndarray, List[int]]:
    """
    Reduced row echelon form modulo a prime.

    Args:
        M: Matrix with integer (or p-integral rational) entries, or an int64/object array
        modulus: Prime

    Returns:
        (R, pivot columns); R has the pivot rows first
    """
    if isinstance(M, np.ndarray) and M.dtype == np.int64 and modulus < INT64_PRIME_LIMIT:
        A = M % modulus
    else:
        A = _residue_array(M, modulus)
    rows, cols = A.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        inv = pow(int(A[r, c]), -1, modulus)
        A[r] = (A[r] * inv) % modulus
        col = A[:, c].copy()
        col[r] = 0
        others = np.nonzero(col)[0]
        if others.size:
            A[others] = (A[others] - np.outer(col[others], A[r])) % modulus
        pivots.append(c)
        r += 1
    return A, pivots


def rank_mod_p(M, modulus: int) -> int:
    if len(M) == 0:
        return 0
    return len(rref_mod_p(M, modulus)[1])


def kernel_mod_p(M, modulus: int) -> List[List[int]]:
    """Basis of the right kernel modulo a prime, one vector per free column."""
    rows, cols = (M.shape if isinstance(M, np.ndarray) else _shape(M))
    if rows == 0:
        return [[int(i == j) for i in range(cols)] for j in range(cols)]
    R, pivots = rref_mod_p(M, modulus)
    pivot_set = set(pivots)
    basis = []
    for f in range(cols):
        if f in pivot_set:
            continue
        v = [0] * cols
        v[f] = 1
        for r, pc in enumerate(pivots):
            v[pc] = int(-R[r, f]) % modulus
        basis.append(v)
    return basis


def modular_ranks(M, primes: Sequence[int]) -> Dict[int, int]:
    return {p: rank_mod_p(M, p) for p in primes}


def exact_rank(M: Sequence[Sequence[Scalar]], primes: Sequence[int] = ()) -> int:
    """
    Rank over Q.

    With ``primes``, the modular ranks are computed first: they must agree, and if
    they already equal min(rows, cols) the rank is certified without exact
    elimination (modular rank never exceeds rational rank).
    """
    rows, cols = _shape(M)
    if primes:
        ranks = modular_ranks(M, primes)
        if len(set(ranks.values())) != 1:
            raise ModularRankMismatch(ranks)
        r = next(iter(ranks.values()))
        if r == min(rows, cols):
            return r
        exact = bareiss_rank(M)
        if exact != r:
            logger.info(f"[Linalg] modular rank {r} below exact rank {exact} (unlucky primes)")
        return exact
    return bareiss_rank(M)


def rref(M: Sequence[Sequence[Scalar]]) -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form over Q with Fraction entries."""
    rows, cols = _shape(M)
    A = [[Fraction(v) for v in row] for row in M]
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pivot_row = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if pivot_row is None:
            continue
        A[r], A[pivot_row] = A[pivot_row], A[r]
        inv = 1 / A[r][c]
        A[r] = [v * inv for v in A[r]]
        for i in range(rows):
            if i != r and A[i][c] != 0:
                factor = A[i][c]
                A[i] = [a - factor * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return A, pivots


def nullspace(M: Sequence[Sequence[Scalar]], cols: Optional[int] = None) -> List[List[Fraction]]:
    """Basis of the right kernel over Q; each vector has a 1 at its free column."""
    if len(M) == 0:
        n = cols or 0
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    R, pivots = rref(M)
    n = len(M[0])
    pivot_set = set(pivots)
    basis = []
    for f in range(n):
        if f in pivot_set:
            continue
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -R[r][f]
        basis.append(v)
    return basis


def left_kernel(M: Sequence[Sequence[Scalar]]) -> List[List[Fraction]]:
    """Row vectors c with c·M = 0."""
    return nullspace(transpose(M), cols=len(M))


def left_kernel_mod_p(M, modulus: int) -> List[List[int]]:
    rows = len(M)
    if rows and len(M[0]) == 0:
        return [[int(i == j) for i in range(rows)] for j in range(rows)]
    T = M.T if isinstance(M, np.ndarray) else transpose(M)
    return kernel_mod_p(T, modulus)


def solve(M: Sequence[Sequence[Scalar]], b: Sequence[Scalar]) -> Optional[List[Fraction]]:
    """One solution x of M x = b over Q, or None when the system is inconsistent."""
    rows, cols = _shape(M)
    augmented = [list(M[i]) + [b[i]] for i in range(rows)]
    R, pivots = rref(augmented)
    if cols in pivots:
        return None
    x = [Fraction(0)] * cols
    for r, pc in enumerate(pivots):
        x[pc] = R[r][cols]
    return x
