"""
Exact tensors on (k^2)^{⊗n}.

Index convention: a multi-index I = (I_0, ..., I_{n-1}) is stored at flat position
sum(I_i << (n - 1 - i)), so factor 0 is the most significant bit and the bit-string
key of I reads factor 0 first ("01101").

Permutation convention: ``apply_perm(A, sigma)[I] = A[I_sigma(0), ..., I_sigma(n-1)]``.
For a rank-1 tensor this moves the factor vector at position k to position sigma(k),
and ``apply_perm(apply_perm(A, s), t) == apply_perm(A, t.compose(s))``.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from app.core.config import settings
from app.core.exceptions import InputValidationError
from app.core.permutations import FactorPermutation
from app.core.rationals import Scalar, format_rational, parse_rational, reduce_mod, to_int_if_integral

logger = logging.getLogger(__name__)

BigRational = Fraction
MultiIndex = Tuple[int, ...]
ExactMatrix = List[List[Scalar]]


def index_to_bits(index: int, n: int) -> MultiIndex:
    return tuple((index >> (n - 1 - i)) & 1 for i in range(n))


def bits_to_index(bits: Sequence[int]) -> int:
    index = 0
    for b in bits:
        if b not in (0, 1):
            raise InputValidationError(f"multi-index bits must be 0 or 1, got {tuple(bits)}")
        index = (index << 1) | b
    return index


def bits_to_key(bits: Sequence[int]) -> str:
    return "".join(str(b) for b in bits)


def key_to_bits(key: str) -> MultiIndex:
    if not key or any(ch not in "01" for ch in key):
        raise InputValidationError(f"invalid multi-index key {key!r}")
    return tuple(int(ch) for ch in key)


@dataclass(frozen=True)
class DenseTensor:
    """2^n exact entries indexed by multi-indices; immutable."""

    n: int
    entries: Tuple[Fraction, ...]

    def __post_init__(self):
        if self.n < 1:
            raise InputValidationError(f"tensor needs at least one factor, got n={self.n}")
        if len(self.entries) != 1 << self.n:
            raise InputValidationError(
                f"tensor with n={self.n} needs {1 << self.n} entries, got {len(self.entries)}"
            )
        object.__setattr__(self, "entries", tuple(Fraction(e) for e in self.entries))

    @classmethod
    def zeros(cls, n: int) -> "DenseTensor":
        return cls(n, (Fraction(0),) * (1 << n))

    @classmethod
    def from_array(cls, array: np.ndarray) -> "DenseTensor":
        n = array.ndim
        if array.shape != (2,) * n:
            raise InputValidationError(f"tensor array must have shape (2,)*n, got {array.shape}")
        return cls(n, tuple(Fraction(v) for v in array.reshape(-1).tolist()))

    @classmethod
    def from_mapping(cls, n: int, entries: Mapping[str, object]) -> "DenseTensor":
        """Build from ``{"01101": "3/2", ...}``; missing keys are zero."""
        values = [Fraction(0)] * (1 << n)
        for key, raw in entries.items():
            bits = key_to_bits(key)
            if len(bits) != n:
                raise InputValidationError(f"key {key!r} does not have {n} bits")
            values[bits_to_index(bits)] = parse_rational(raw)
        return cls(n, tuple(values))

    def to_mapping(self) -> Dict[str, str]:
        """Nonzero entries keyed by bit-string."""
        return {
            bits_to_key(index_to_bits(k, self.n)): format_rational(v)
            for k, v in enumerate(self.entries)
            if v != 0
        }

    def __getitem__(self, bits: Sequence[int]) -> Fraction:
        if len(bits) != self.n:
            raise InputValidationError(f"expected {self.n} bits, got {len(bits)}")
        return self.entries[bits_to_index(bits)]

    def __add__(self, other: "DenseTensor") -> "DenseTensor":
        _check_same_n(self, other)
        return DenseTensor(self.n, tuple(a + b for a, b in zip(self.entries, other.entries)))

    @cached_property
    def is_integral(self) -> bool:
        return all(e.denominator == 1 for e in self.entries)

    @cached_property
    def is_zero(self) -> bool:
        return not any(self.entries)

    @cached_property
    def array(self) -> np.ndarray:
        """Read-only object array of shape (2,)*n; integral entries are plain ints."""
        arr = np.empty(1 << self.n, dtype=object)
        arr[:] = [to_int_if_integral(e) for e in self.entries]
        arr = arr.reshape((2,) * self.n)
        arr.flags.writeable = False
        return arr

    def residue_array(self, modulus: int) -> np.ndarray:
        """Entries reduced mod a prime, as an object array of shape (2,)*n."""
        if not self.is_integral:
            raise InputValidationError("modular evaluation needs a tensor with integer entries")
        arr = np.empty(1 << self.n, dtype=object)
        arr[:] = [reduce_mod(e, modulus) for e in self.entries]
        return arr.reshape((2,) * self.n)


def _check_same_n(a: DenseTensor, b: DenseTensor):
    if a.n != b.n:
        raise InputValidationError(f"factor-count mismatch: {a.n} vs {b.n}")


Matrix2 = Tuple[Tuple[Fraction, Fraction], Tuple[Fraction, Fraction]]


def _as_scalar(raw) -> Fraction:
    return raw if isinstance(raw, Fraction) else parse_rational(raw)


def _as_matrix2(raw) -> Matrix2:
    try:
        (a, b), (c, d) = raw
    except (TypeError, ValueError):
        raise InputValidationError(f"expected a 2x2 matrix, got {raw!r}")
    return ((_as_scalar(a), _as_scalar(b)), (_as_scalar(c), _as_scalar(d)))


@dataclass(frozen=True)
class Sl2Tuple:
    """One SL_2 matrix per factor."""

    matrices: Tuple[Matrix2, ...]

    def __post_init__(self):
        mats = tuple(_as_matrix2(m) for m in self.matrices)
        for k, ((a, b), (c, d)) in enumerate(mats):
            if a * d - b * c != 1:
                raise InputValidationError(f"matrix {k} has determinant {a * d - b * c}, expected 1")
        object.__setattr__(self, "matrices", mats)

    @classmethod
    def identity(cls, n: int) -> "Sl2Tuple":
        return cls(tuple(((1, 0), (0, 1)) for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.matrices)

    def compose(self, other: "Sl2Tuple") -> "Sl2Tuple":
        """Factor-wise product self[k] @ other[k]."""
        if other.n != self.n:
            raise InputValidationError(f"factor-count mismatch: {self.n} vs {other.n}")
        return Sl2Tuple(tuple(_mat_mul(x, y) for x, y in zip(self.matrices, other.matrices)))

    def permuted(self, sigma: FactorPermutation) -> "Sl2Tuple":
        """Matrix for factor k moves to factor sigma(k), matching ``apply_perm``."""
        if sigma.n != self.n:
            raise InputValidationError(f"factor-count mismatch: {self.n} vs {sigma.n}")
        return Sl2Tuple(sigma.permute_sequence(self.matrices))


def _mat_mul(x: Matrix2, y: Matrix2) -> Matrix2:
    return (
        (x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
        (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]),
    )


def _as_numpy_matrix(m: Sequence[Sequence[Scalar]]) -> np.ndarray:
    arr = np.empty((len(m), len(m[0])), dtype=object)
    for i, row in enumerate(m):
        for j, v in enumerate(row):
            arr[i, j] = to_int_if_integral(v)
    return arr


def apply_factor_maps(array: np.ndarray, maps: Sequence[np.ndarray]) -> np.ndarray:
    """Contract leg k of ``array`` with ``maps[k]`` (new leg index first)."""
    out = array
    for k, m in enumerate(maps):
        out = np.moveaxis(np.tensordot(m, out, axes=([1], [k])), 0, k)
    return out


def apply_group(A: DenseTensor, g: Sl2Tuple) -> DenseTensor:
    """Factor-wise action ``(g_0 ⊗ ... ⊗ g_{n-1}) A``."""
    if g.n != A.n:
        raise InputValidationError(f"group element has {g.n} factors, tensor has {A.n}")
    maps = [_as_numpy_matrix(m) for m in g.matrices]
    return DenseTensor.from_array(apply_factor_maps(A.array, maps))


def permute_array(array: np.ndarray, sigma: FactorPermutation) -> np.ndarray:
    return np.transpose(array, sigma.inverse().image)


def apply_perm(A: DenseTensor, sigma: FactorPermutation) -> DenseTensor:
    if sigma.n != A.n:
        raise InputValidationError(f"permutation acts on {sigma.n} factors, tensor has {A.n}")
    return DenseTensor.from_array(permute_array(A.array, sigma))


def scale(A: DenseTensor, factor: Scalar) -> DenseTensor:
    lam = Fraction(factor)
    return DenseTensor(A.n, tuple(lam * e for e in A.entries))


def flatten(A: DenseTensor, left: Iterable[int]) -> ExactMatrix:
    """
    Matrix of A viewed as a map from the complementary factors to ``left``.

    Rows are indexed by the bits of the ``left`` factors (in increasing factor
    order, first factor most significant), columns likewise by the complement.
    """
    left = sorted(set(left))
    if not left or len(left) >= A.n or left[0] < 0 or left[-1] >= A.n:
        raise InputValidationError(f"left factors must be a nonempty proper subset of 0..{A.n - 1}, got {left}")
    right = [k for k in range(A.n) if k not in left]
    mat = np.transpose(A.array, left + right).reshape(1 << len(left), 1 << len(right))
    return mat.tolist()


def bipartitions(n: int) -> List[Tuple[int, ...]]:
    """One ``left`` set per bipartition up to transpose (the smaller side, or the side holding factor 0)."""
    out = []
    for size in range(1, n // 2 + 1):
        for left in combinations(range(n), size):
            if 2 * size == n and 0 not in left:
                continue
            out.append(left)
    return out


def flattening_ranks(A: DenseTensor) -> Dict[str, int]:
    """Exact rank of every flattening, keyed like ``"01|234"``."""
    from app.core.linalg import exact_rank

    ranks = {}
    for left in bipartitions(A.n):
        right = [k for k in range(A.n) if k not in left]
        label = "".join(map(str, left)) + "|" + "".join(map(str, right))
        ranks[label] = exact_rank(flatten(A, left))
    return ranks


# --- sampling ---------------------------------------------------------------

def _nonzero_vector(height: int, rng: np.random.Generator) -> Tuple[int, int]:
    while True:
        u = rng.integers(-height, height + 1, size=2)
        if u.any():
            return int(u[0]), int(u[1])


def _rank1_array(vectors: Sequence[Tuple[int, int]]) -> np.ndarray:
    out = np.array(1, dtype=object)
    for u in vectors:
        out = np.multiply.outer(out, np.array(u, dtype=object))
    return out


def sample_rank1_factors(n: int, height: int, rng: np.random.Generator) -> List[Tuple[int, int]]:
    if height < 1:
        raise InputValidationError(f"height must be at least 1, got {height}")
    return [_nonzero_vector(height, rng) for _ in range(n)]


def sample_rank1(n: int = 5, height: Optional[int] = None, rng: Optional[np.random.Generator] = None) -> DenseTensor:
    """u_0 ⊗ ... ⊗ u_{n-1} with nonzero integer vectors in [-height, height]^2."""
    height = settings.SECANT_HEIGHT if height is None else height
    rng = rng if rng is not None else np.random.default_rng(settings.DEFAULT_SEED)
    return DenseTensor.from_array(_rank1_array(sample_rank1_factors(n, height, rng)))


def sample_secant(r: int, n: int = 5, height: Optional[int] = None,
                  rng: Optional[np.random.Generator] = None) -> DenseTensor:
    """Sum of r independent rank-1 samples; resampled in the rare case the sum is zero."""
    if r < 1:
        raise InputValidationError(f"secant rank must be at least 1, got {r}")
    height = settings.SECANT_HEIGHT if height is None else height
    rng = rng if rng is not None else np.random.default_rng(settings.DEFAULT_SEED)
    while True:
        total = np.zeros((2,) * n, dtype=object)
        for _ in range(r):
            total = total + _rank1_array(sample_rank1_factors(n, height, rng))
        if total.any():
            return DenseTensor.from_array(total)
        logger.debug("[TensorCore] secant sample summed to zero, resampling")


def sample_generic(n: int = 5, height: Optional[int] = None,
                   rng: Optional[np.random.Generator] = None) -> DenseTensor:
    """Tensor with independent uniform integer entries in [-height, height]."""
    height = settings.GENERIC_HEIGHT if height is None else height
    if height < 1:
        raise InputValidationError(f"height must be at least 1, got {height}")
    rng = rng if rng is not None else np.random.default_rng(settings.DEFAULT_SEED)
    while True:
        values = rng.integers(-height, height + 1, size=1 << n)
        if values.any():
            return DenseTensor(n, tuple(Fraction(int(v)) for v in values))


def random_sl2(rng: np.random.Generator, bound: int = 10) -> Matrix2:
    """Integer matrix of determinant 1 with entries bounded by ``bound``, a product of elementary moves."""
    while True:
        m: Matrix2 = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))
        for step in range(int(rng.integers(1, 4))):
            t = int(rng.integers(-3, 4))
            elem = ((1, t), (0, 1)) if step % 2 == 0 else ((1, 0), (t, 1))
            m = _mat_mul(m, tuple(tuple(Fraction(x) for x in row) for row in elem))
        if max(abs(x) for row in m for x in row) <= bound and m != ((1, 0), (0, 1)):
            return m


def random_sl2_tuple(n: int, rng: np.random.Generator, bound: int = 10) -> Sl2Tuple:
    return Sl2Tuple(tuple(random_sl2(rng, bound) for _ in range(n)))
