"""
Randomized interpolation of invariant equations.

1. ``build_basis``: draw random standard quintuples (symmetrized as requested) until
   their evaluations at dim-many generic points reach full rank.
2. ``kernel_on_variety``: evaluate the basis at points of the r-th secant variety; the
   left kernel of that matrix is the space of basis combinations vanishing there.
3. ``quotient_by_products``: discount kernel vectors lying in the span of a known
   equation times cofactor invariants.

Matrices are filled entry by entry (independent pure tasks), optionally resuming
from a checkpoint directory. A finished basis is cached there as JSON and re-verified
before it is reused.
"""
import logging
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt
from tqdm import tqdm

from app.core.artifact_storage import write_artifact
from app.core.characters import dimension_for
from app.core.checkpoint_db import CheckpointStore
from app.core.config import settings
from app.core.contraction import contract_array
from app.core.exceptions import (
    BasisSearchError,
    EvaluationBudgetExceeded,
    InputValidationError,
    ModularRankMismatch,
    VerificationFailed,
)
from app.core.f6_kit import construct_f6
from app.core.invariants import InvariantSpec, evaluate_invariant, symmetrization_weights
from app.core.linalg import exact_rank, left_kernel, left_kernel_mod_p, rank_mod_p, solve, transpose
from app.core.parallel import parallel_map, resolve_threads
from app.core.permutations import FactorPermutation
from app.core.polynomial import SparsePolynomial
from app.core.rationals import format_rational, parse_rational, reduce_mod
from app.core.seeds import derive_rng, random_prime, random_primes
from app.core.tableaux import random_quintuple
from app.core.tensor import DenseTensor, apply_perm, permute_array, sample_generic, sample_secant
from app.models.schemas import BasisCacheFile, parse_document

logger = logging.getLogger(__name__)

FACTORS = 5
SYMMETRIZATION_FOR = {"full": "none", "sym": "sum", "sgn": "signed"}
TWISTED_SYMMETRY = {"full": "full", "sym": "sgn", "sgn": "sym"}

# (kernel dimension, generators beyond f6-multiples) at secant rank 5. Degrees 8 to 14
# add nothing new; degree 16 adds one symmetric generator and no skew one.
KNOWN_OUTCOMES: Dict[Tuple[int, str], Tuple[int, int]] = {
    (4, "full"): (0, 0), (4, "sym"): (0, 0), (4, "sgn"): (0, 0),
    (6, "full"): (1, 0), (6, "sym"): (0, 0), (6, "sgn"): (1, 0),
    (8, "full"): (0, 0), (8, "sym"): (0, 0), (8, "sgn"): (0, 0),
    (10, "full"): (5, 0), (10, "sym"): (0, 0), (10, "sgn"): (1, 0),
    (12, "sym"): (1, 0), (12, "sgn"): (0, 0),
    (14, "sym"): (0, 0), (14, "sgn"): (4, 0),
    (16, "sym"): (3, 1), (16, "sgn"): (0, 0),
}

Entry = Union[int, Fraction]
ModulusPolicy = Union[None, str, Sequence[int]]


@dataclass
class EvaluationMatrix:
    """Entries F_i(p_j); exact values, or residues modulo ``modulus``."""

    row_ids: List[str]
    column_ids: List[str]
    entries: List[List[Entry]]
    modulus: Optional[int] = None
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.entries) != len(self.row_ids):
            raise InputValidationError("evaluation matrix: one row of entries per invariant required")
        for row in self.entries:
            if len(row) != len(self.column_ids):
                raise InputValidationError("evaluation matrix: incomplete row")

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.row_ids), len(self.column_ids)

    def rank(self) -> int:
        if not self.row_ids or not self.column_ids:
            return 0
        if self.modulus:
            return rank_mod_p(self.entries, self.modulus)
        return exact_rank(self.entries)

    def reduced(self, modulus: int) -> List[List[int]]:
        """Exact entries reduced modulo a prime."""
        if self.modulus:
            raise InputValidationError("matrix is already modular")
        return [[reduce_mod(v, modulus) for v in row] for row in self.entries]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "row_ids": list(self.row_ids),
            "column_ids": list(self.column_ids),
            "entries": [[format_rational(v) for v in row] for row in self.entries],
            "modulus": str(self.modulus) if self.modulus else None,
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EvaluationMatrix":
        modulus = int(data["modulus"]) if data.get("modulus") else None
        entries = [[parse_rational(v) for v in row] for row in data["entries"]]
        if modulus:
            entries = [[int(v) for v in row] for row in entries]
        return cls(list(data["row_ids"]), list(data["column_ids"]), entries, modulus, dict(data.get("provenance", {})))


@dataclass
class KernelCertificate:
    """Left kernel of an evaluation matrix at secant points, with its checks."""

    symmetry: str
    degree: int
    rank: int
    basis: List[List[Entry]]
    row_ids: List[str]
    column_ids: List[str]
    modulus: Optional[int] = None
    modular_ranks: Dict[int, int] = field(default_factory=dict)
    verification: Dict[str, Any] = field(default_factory=dict)
    provenance: Dict[str, Any] = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "symmetry": self.symmetry,
            "degree": self.degree,
            "dimension": self.dimension,
            "rank": self.rank,
            "basis": [[format_rational(v) for v in vec] for vec in self.basis],
            "row_ids": list(self.row_ids),
            "column_ids": list(self.column_ids),
            "modulus": str(self.modulus) if self.modulus else None,
            "modular_ranks": {str(p): r for p, r in sorted(self.modular_ranks.items())},
            "verification": self.verification,
            "provenance": self.provenance,
        }


# --- matrix filling ----------------------------------------------------------

def _entry_value(modulus: Optional[int], strategy: str, task: Tuple[InvariantSpec, DenseTensor]) -> Entry:
    spec, point = task
    return evaluate_invariant(spec, point, modulus=modulus, strategy=strategy)


def fill_matrix(specs: Sequence[InvariantSpec], points: Sequence[DenseTensor], column_ids: Sequence[str],
                modulus: Optional[int] = None, threads: Optional[int] = None, strategy: str = "auto",
                store: Optional[CheckpointStore] = None, progress: bool = False,
                provenance: Optional[Dict[str, Any]] = None) -> EvaluationMatrix:
    """
    Evaluate every spec at every point.

    Entries already present in ``store`` are reused; new entries are written back in
    chunks as they complete, so an interrupted fill resumes where it stopped.
    """
    row_ids = [s.identifier for s in specs]
    values: Dict[Tuple[int, int], Entry] = {}
    missing: List[Tuple[int, int]] = []
    for i, rid in enumerate(row_ids):
        for j, cid in enumerate(column_ids):
            cached = store.get(rid, cid) if store is not None else None
            if cached is not None:
                values[(i, j)] = cached
            else:
                missing.append((i, j))
    if store is not None and values:
        logger.info(f"[EquationSearch] {len(values)} of {len(row_ids) * len(column_ids)} entries restored from checkpoint")

    chunk = max(1, 4 * resolve_threads(threads))
    task = partial(_entry_value, modulus, strategy)
    with tqdm(total=len(missing), desc="entries", file=sys.stderr, disable=not progress) as bar:
        for start in range(0, len(missing), chunk):
            batch = missing[start:start + chunk]
            results = parallel_map(task, [(specs[i], points[j]) for i, j in batch], threads)
            for (i, j), value in zip(batch, results):
                values[(i, j)] = value
                if store is not None:
                    store.put(row_ids[i], column_ids[j], value)
            bar.update(len(batch))

    entries = [[values[(i, j)] for j in range(len(column_ids))] for i in range(len(row_ids))]
    return EvaluationMatrix(row_ids, list(column_ids), entries, modulus, dict(provenance or {}))


class _IncrementalEchelon:
    """Rows kept reduced against each other's pivots, over Q or Z/pZ."""

    def __init__(self, modulus: Optional[int] = None):
        self.modulus = modulus
        self.rows: List[Tuple[int, List[Entry]]] = []

    def _reduce(self, row: Sequence[Entry]) -> List[Entry]:
        v = [Fraction(x) for x in row] if not self.modulus else [int(x) % self.modulus for x in row]
        for pivot, b in self.rows:
            c = v[pivot]
            if c:
                v = [x - c * y for x, y in zip(v, b)]
                if self.modulus:
                    v = [x % self.modulus for x in v]
        return v

    def add(self, row: Sequence[Entry]) -> bool:
        v = self._reduce(row)
        pivot = next((k for k, x in enumerate(v) if x), None)
        if pivot is None:
            return False
        if self.modulus:
            inv = pow(v[pivot], -1, self.modulus)
            v = [x * inv % self.modulus for x in v]
        else:
            lead = v[pivot]
            v = [x / lead for x in v]
        self.rows.append((pivot, v))
        return True

    @property
    def rank(self) -> int:
        return len(self.rows)


def _store(checkpoint: Optional[str], key: str, modulus: Optional[int]) -> Optional[CheckpointStore]:
    if not checkpoint:
        return None
    return CheckpointStore(checkpoint, f"{key}:{modulus or 'exact'}", modulus)


# --- basis construction ------------------------------------------------------

def _basis_cache_path(checkpoint: Optional[str], key: str) -> Optional[Path]:
    if not checkpoint:
        return None
    return Path(checkpoint) / f"{key.replace(':', '-')}.json"


def load_cached_basis(path: Path, d: int, symmetry: str,
                      modulus: Optional[int]) -> Optional[Tuple[List[InvariantSpec], EvaluationMatrix]]:
    """
    Basis and matrix written by an earlier run, or None if there is no usable cache.

    Raises:
        VerificationFailed: the cached rows do not match the basis, or the matrix lost full rank
    """
    if not path.exists():
        return None
    try:
        doc = parse_document(path.read_bytes(), BasisCacheFile)
        basis = [spec_file.to_spec() for spec_file in doc.basis]
        matrix = EvaluationMatrix.from_dict(doc.matrix.model_dump())
    except (OSError, ValueError) as e:
        logger.warning(f"[EquationSearch] ignoring unreadable basis cache {path}: {e}")
        return None
    if doc.degree != d or doc.symmetry != symmetry or matrix.modulus != modulus:
        logger.warning(f"[EquationSearch] basis cache {path} belongs to another run, rebuilding")
        return None
    report = {"path": str(path), "degree": d, "symmetry": symmetry}
    if [s.identifier for s in basis] != matrix.row_ids:
        raise VerificationFailed("cached_basis_rows", report)
    rank = matrix.rank()
    target = dimension_for(d, symmetry)
    if rank != len(basis) or rank != target:
        report.update({"rank": rank, "basis_size": len(basis), "dimension": target})
        raise VerificationFailed("cached_basis_rank", report)
    logger.info(f"[EquationSearch] reusing cached basis {path}: rank {rank}/{target}")
    return basis, matrix


def build_basis(d: int, symmetry: str, rng: np.random.Generator, modulus: Optional[int] = None,
                threads: Optional[int] = None, strategy: str = "auto", checkpoint: Optional[str] = None,
                matrix_key: Optional[str] = None, progress: bool = False) -> Tuple[List[InvariantSpec], EvaluationMatrix]:
    """
    Independent (semi-)invariants of degree d spanning the requested isotypic part of U_d.

    Args:
        d: Even degree >= 2
        symmetry: "full" (plain quintuples), "sym" (sums over permutations) or "sgn" (signed sums)
        rng: Task generator; points and candidates are drawn from it
        modulus: Evaluate modulo this prime (full rank mod p implies full rank over Q)

    Returns:
        (basis, evaluation matrix at the dim-many generic points)

    Raises:
        BasisSearchError: CANDIDATE_FACTOR * dim candidates did not reach full rank
    """
    if d < 2 or d % 2:
        raise InputValidationError(f"basis construction needs an even degree >= 2, got {d}")
    if symmetry not in SYMMETRIZATION_FOR:
        raise InputValidationError(f"unknown symmetry {symmetry!r}, expected full, sym or sgn")
    key = matrix_key or f"basis:d{d}:{symmetry}"
    cache_path = _basis_cache_path(checkpoint, f"{key}:{modulus or 'exact'}")
    if cache_path is not None:
        cached = load_cached_basis(cache_path, d, symmetry, modulus)
        if cached is not None:
            return cached
    target = dimension_for(d, symmetry)
    m = d // 2
    symmetrization = SYMMETRIZATION_FOR[symmetry]
    points = [sample_generic(FACTORS, settings.GENERIC_HEIGHT, rng) for _ in range(target)]
    column_ids = [f"generic-{k}" for k in range(target)]
    provenance = {"kind": "basis", "degree": d, "symmetry": symmetry,
                  "height": settings.GENERIC_HEIGHT, "modulus": str(modulus) if modulus else None}
    store = _store(checkpoint, key, modulus)

    echelon = _IncrementalEchelon(modulus)
    accepted: List[InvariantSpec] = []
    rows: List[List[Entry]] = []
    seen = set()
    budget = settings.CANDIDATE_FACTOR * max(target, 1)
    tried = 0
    replaced = False
    while len(accepted) < target:
        if tried >= budget:
            raise BasisSearchError(
                f"degree {d} {symmetry}: {tried} candidates reached rank {len(accepted)} of {target}"
            )
        if not replaced and tried >= budget // 2:
            # a degenerate point set caps the rank; replace all points once and re-evaluate
            replaced = True
            logger.warning(f"[EquationSearch] rank stuck at {len(accepted)}/{target}, replacing the generic points")
            points = [sample_generic(FACTORS, settings.GENERIC_HEIGHT, rng) for _ in range(target)]
            column_ids = [f"generic-r-{k}" for k in range(target)]
            echelon = _IncrementalEchelon(modulus)
            kept = []
            for spec in accepted:
                row = fill_matrix([spec], points, column_ids, modulus, threads, strategy, store).entries[0]
                if echelon.add(row):
                    kept.append((spec, row))
            accepted = [spec for spec, _ in kept]
            rows = [row for _, row in kept]
            continue
        tried += 1
        spec = InvariantSpec.single(random_quintuple(m, rng), symmetrization)
        if spec.identifier in seen:
            logger.debug(f"[EquationSearch] candidate {tried} repeats an earlier quintuple, discarded")
            continue
        seen.add(spec.identifier)
        row = fill_matrix([spec], points, column_ids, modulus, threads, strategy, store).entries[0]
        if echelon.add(row):
            accepted.append(spec)
            rows.append(row)
            logger.info(f"[EquationSearch] accepted candidate {tried}: rank {echelon.rank}/{target} (d={d}, {symmetry})")
        else:
            logger.debug(f"[EquationSearch] candidate {tried} does not raise the rank, discarded")
    provenance["candidates_tried"] = tried
    matrix = EvaluationMatrix([s.identifier for s in accepted], column_ids, rows, modulus, provenance)
    if cache_path is not None:
        write_artifact(str(cache_path), {"degree": d, "symmetry": symmetry,
                                         "basis": [s.to_dict() for s in accepted], "matrix": matrix.to_dict()})
    return accepted, matrix


# --- kernels at secant points --------------------------------------------------

def _degree_of(basis: Sequence[InvariantSpec]) -> int:
    degrees = {s.degree for s in basis}
    if len(degrees) != 1:
        raise InputValidationError(f"basis must be homogeneous, got degrees {sorted(degrees)}")
    return degrees.pop()


def _symmetry_of(basis: Sequence[InvariantSpec]) -> str:
    inverse = {v: k for k, v in SYMMETRIZATION_FOR.items()}
    kinds = {inverse[s.symmetrization] for s in basis}
    return kinds.pop() if len(kinds) == 1 else "full"


def resolve_primes(policy: ModulusPolicy, degree: int, rng: np.random.Generator) -> Optional[List[int]]:
    """None for exact arithmetic, else the primes to work modulo (first one carries the kernel)."""
    if policy is None or policy == "exact":
        return None
    if policy == "auto":
        if degree <= settings.AUTO_EXACT_MAX_DEGREE:
            return None
        return random_primes(rng, 2)
    primes = [int(p) for p in policy]
    if not primes:
        raise InputValidationError("empty prime list")
    return primes


def check_rank_modulo(matrix: EvaluationMatrix, rank: int, primes: Sequence[int]) -> Dict[int, int]:
    """Ranks of an exact matrix modulo each prime; every one must equal ``rank``."""
    ranks = {p: rank_mod_p(matrix.reduced(p), p) for p in primes}
    if any(v != rank for v in ranks.values()):
        logger.warning(f"[EquationSearch] modular ranks {ranks} differ from exact rank {rank}")
        raise ModularRankMismatch(ranks)
    return ranks


def _confirmed_rank(matrix: EvaluationMatrix, rng: np.random.Generator) -> Tuple[int, Dict[int, int]]:
    rank = exact_rank(matrix.entries)
    for attempt in Retrying(stop=stop_after_attempt(settings.MODULAR_RETRY_ATTEMPTS),
                            retry=retry_if_exception_type(ModularRankMismatch), reraise=True):
        with attempt:
            ranks = check_rank_modulo(matrix, rank, random_primes(rng, settings.MODULAR_CHECK_PRIMES))
    return rank, ranks


def _secant_points(r: int, count: int, rng: np.random.Generator, height: Optional[int]) -> List[DenseTensor]:
    return [sample_secant(r, FACTORS, height, rng) for _ in range(count)]


def kernel_on_variety(basis: Sequence[InvariantSpec], r: int, num_points: int, rng: np.random.Generator,
                      modulus: ModulusPolicy = "auto", threads: Optional[int] = None, strategy: str = "auto",
                      height: Optional[int] = None, checkpoint: Optional[str] = None,
                      matrix_key: Optional[str] = None, verify: bool = True,
                      progress: bool = False) -> KernelCertificate:
    """
    Combinations of ``basis`` vanishing at ``num_points`` random points of the r-th secant variety.

    Exact runs confirm the rank modulo MODULAR_CHECK_PRIMES random primes. Modular runs
    evaluate modulo every prime of the policy; disagreeing ranks are retried with
    fresh primes and finally escalated to exact arithmetic. The kernel is then
    re-checked at FRESH_POINTS new secant points and at a generic tensor.

    Raises:
        VerificationFailed: a kernel vector failed the re-check
        ModularRankMismatch: an exact rank kept disagreeing with its check primes
    """
    if num_points < len(basis):
        raise InputValidationError(f"need at least {len(basis)} points, got {num_points}")
    if r < 1:
        raise InputValidationError(f"secant rank must be at least 1, got {r}")
    degree = _degree_of(basis) if basis else 0
    symmetry = _symmetry_of(basis) if basis else "full"
    points = _secant_points(r, num_points, rng, height)
    column_ids = [f"secant-r{r}-{k}" for k in range(num_points)]
    key = matrix_key or f"kernel:d{degree}:{symmetry}:r{r}"
    provenance = {"kind": "kernel", "degree": degree, "symmetry": symmetry, "rank": r,
                  "points": num_points, "height": settings.SECANT_HEIGHT if height is None else height}
    primes = resolve_primes(modulus, degree, rng)

    def _exact() -> KernelCertificate:
        matrix = fill_matrix(basis, points, column_ids, None, threads, strategy,
                             _store(checkpoint, key, None), progress, provenance)
        rank, ranks = _confirmed_rank(matrix, rng) if basis else (0, {})
        kernel = left_kernel(matrix.entries) if basis else []
        return KernelCertificate(symmetry, degree, rank, kernel, matrix.row_ids, column_ids,
                                 None, ranks, provenance=provenance)

    def _modular(chosen: List[int]) -> KernelCertificate:
        matrices = {
            p: fill_matrix(basis, points, column_ids, p, threads, strategy, _store(checkpoint, key, p), progress, provenance)
            for p in chosen
        }
        ranks = {p: m.rank() for p, m in matrices.items()}
        if len(set(ranks.values())) > 1:
            logger.warning(f"[EquationSearch] modular ranks disagree: {ranks}")
            raise ModularRankMismatch(ranks)
        p0 = chosen[0]
        kernel = left_kernel_mod_p(matrices[p0].entries, p0) if basis else []
        return KernelCertificate(symmetry, degree, ranks[p0], kernel, matrices[p0].row_ids, column_ids,
                                 p0, ranks, provenance=provenance)

    if primes is None:
        cert = _exact()
    else:
        try:
            for attempt in Retrying(stop=stop_after_attempt(settings.MODULAR_RETRY_ATTEMPTS),
                                    retry=retry_if_exception_type(ModularRankMismatch), reraise=True):
                with attempt:
                    number = attempt.retry_state.attempt_number
                    chosen = primes if number == 1 else random_primes(rng, len(primes))
                    if number > 1:
                        logger.warning(f"[EquationSearch] retry {number} with fresh primes {chosen}")
                    cert = _modular(chosen)
        except ModularRankMismatch:
            logger.warning("[EquationSearch] modular ranks kept disagreeing, escalating to exact arithmetic")
            cert = _exact()

    logger.info(f"[EquationSearch] d={degree} {symmetry} r={r}: rank {cert.rank}, kernel dimension {cert.dimension}")
    if verify and cert.basis:
        cert.verification = verify_certificate(cert, basis, r, rng, threads=threads, strategy=strategy, height=height)
        if not cert.verification["pass"]:
            raise VerificationFailed("kernel_verification", cert.to_dict())
    return cert


def _combine(vector: Sequence[Entry], column: Sequence[Entry], modulus: Optional[int]) -> Entry:
    total = sum((a * b for a, b in zip(vector, column)), 0 if modulus else Fraction(0))
    return total % modulus if modulus else total


def verify_certificate(cert: KernelCertificate, basis: Sequence[InvariantSpec], r: int,
                       rng: np.random.Generator, fresh_points: Optional[int] = None,
                       generic_attempts: int = 3, threads: Optional[int] = None,
                       strategy: str = "auto", height: Optional[int] = None) -> Dict[str, Any]:
    """
    Re-check a kernel: every vector must vanish at fresh secant points and be nonzero
    at some generic tensor (so no vector is the zero polynomial).
    """
    if [s.identifier for s in basis] != list(cert.row_ids):
        raise InputValidationError("certificate rows do not match the given basis")
    fresh_points = settings.FRESH_POINTS if fresh_points is None else fresh_points
    modulus = cert.modulus
    points = _secant_points(r, fresh_points, rng, height)
    fresh = fill_matrix(basis, points, [f"fresh-{k}" for k in range(fresh_points)], modulus, threads, strategy)
    columns = transpose(fresh.entries)
    vanishing_failures = [
        {"vector": v, "point": j}
        for v, vec in enumerate(cert.basis)
        for j, col in enumerate(columns)
        if _combine(vec, col, modulus) != 0
    ]
    pending = set(range(len(cert.basis)))
    witnesses: Dict[int, str] = {}
    for attempt in range(generic_attempts):
        if not pending:
            break
        generic = fill_matrix(basis, [sample_generic(FACTORS, settings.SECANT_HEIGHT, rng)], [f"generic-{attempt}"],
                              modulus, threads, strategy)
        col = [row[0] for row in generic.entries]
        for v in sorted(pending):
            value = _combine(cert.basis[v], col, modulus)
            if value != 0:
                witnesses[v] = format_rational(value)
                pending.discard(v)
    result = {
        "pass": not vanishing_failures and not pending,
        "fresh_points": fresh_points,
        "vanishing_failures": vanishing_failures[:5],
        "generic_witnesses": {str(k): v for k, v in sorted(witnesses.items())},
        "identically_zero_vectors": sorted(pending),
    }
    logger.info(f"[EquationSearch] certificate verification: {'pass' if result['pass'] else 'FAIL'}")
    return result


# --- quotient by products of known equations ---------------------------------------

@dataclass
class QuotientResult:
    status: str  # "ok" or "indeterminate"
    new_generators: Optional[int]
    representatives: List[int]
    trials: List[Dict[str, int]]
    cofactor_ids: List[str]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": self.status,
            "new_generators": self.new_generators,
            "representatives": self.representatives,
            "trials": self.trials,
            "cofactor_ids": self.cofactor_ids,
        }


def _rank(rows: List[List[Entry]], modulus: Optional[int]) -> int:
    if not rows or not rows[0]:
        return 0
    return rank_mod_p(rows, modulus) if modulus else exact_rank(rows)


def quotient_by_products(kernel: KernelCertificate, basis: Sequence[InvariantSpec], known: SparsePolynomial,
                         rng: np.random.Generator, cofactor_degree: Optional[int] = None,
                         cofactor_symmetry: Optional[str] = None, threads: Optional[int] = None,
                         strategy: str = "auto") -> QuotientResult:
    """
    Number of kernel directions outside span{known * c : c in cofactor basis}.

    The cofactors are a basis of U_{d - deg(known)} whose symmetry makes the products
    land in the kernel's isotypic part (known is taken to be skew, as f6 is); degree 0
    uses the constant 1. Kernel and products are evaluated jointly at
    dim(kernel) + #cofactors + POINT_MARGIN generic points, twice on disjoint point
    sets; disagreeing counts give status "indeterminate".
    """
    modulus = kernel.modulus
    if kernel.dimension == 0:
        return QuotientResult("ok", 0, [], [], [])
    d = kernel.degree
    cofactor_degree = d - known.degree if cofactor_degree is None else cofactor_degree
    cofactor_symmetry = cofactor_symmetry or TWISTED_SYMMETRY[kernel.symmetry]
    if cofactor_degree < 0 or cofactor_degree % 2:
        cofactors: List[InvariantSpec] = []
    elif cofactor_degree == 0:
        cofactors = []
    else:
        cofactors, _ = build_basis(cofactor_degree, cofactor_symmetry, rng, modulus, threads, strategy)
    constant_cofactor = cofactor_degree == 0
    n_products = 1 if constant_cofactor else len(cofactors)
    num_points = kernel.dimension + n_products + settings.POINT_MARGIN

    trials = []
    counts = []
    representatives: List[int] = []
    for trial in range(2):
        points = [sample_generic(FACTORS, settings.SECANT_HEIGHT, rng) for _ in range(num_points)]
        ids = [f"quotient-{trial}-{k}" for k in range(num_points)]
        values = fill_matrix(basis, points, ids, modulus, threads, strategy).entries
        columns = transpose(values)
        K = [[_combine(vec, col, modulus) for col in columns] for vec in kernel.basis]
        known_values = [known.evaluate(p, modulus) for p in points]
        if constant_cofactor:
            P = [list(known_values)]
        elif cofactors:
            cof = fill_matrix(cofactors, points, ids, modulus, threads, strategy).entries
            P = [[_mul(a, b, modulus) for a, b in zip(known_values, row)] for row in cof]
        else:
            P = []
        rank_p = _rank(P, modulus)
        rank_k = _rank(K, modulus)
        rank_kp = _rank(P + K, modulus)
        count = rank_kp - rank_p
        trials.append({"rank_kernel": rank_k, "rank_products": rank_p, "rank_joint": rank_kp, "new": count})
        counts.append(count)
        if trial == 0:
            current = list(P)
            for v, row in enumerate(K):
                if _rank(current + [row], modulus) > _rank(current, modulus):
                    current.append(row)
                    representatives.append(v)
    status = "ok" if counts[0] == counts[1] else "indeterminate"
    if status != "ok":
        logger.warning(f"[EquationSearch] quotient counts differ across point sets: {counts}")
    result = QuotientResult(status, counts[0] if status == "ok" else None, representatives, trials,
                            [c.identifier for c in cofactors])
    logger.info(f"[EquationSearch] quotient d={d}: {result.new_generators} new generator(s), status {status}")
    return result


def _mul(a: Entry, b: Entry, modulus: Optional[int]) -> Entry:
    return a * b % modulus if modulus else a * b


# --- character oracle ------------------------------------------------------------

def action_trace_on_basis(basis: Sequence[InvariantSpec], sigma: FactorPermutation,
                          points: Sequence[DenseTensor], threads: Optional[int] = None) -> Fraction:
    """
    Trace of the factor permutation sigma on span(basis), read off from evaluations.

    With E[i][j] = F_i(p_j) and E_s[i][j] = F_i(sigma^-1 p_j), the matrix R of the action
    satisfies E_s = R E; the rows of R are solved exactly and their diagonal summed.
    """
    if len(points) < len(basis):
        raise InputValidationError("need at least as many points as basis elements")
    ids = [f"trace-{k}" for k in range(len(points))]
    E = fill_matrix(basis, points, ids, None, threads).entries
    moved = [apply_perm(p, sigma.inverse()) for p in points]
    E_s = fill_matrix(basis, moved, ids, None, threads).entries
    ET = transpose(E)
    trace = Fraction(0)
    for i, row in enumerate(E_s):
        coefficients = solve(ET, row)
        if coefficients is None:
            raise ArithmeticError("span(basis) is not closed under the permutation at these points")
        trace += coefficients[i]
    return trace


# --- degree-16 smoke evaluation ----------------------------------------------------

def smoke_symmetrized_evaluation(degree: int = 16, seed: Optional[int] = None,
                                 budget_seconds: Optional[float] = None, strategy: str = "eliminate") -> Dict[str, Any]:
    """
    One permutation-summed evaluation of a random degree-``degree`` quintuple modulo a
    60-bit prime, aborted once it runs past the time budget.

    Raises:
        EvaluationBudgetExceeded: the budget ran out, checked inside every permutation term
    """
    seed = settings.DEFAULT_SEED if seed is None else seed
    budget = settings.SMOKE_TIME_BUDGET_SECONDS if budget_seconds is None else budget_seconds
    rng = derive_rng(seed, "smoke", degree)
    prime = random_prime(rng, settings.PRIME_BITS)
    spec = InvariantSpec.single(random_quintuple(degree // 2, rng), "sum")
    point = sample_secant(5, FACTORS, None, rng)
    array = point.residue_array(prime)
    columns = spec.terms[0][1].columns
    started = time.monotonic()
    deadline = started + budget
    total = 0
    for k, (sigma, weight) in enumerate(symmetrization_weights(spec)):
        try:
            value = contract_array(columns, permute_array(array, sigma.inverse()), prime, strategy, deadline)
        except EvaluationBudgetExceeded:
            raise EvaluationBudgetExceeded(
                f"degree {degree} smoke evaluation exceeded {budget}s during term {k + 1} of 120"
            )
        total = (total + weight * value) % prime
    elapsed = time.monotonic() - started
    logger.info(f"[EquationSearch] degree {degree} smoke evaluation finished in {elapsed:.1f}s")
    return {"degree": degree, "prime": str(prime), "value": str(total), "seconds": round(elapsed, 3),
            "quintuple": str(spec.terms[0][1]), "strategy": strategy}


# --- orchestration ---------------------------------------------------------------

def known_outcome(degree: int, symmetry: str, r: int, kernel_dimension: int,
                  new_generators: Optional[int]) -> Optional[Dict[str, Any]]:
    """Expected rank-5 result for a tabulated (degree, symmetry), compared with a run; None otherwise."""
    expected = KNOWN_OUTCOMES.get((degree, symmetry)) if r == FACTORS else None
    if expected is None:
        return None
    kernel_expected, new_expected = expected
    matches = kernel_dimension == kernel_expected and new_generators in (None, new_expected)
    if not matches:
        logger.warning(f"[EquationSearch] d={degree} {symmetry}: kernel {kernel_dimension}, new generators "
                       f"{new_generators}; expected {kernel_expected} and {new_expected}")
    return {"kernel_dimension": kernel_expected, "new_generators": new_expected, "matches": matches}


def run_search(degree: int, symmetry: str, r: int, seed: int, num_points: Optional[int] = None,
               modulus: ModulusPolicy = "auto", extended: bool = False, quotient: bool = True,
               threads: Optional[int] = None, checkpoint: Optional[str] = None,
               progress: bool = False) -> Dict[str, Any]:
    """
    Basis, secant kernel and (optionally) quotient by f6-multiples for one degree.

    Every stage draws from its own generator derived from ``seed``, so a rerun with the
    same arguments (and any thread count) reproduces the same report.
    """
    if degree >= settings.EXTENDED_MIN_DEGREE and not extended:
        raise InputValidationError(
            f"degree {degree} is an extended run (>= {settings.EXTENDED_MIN_DEGREE}); pass --extended"
        )
    primes = resolve_primes(modulus, degree, derive_rng(seed, "primes", degree))
    basis_modulus = primes[0] if primes else None
    prefix = f"s{seed}:d{degree}:{symmetry}"
    basis, matrix = build_basis(degree, symmetry, derive_rng(seed, "basis", degree, symmetry), basis_modulus,
                                threads, checkpoint=checkpoint, matrix_key=f"basis:{prefix}", progress=progress)
    num_points = len(basis) + settings.POINT_MARGIN if num_points is None else num_points

    if basis:
        kernel = kernel_on_variety(basis, r, num_points, derive_rng(seed, "kernel", degree, symmetry, r),
                                   primes if primes else "exact", threads, checkpoint=checkpoint,
                                   matrix_key=f"kernel:{prefix}:r{r}", progress=progress)
    else:
        kernel = KernelCertificate(symmetry, degree, 0, [], [], [], basis_modulus)

    report: Dict[str, Any] = {
        "degree": degree,
        "symmetry": symmetry,
        "secant_rank": r,
        "points": num_points,
        "primes": [str(p) for p in primes] if primes else [],
        "basis": [s.to_dict() for s in basis],
        "basis_ids": [s.identifier for s in basis],
        "basis_matrix": matrix.to_dict(),
        "kernel": kernel.to_dict(),
    }
    if quotient:
        result = quotient_by_products(kernel, basis, construct_f6(), derive_rng(seed, "quotient", degree, symmetry),
                                      threads=threads)
        report["quotient"] = result.to_dict()
    outcome = known_outcome(degree, symmetry, r, kernel.dimension, report.get("quotient", {}).get("new_generators"))
    if outcome is not None:
        report["known_outcome"] = outcome
    return report
