"""
Bracket contraction: the value of a tableau quintuple at a tensor.

For factor i and each column (a, b) of tableau i, a bracket pairs copies a and b
of the tensor:

    Q(A) = sum over bits b[i][j] of  prod_{i,(a,b)} eps(b[i][a], b[i][b]) * prod_j A[b[0][j], ..., b[n-1][j]]

with eps(0,1) = 1, eps(1,0) = -1 and eps = 0 on equal bits. Columns may be given
oriented (top entry first, not necessarily smaller), which is how bracket
antisymmetry is exercised.

Two strategies compute the same number:
  * ``enumerate``: every column independently picks one of its two nonzero
    patterns; the last three factors are vectorized, the rest looped.
  * ``eliminate``: each column becomes one edge variable shared by its two copies
    (the bracket sign is absorbed into the top copy), and copies are eliminated in
    greedy min-fill order, merging tensors with ``numpy.tensordot``.
"""
import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from app.core.config import settings
from app.core.exceptions import EvaluationBudgetExceeded, InputValidationError
from app.core.tableaux import TableauQuintuple
from app.core.tensor import DenseTensor

logger = logging.getLogger(__name__)

OrientedColumns = Tuple[Tuple[Tuple[int, int], ...], ...]
STRATEGIES = ("auto", "enumerate", "eliminate")


def _normalize_columns(columns: Sequence[Sequence[Sequence[int]]]) -> OrientedColumns:
    cols = tuple(tuple((int(a), int(b)) for a, b in factor) for factor in columns)
    if not cols:
        raise InputValidationError("no columns given")
    m = len(cols[0])
    for i, factor in enumerate(cols):
        entries = sorted(x for col in factor for x in col)
        if entries != list(range(1, 2 * m + 1)):
            raise InputValidationError(f"factor {i}: columns must use each of 1..{2 * m} exactly once")
    return cols


def _reduce(value, modulus: Optional[int]):
    return value % modulus if modulus else value


# --- orientation enumeration -------------------------------------------------

@lru_cache(maxsize=None)
def _check_deadline(deadline: Optional[float]):
    if deadline is not None and time.monotonic() >= deadline:
        raise EvaluationBudgetExceeded("contraction ran past its deadline")


def _orientation_table(factor_columns: Tuple[Tuple[int, int], ...], n: int, factor: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Flat-index offsets and signs for all 2^m orientations of one factor.

    Orientation bit 0 sets (top, bottom) bits to (0, 1) with sign +1, bit 1 to (1, 0)
    with sign -1.
    """
    m = len(factor_columns)
    shift = n - 1 - factor
    offsets = np.zeros((1 << m, 2 * m), dtype=np.int64)
    signs = np.ones(1 << m, dtype=np.int64)
    for o in range(1 << m):
        for k, (a, b) in enumerate(factor_columns):
            if (o >> k) & 1:
                offsets[o, a - 1] = 1 << shift
                signs[o] = -signs[o]
            else:
                offsets[o, b - 1] = 1 << shift
    return offsets, signs


def _contract_by_enumeration(columns: OrientedColumns, array: np.ndarray, modulus: Optional[int],
                             deadline: Optional[float] = None):
    n = len(columns)
    m = len(columns[0])
    flat = array.reshape(-1)
    tables = [_orientation_table(columns[i], n, i) for i in range(n)]
    looped = max(0, n - 3)

    inner_offsets = np.zeros((1,) * (n - looped) + (2 * m,), dtype=np.int64)
    inner_signs = np.ones((1,) * (n - looped), dtype=np.int64)
    for axis, (offsets, signs) in enumerate(tables[looped:]):
        shape = [1] * (n - looped)
        shape[axis] = 1 << m
        inner_offsets = inner_offsets + offsets.reshape(tuple(shape) + (2 * m,))
        inner_signs = inner_signs * signs.reshape(shape)
    inner_offsets = inner_offsets.reshape(-1, 2 * m)
    positive = inner_signs.reshape(-1) > 0

    total = 0
    for combo in product(range(1 << m), repeat=looped):
        _check_deadline(deadline)
        base = np.zeros(2 * m, dtype=np.int64)
        sign = 1
        for i, o in enumerate(combo):
            offsets, signs = tables[i]
            base = base + offsets[o]
            sign *= int(signs[o])
        values = flat[inner_offsets + base]
        prods = values[:, 0]
        for j in range(1, 2 * m):
            prods = _reduce(prods * values[:, j], modulus)
        term = prods[positive].sum() - prods[~positive].sum()
        total = _reduce(total + sign * term, modulus)
    return total


# --- variable elimination ----------------------------------------------------

@dataclass(frozen=True)
class _CopyPlan:
    legs: Tuple[int, ...]  # edge id per factor
    top_factors: Tuple[int, ...]  # factors where this copy is the top of its column


@dataclass(frozen=True)
class EliminationPlan:
    order: Tuple[int, ...]
    copies: Tuple[_CopyPlan, ...]


def min_fill_order(graph: nx.Graph) -> List[int]:
    """Greedy min-fill elimination order; ties go to the lowest vertex."""
    g = graph.copy()
    order = []
    while g.number_of_nodes():
        best, best_fill = None, None
        for v in sorted(g.nodes):
            nbrs = list(g.neighbors(v))
            fill = sum(
                1 for x in range(len(nbrs)) for y in range(x + 1, len(nbrs))
                if not g.has_edge(nbrs[x], nbrs[y])
            )
            if best_fill is None or fill < best_fill:
                best, best_fill = v, fill
        nbrs = list(g.neighbors(best))
        for x in range(len(nbrs)):
            for y in range(x + 1, len(nbrs)):
                g.add_edge(nbrs[x], nbrs[y])
        g.remove_node(best)
        order.append(best)
    return order


@lru_cache(maxsize=4096)
def elimination_plan(columns: OrientedColumns) -> EliminationPlan:
    n = len(columns)
    copies = 2 * len(columns[0])
    legs = [[0] * n for _ in range(copies)]
    tops: List[List[int]] = [[] for _ in range(copies)]
    graph = nx.Graph()
    graph.add_nodes_from(range(copies))
    edge = 0
    for i, factor in enumerate(columns):
        for a, b in factor:
            legs[a - 1][i] = edge
            legs[b - 1][i] = edge
            tops[a - 1].append(i)
            graph.add_edge(a - 1, b - 1)
            edge += 1
    order = tuple(min_fill_order(graph))
    plan = EliminationPlan(
        order=order,
        copies=tuple(_CopyPlan(tuple(legs[j]), tuple(tops[j])) for j in range(copies)),
    )
    logger.debug(f"[Contraction] elimination order {order}")
    return plan


def _copy_tensor(array: np.ndarray, top_factors: Sequence[int], modulus: Optional[int]) -> np.ndarray:
    """Absorb eps into the top copy: T'[y=0] = -T[x=1], T'[y=1] = T[x=0] on each such leg."""
    out = array
    for i in top_factors:
        out = np.stack([-out.take(1, axis=i), out.take(0, axis=i)], axis=i)
    return _reduce(out, modulus)


@dataclass
class _Group:
    tensor: np.ndarray
    labels: List[int]


def _merge(g: _Group, h: _Group, modulus: Optional[int]) -> _Group:
    shared = [l for l in g.labels if l in h.labels]
    axes_g = [g.labels.index(l) for l in shared]
    axes_h = [h.labels.index(l) for l in shared]
    tensor = np.tensordot(g.tensor, h.tensor, axes=(axes_g, axes_h))
    if modulus:
        tensor = tensor % modulus
    labels = [l for l in g.labels if l not in shared] + [l for l in h.labels if l not in shared]
    return _Group(np.asarray(tensor, dtype=object), labels)


def _merged_size(g: _Group, h: _Group) -> int:
    shared = len(set(g.labels) & set(h.labels))
    return len(g.labels) + len(h.labels) - 2 * shared


def _contract_by_elimination(columns: OrientedColumns, array: np.ndarray, modulus: Optional[int],
                             deadline: Optional[float] = None):
    plan = elimination_plan(columns)
    eliminated: List[_Group] = []
    for v in plan.order:
        _check_deadline(deadline)
        copy = plan.copies[v]
        group = _Group(_copy_tensor(array, copy.top_factors, modulus), list(copy.legs))
        adjacent = [g for g in eliminated if set(g.labels) & set(group.labels)]
        eliminated = [g for g in eliminated if not (set(g.labels) & set(group.labels))]
        while adjacent:
            _check_deadline(deadline)
            adjacent.sort(key=lambda h: _merged_size(group, h))
            group = _merge(group, adjacent.pop(0), modulus)
        eliminated.append(group)
    total = 1
    for g in eliminated:
        # every edge joins two copies, so finished groups are scalars
        total = _reduce(total * g.tensor.item(), modulus)
    return total


# --- public entry points -----------------------------------------------------

def resolve_strategy(strategy: str, m: int) -> str:
    if strategy not in STRATEGIES:
        raise InputValidationError(f"unknown strategy {strategy!r}, expected one of {STRATEGIES}")
    if strategy == "auto":
        return "enumerate" if m <= settings.ENUMERATION_MAX_M else "eliminate"
    return strategy


def contract_array(columns: OrientedColumns, array: np.ndarray, modulus: Optional[int] = None,
                   strategy: str = "auto", deadline: Optional[float] = None):
    """
    Contraction on a raw object array of shape (2,)*n (entries already reduced when modular).

    Raises:
        EvaluationBudgetExceeded: ``time.monotonic()`` passed ``deadline`` mid-contraction
    """
    if array.ndim != len(columns):
        raise InputValidationError(f"columns describe {len(columns)} factors, tensor has {array.ndim}")
    chosen = resolve_strategy(strategy, len(columns[0]))
    if chosen == "enumerate":
        value = _contract_by_enumeration(columns, array, modulus, deadline)
    else:
        value = _contract_by_elimination(columns, array, modulus, deadline)
    return int(value) % modulus if modulus else value


def contract_columns(columns: Sequence[Sequence[Sequence[int]]], tensor: DenseTensor,
                     modulus: Optional[int] = None, strategy: str = "auto") -> Union[Fraction, int]:
    """
    Bracket contraction for oriented columns, one list of (top, bottom) pairs per factor.

    Returns:
        Exact Fraction, or a residue in [0, modulus) when ``modulus`` is given
    """
    cols = _normalize_columns(columns)
    if len(cols) != tensor.n:
        raise InputValidationError(f"columns describe {len(cols)} factors, tensor has {tensor.n}")
    array = tensor.residue_array(modulus) if modulus else tensor.array
    value = contract_array(cols, array, modulus, strategy)
    return value if modulus else Fraction(value)


def evaluate_quintuple(Q: TableauQuintuple, A: DenseTensor, strategy: str = "auto",
                       modulus: Optional[int] = None) -> Union[Fraction, int]:
    """Value of the invariant defined by Q at A (homogeneous of degree 2m in A)."""
    if Q.n != A.n:
        raise InputValidationError(f"quintuple has {Q.n} tableaux, tensor has {A.n} factors")
    return contract_columns(Q.columns, A, modulus=modulus, strategy=strategy)
