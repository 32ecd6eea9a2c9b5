"""
Two-row Young tableaux of shape (m, m) and quintuples of them.

A tableau is stored canonically by its columns: each column (top, bottom) has
top < bottom and columns are sorted by their top entry. Parsing an arbitrary
filling returns the canonical tableau together with the sign picked up by the
column flips, since each column contributes one antisymmetric bracket.
"""
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import List, Sequence, Tuple

import numpy as np

from app.core.exceptions import InputValidationError
from app.core.permutations import FactorPermutation

Column = Tuple[int, int]


@dataclass(frozen=True, order=True)
class TwoRowTableau:
    columns: Tuple[Column, ...]

    def __post_init__(self):
        cols = tuple((int(a), int(b)) for a, b in self.columns)
        m = len(cols)
        if m < 1:
            raise InputValidationError("tableau needs at least one column")
        entries = sorted(x for col in cols for x in col)
        if entries != list(range(1, 2 * m + 1)):
            raise InputValidationError(f"tableau entries must be exactly 1..{2 * m}, got {entries}")
        if any(a > b for a, b in cols) or list(cols) != sorted(cols):
            raise InputValidationError("tableau columns are not in canonical form; use from_rows")
        object.__setattr__(self, "columns", cols)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> Tuple["TwoRowTableau", int]:
        """
        Canonicalize a filling given as two rows.

        Returns:
            (tableau, sign) where sign is (-1)^(number of flipped columns)
        """
        if len(rows) != 2 or len(rows[0]) != len(rows[1]):
            raise InputValidationError("a tableau of shape (m,m) needs two rows of equal length")
        sign = 1
        cols = []
        for a, b in zip(rows[0], rows[1]):
            if a > b:
                a, b = b, a
                sign = -sign
            cols.append((a, b))
        return cls(tuple(sorted(cols))), sign

    @property
    def m(self) -> int:
        return len(self.columns)

    @property
    def rows(self) -> List[List[int]]:
        return [[a for a, _ in self.columns], [b for _, b in self.columns]]

    @property
    def is_standard(self) -> bool:
        bottom = self.rows[1]
        return all(x < y for x, y in zip(bottom, bottom[1:]))

    def __str__(self) -> str:
        top, bottom = self.rows
        return "".join(map(str, top)) + "/" + "".join(map(str, bottom))


@dataclass(frozen=True)
class TableauQuintuple:
    """One tableau per tensor factor (five in the standard setting)."""

    tableaux: Tuple[TwoRowTableau, ...]

    def __post_init__(self):
        tabs = tuple(self.tableaux)
        if not tabs:
            raise InputValidationError("quintuple needs at least one tableau")
        if len({t.m for t in tabs}) != 1:
            raise InputValidationError(f"tableaux must share m, got {[t.m for t in tabs]}")
        object.__setattr__(self, "tableaux", tabs)

    @classmethod
    def from_rows(cls, rows_per_tableau: Sequence[Sequence[Sequence[int]]]) -> Tuple["TableauQuintuple", int]:
        """Canonicalize every tableau; the returned sign is the product of the column-flip signs."""
        sign = 1
        tabs = []
        for rows in rows_per_tableau:
            tab, s = TwoRowTableau.from_rows(rows)
            tabs.append(tab)
            sign *= s
        return cls(tuple(tabs)), sign

    @property
    def m(self) -> int:
        return self.tableaux[0].m

    @property
    def n(self) -> int:
        return len(self.tableaux)

    @property
    def degree(self) -> int:
        return 2 * self.m

    @property
    def columns(self) -> Tuple[Tuple[Column, ...], ...]:
        return tuple(t.columns for t in self.tableaux)

    def permuted(self, sigma: FactorPermutation) -> "TableauQuintuple":
        """sigma·Q: the tableau at position i moves to position sigma(i)."""
        if sigma.n != self.n:
            raise InputValidationError(f"permutation acts on {sigma.n} factors, quintuple has {self.n}")
        return TableauQuintuple(sigma.permute_sequence(self.tableaux))

    def to_rows(self) -> List[List[List[int]]]:
        return [t.rows for t in self.tableaux]

    def __str__(self) -> str:
        return " ".join(str(t) for t in self.tableaux)


@lru_cache(maxsize=None)
def enumerate_standard(m: int) -> Tuple[TwoRowTableau, ...]:
    """
    All standard tableaux of shape (m, m) in lexicographic order of the top row.

    The count is the m-th Catalan number.
    """
    if m < 1:
        raise InputValidationError(f"m must be at least 1, got {m}")
    entries = range(1, 2 * m + 1)
    out = []
    for top in combinations(entries, m):
        bottom = [x for x in entries if x not in top]
        if all(t < b for t, b in zip(top, bottom)):
            out.append(TwoRowTableau(tuple(zip(top, bottom))))
    return tuple(out)


def random_quintuple(m: int, rng: np.random.Generator, n: int = 5) -> TableauQuintuple:
    """Independent uniform draws from the standard tableaux of shape (m, m)."""
    standard = enumerate_standard(m)
    picks = rng.integers(0, len(standard), size=n)
    return TableauQuintuple(tuple(standard[int(k)] for k in picks))


def degree6_quintuple() -> TableauQuintuple:
    """The standard quintuple 135/246, 134/256, 125/346, 124/356, 123/456."""
    quintuple, _ = TableauQuintuple.from_rows([
        [[1, 3, 5], [2, 4, 6]],
        [[1, 3, 4], [2, 5, 6]],
        [[1, 2, 5], [3, 4, 6]],
        [[1, 2, 4], [3, 5, 6]],
        [[1, 2, 3], [4, 5, 6]],
    ])
    return quintuple
