"""Integer partitions: conjugation, cell statistics, box enumeration and ordering."""

from __future__ import annotations

import math
from collections import Counter
from functools import total_ordering
from typing import Iterator, Optional, Sequence


@total_ordering
class Partition:
    """Weakly decreasing tuple of positive integers (trailing zeros dropped).

    Comparison is the reverse lexicographic order: ``lam > mu`` iff at the
    first index where they differ ``lam`` has the larger part.
    """

    __slots__ = ("parts",)

    def __init__(self, parts: Sequence[int] = ()):
        ps = tuple(int(p) for p in parts)
        if any(p < 0 for p in ps):
            raise ValueError(f"negative part in {ps}")
        if any(ps[i] < ps[i + 1] for i in range(len(ps) - 1)):
            raise ValueError(f"parts not weakly decreasing: {ps}")
        while ps and ps[-1] == 0:
            ps = ps[:-1]
        object.__setattr__(self, "parts", ps)

    def __setattr__(self, name, value):
        raise AttributeError("Partition is immutable")

    def __reduce__(self):
        return (Partition, (self.parts,))

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    def __repr__(self):
        return f"Partition({list(self.parts)})"

    def __hash__(self):
        return hash(self.parts)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.parts == other.parts

    def __lt__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return reverse_lex_compare(self, other) < 0

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    def length(self) -> int:
        return len(self.parts)

    def weight(self) -> int:
        return sum(self.parts)

    def part(self, i: int) -> int:
        """1-based part lambda_i, zero beyond the length."""
        return self.parts[i - 1] if 1 <= i <= len(self.parts) else 0

    def multiplicities(self) -> dict[int, int]:
        return dict(Counter(self.parts))

    def padded(self, K: int) -> tuple[int, ...]:
        if len(self.parts) > K:
            raise ValueError(f"{self} has more than {K} parts")
        return self.parts + (0,) * (K - len(self.parts))

    def cells(self) -> Iterator[tuple[int, int]]:
        """All cells (i, j), 1-based, row by row."""
        for i, p in enumerate(self.parts, start=1):
            for j in range(1, p + 1):
                yield i, j

    def conjugate(self) -> "Partition":
        return conjugate(self)

    def to_json(self) -> list[int]:
        return list(self.parts)

    @classmethod
    def from_json(cls, data) -> "Partition":
        return cls(data)


def _as_partition(lam) -> Partition:
    return lam if isinstance(lam, Partition) else Partition(lam)


def conjugate(lam) -> Partition:
    lam = _as_partition(lam)
    if not lam.parts:
        return lam
    return Partition([sum(1 for p in lam.parts if p >= i) for i in range(1, lam.parts[0] + 1)])


def cell_stats(lam, i: int, j: int) -> tuple[int, int, int, int]:
    """(arm, leg, coarm, coleg) of cell (i, j) with 1-based indices."""
    lam = _as_partition(lam)
    if i < 1 or j < 1 or j > lam.part(i):
        raise ValueError(f"cell ({i}, {j}) is not in {lam}")
    lam_c = conjugate(lam)
    return lam.part(i) - j, lam_c.part(j) - i, j - 1, i - 1


def hook_data(lam) -> list[tuple[int, int, int, int]]:
    """cell_stats for every cell, computed with a single conjugation."""
    lam = _as_partition(lam)
    lam_c = conjugate(lam)
    return [(lam.part(i) - j, lam_c.part(j) - i, j - 1, i - 1) for i, j in lam.cells()]


def reverse_lex_compare(lam, mu) -> int:
    """-1, 0 or 1 according to the reverse lexicographic order."""
    a = _as_partition(lam).parts
    b = _as_partition(mu).parts
    for x, y in zip(a, b):
        if x != y:
            return 1 if x > y else -1
    if len(a) == len(b):
        return 0
    return 1 if len(a) > len(b) else -1


def enumerate_box(K: int, R: Optional[int] = None, max_weight: Optional[int] = None) -> Iterator[Partition]:
    """Partitions with at most K parts and largest part at most R.

    R=None means no bound on the parts, which then requires ``max_weight``.
    Output is in decreasing reverse-lex order, starting from the largest.
    """
    if K < 0 or (R is not None and R < 0):
        raise ValueError("K and R must be nonnegative")
    if R is None and max_weight is None:
        raise ValueError("an unbounded box needs max_weight")
    cap = math.inf if max_weight is None else max_weight

    def rec(prefix, k_left, upper, budget):
        # any extension of a prefix beats the prefix itself, so extensions go first
        if k_left > 0:
            for p in range(int(min(upper, budget)), 0, -1):
                yield from rec(prefix + [p], k_left - 1, p, budget - p)
        yield Partition(prefix)

    yield from rec([], K, R if R is not None else cap, cap)


def partitions_of(n: int, max_len: Optional[int] = None, max_part: Optional[int] = None) -> list[Partition]:
    """All partitions of n, optionally restricted, in decreasing reverse-lex order."""
    out: list[Partition] = []

    def rec(prefix, remaining, upper):
        if remaining == 0:
            out.append(Partition(prefix))
            return
        if max_len is not None and len(prefix) >= max_len:
            return
        for p in range(min(upper, remaining), 0, -1):
            rec(prefix + [p], remaining - p, p)

    rec([], n, n if max_part is None else max_part)
    return out


def box_count(K: int, R: int) -> int:
    return math.comb(K + R, K)
