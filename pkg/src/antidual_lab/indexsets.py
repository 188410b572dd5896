"""Eventually periodic sets of basis indices.

Every set is stored as a periodic rule (modulus, residues) plus a finite set
of flipped indices, which covers finite sets, cofinite sets, even/odd indices
and residue classes, and is closed under complement, union and intersection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

__all__ = ["IndexSet"]


@dataclass(frozen=True)
class IndexSet:
    modulus: int
    residues: frozenset[int]
    flips: frozenset[int]

    # -- constructors -------------------------------------------------------

    @classmethod
    def _make(cls, modulus: int, residues: Iterable[int], flips: Iterable[int]) -> "IndexSet":
        residues = frozenset(int(r) % modulus for r in residues)
        # shrink to the minimal period so equal sets compare equal
        for d in sorted(_divisors(modulus)):
            if all((r % d in {s % d for s in residues}) == (r in residues) for r in range(modulus)):
                residues = frozenset(r for r in range(d) if r in {s % d for s in residues})
                modulus = d
                break
        flips = frozenset(int(i) for i in flips if int(i) >= 1)
        return cls(modulus, residues, flips)

    @classmethod
    def finite(cls, members: Iterable[int]) -> "IndexSet":
        members = [int(i) for i in members]
        if any(i < 1 for i in members):
            raise ValueError("basis indices start at 1")
        return cls._make(1, (), members)

    @classmethod
    def empty(cls) -> "IndexSet":
        return cls.finite(())

    @classmethod
    def everything(cls) -> "IndexSet":
        return cls._make(1, (0,), ())

    @classmethod
    def cofinite(cls, excluded: Iterable[int]) -> "IndexSet":
        return cls._make(1, (0,), excluded)

    @classmethod
    def residue(cls, modulus: int, residues: Iterable[int] | int) -> "IndexSet":
        if modulus < 1:
            raise ValueError("modulus must be positive")
        if isinstance(residues, int):
            residues = (residues,)
        return cls._make(modulus, residues, ())

    @classmethod
    def even(cls) -> "IndexSet":
        return cls.residue(2, 0)

    @classmethod
    def odd(cls) -> "IndexSet":
        return cls.residue(2, 1)

    # -- membership ---------------------------------------------------------

    def _periodic(self, i: int) -> bool:
        return (i % self.modulus) in self.residues

    def __contains__(self, i: int) -> bool:
        i = int(i)
        return i >= 1 and (self._periodic(i) != (i in self.flips))

    def contains_array(self, indices: np.ndarray) -> np.ndarray:
        indices = np.asarray(indices, dtype=np.int64)
        res = np.isin(indices % self.modulus, np.fromiter(self.residues, dtype=np.int64))
        if self.flips:
            res ^= np.isin(indices, np.fromiter(self.flips, dtype=np.int64))
        return res & (indices >= 1)

    @property
    def is_finite(self) -> bool:
        return not self.residues

    @property
    def is_empty(self) -> bool:
        return not self.residues and not self.flips

    def members_upto(self, n: int) -> np.ndarray:
        idx = np.arange(1, n + 1, dtype=np.int64)
        return idx[self.contains_array(idx)]

    def take(self, count: int, after: int = 0) -> np.ndarray:
        """The ``count`` smallest members greater than ``after`` (fewer if finite)."""
        out: list[np.ndarray] = []
        found = 0
        lo = after + 1
        if self.is_finite:
            members = sorted(i for i in self.flips if i > after)
            return np.array(members[:count], dtype=np.int64)
        width = max(64, 2 * count)
        while found < count:
            idx = np.arange(lo, lo + width, dtype=np.int64)
            hit = idx[self.contains_array(idx)]
            out.append(hit[: count - found])
            found += len(out[-1])
            lo += width
        return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)

    # -- algebra ------------------------------------------------------------

    def _combine(self, other: "IndexSet", op: Callable[[bool, bool], bool]) -> "IndexSet":
        m = math.lcm(self.modulus, other.modulus)
        residues = [r for r in range(m) if op(self._periodic(r), other._periodic(r))]
        periodic = set(residues)
        flips = [
            i for i in self.flips | other.flips
            if op(i in self, i in other) != ((i % m) in periodic)
        ]
        return IndexSet._make(m, residues, flips)

    def complement(self) -> "IndexSet":
        return self._combine(IndexSet.everything(), lambda a, b: not a)

    def __and__(self, other: "IndexSet") -> "IndexSet":
        return self._combine(other, lambda a, b: a and b)

    def __or__(self, other: "IndexSet") -> "IndexSet":
        return self._combine(other, lambda a, b: a or b)

    def __sub__(self, other: "IndexSet") -> "IndexSet":
        return self._combine(other, lambda a, b: a and not b)

    def issubset(self, other: "IndexSet") -> bool:
        return (self - other).is_empty

    def describe(self) -> dict:
        """JSON-friendly description."""
        if self.is_finite:
            return {"kind": "finite", "members": sorted(self.flips)}
        if self.modulus == 1:
            return {"kind": "cofinite", "excluded": sorted(self.flips)}
        d = {"kind": "residue", "modulus": self.modulus, "residues": sorted(self.residues)}
        if self.flips:
            d["flips"] = sorted(self.flips)
        return d


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]
