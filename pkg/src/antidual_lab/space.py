"""The ambient inner-product space.

V is modelled as the finitely supported complex sequences indexed from 1,
with the diagonal inner product

    <x|y> = sum_i conj(x_i) * w_i * y_i,      w_i > 0,

antilinear in the first slot and linear in the second.  Finite-dimensional
subspaces carry an orthonormal basis built by modified Gram-Schmidt with one
reorthogonalization pass.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import NotOrthogonal

__all__ = [
    "TAU_RANK",
    "TAU_ONB",
    "Vector",
    "WeightedSpace",
    "Subspace",
    "inner_product",
    "norm",
    "orthonormalize",
    "extend",
    "project",
    "direct_sum",
]

# Dependence threshold, relative to the norm of the vector being tested.
TAU_RANK = 1e-9
# Orthonormality tolerance for Gram checks.
TAU_ONB = 1e-10


class Vector:
    """A finitely supported complex sequence over the basis e_1, e_2, ...

    Only nonzero coefficients are stored; exact zeros are dropped on
    construction, so ``Vector({1: 1, 2: 0}) == Vector({1: 1})``.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[int, complex] | None = None):
        c = {}
        for i, v in (coeffs or {}).items():
            i = int(i)
            if i < 1:
                raise ValueError(f"basis indices start at 1, got {i}")
            v = complex(v)
            if v != 0:
                c[i] = v
        self._c = dict(sorted(c.items()))

    @classmethod
    def basis(cls, i: int, scale: complex = 1.0) -> "Vector":
        return cls({i: scale})

    @classmethod
    def from_array(cls, indices: Iterable[int], values: Iterable[complex]) -> "Vector":
        return cls(dict(zip((int(i) for i in indices), values)))

    @property
    def coeffs(self) -> Mapping[int, complex]:
        return MappingProxyType(self._c)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(self._c)

    def __getitem__(self, i: int) -> complex:
        return self._c.get(i, 0j)

    def __len__(self) -> int:
        return len(self._c)

    def __bool__(self) -> bool:
        return bool(self._c)

    def items(self):
        return self._c.items()

    def to_array(self, indices: Sequence[int]) -> np.ndarray:
        return np.array([self._c.get(int(i), 0j) for i in indices], dtype=complex)

    def is_real(self) -> bool:
        return all(v.imag == 0 for v in self._c.values())

    def conj(self) -> "Vector":
        return Vector({i: v.conjugate() for i, v in self._c.items()})

    def __add__(self, other: "Vector") -> "Vector":
        if not isinstance(other, Vector):
            return NotImplemented
        out = dict(self._c)
        for i, v in other._c.items():
            out[i] = out.get(i, 0j) + v
        return Vector(out)

    def __sub__(self, other: "Vector") -> "Vector":
        if not isinstance(other, Vector):
            return NotImplemented
        out = dict(self._c)
        for i, v in other._c.items():
            out[i] = out.get(i, 0j) - v
        return Vector(out)

    def __neg__(self) -> "Vector":
        return Vector({i: -v for i, v in self._c.items()})

    def __mul__(self, scalar: complex) -> "Vector":
        if isinstance(scalar, Vector):
            return NotImplemented
        scalar = complex(scalar)
        return Vector({i: scalar * v for i, v in self._c.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> "Vector":
        return self * (1.0 / complex(scalar))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Vector):
            return NotImplemented
        return self._c == other._c

    def __hash__(self) -> int:
        return hash(tuple(self._c.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"{i}: {_fmt(v)}" for i, v in self._c.items())
        return f"Vector({{{body}}})"


def _fmt(v: complex) -> str:
    return repr(v.real) if v.imag == 0 else repr(v)


@dataclass(frozen=True)
class WeightedSpace:
    """Diagonal weights w_i > 0; indices not in ``overrides`` get ``default``."""

    default: float = 1.0
    overrides: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.default > 0 or not math.isfinite(self.default):
            raise ValueError("weights must be strictly positive")
        clean = {}
        for i, w in self.overrides.items():
            i, w = int(i), float(w)
            if i < 1:
                raise ValueError(f"basis indices start at 1, got {i}")
            if not w > 0 or not math.isfinite(w):
                raise ValueError("weights must be strictly positive")
            clean[i] = w
        object.__setattr__(self, "default", float(self.default))
        object.__setattr__(self, "overrides", MappingProxyType(dict(sorted(clean.items()))))
        keys = np.fromiter(clean, dtype=np.int64, count=len(clean))
        order = np.argsort(keys)
        vals = np.fromiter(clean.values(), dtype=float, count=len(clean))
        object.__setattr__(self, "_keys", keys[order])
        object.__setattr__(self, "_vals", vals[order])

    def __hash__(self):
        return hash((self.default, tuple(self.overrides.items())))

    def __eq__(self, other):
        if not isinstance(other, WeightedSpace):
            return NotImplemented
        return self.default == other.default and dict(self.overrides) == dict(other.overrides)

    def weight(self, i: int) -> float:
        return self.overrides.get(i, self.default)

    def weights(self, indices: np.ndarray) -> np.ndarray:
        """Vectorized weight lookup."""
        indices = np.asarray(indices, dtype=np.int64)
        out = np.full(indices.shape, self.default, dtype=float)
        if len(self._keys):
            pos = np.searchsorted(self._keys, indices)
            pos = np.minimum(pos, len(self._keys) - 1)
            hit = self._keys[pos] == indices
            out[hit] = self._vals[pos[hit]]
        return out

    @property
    def min_weight(self) -> float:
        return min([self.default, *self.overrides.values()])

    def unit_basis(self, i: int) -> Vector:
        """e_i scaled to unit length."""
        return Vector.basis(i, 1.0 / math.sqrt(self.weight(i)))


def inner_product(space: WeightedSpace, x: Vector, y: Vector) -> complex:
    """<x|y>, antilinear in x and linear in y."""
    if len(x) > len(y):
        common = [i for i in y.support if i in x.coeffs]
    else:
        common = [i for i in x.support if i in y.coeffs]
    total = 0j
    for i in common:
        total += x[i].conjugate() * space.weight(i) * y[i]
    return total


def norm(space: WeightedSpace, x: Vector) -> float:
    total = 0.0
    for i, v in x.items():
        total += space.weight(i) * (v.real * v.real + v.imag * v.imag)
    if x and not (sys.float_info.min <= total < math.inf):
        # squares under- or overflowed; redo the sum relative to the largest term
        terms = [math.sqrt(space.weight(i)) * abs(v) for i, v in x.items()]
        big = max(terms)
        return big * math.sqrt(sum((t / big) ** 2 for t in terms))
    return math.sqrt(total)


@dataclass(frozen=True)
class Subspace:
    """A finite-dimensional subspace: the vectors it was built from plus an ONB."""

    spanning: tuple[Vector, ...] = ()
    onb: tuple[Vector, ...] = ()

    @classmethod
    def zero(cls) -> "Subspace":
        return cls()

    @classmethod
    def from_onb(cls, onb: Iterable[Vector]) -> "Subspace":
        """Wrap vectors already known to be orthonormal; no checks are made."""
        onb = tuple(onb)
        return cls(onb, onb)

    @classmethod
    def coordinate(cls, space: WeightedSpace, indices: Iterable[int]) -> "Subspace":
        """span{e_i : i in indices}."""
        return cls.from_onb(space.unit_basis(i) for i in dict.fromkeys(indices))

    @property
    def dim(self) -> int:
        return len(self.onb)

    @property
    def support(self) -> frozenset[int]:
        out: set[int] = set()
        for b in self.onb:
            out.update(b.support)
        return frozenset(out)

    def residual(self, space: WeightedSpace, v: Vector) -> Vector:
        return _orthogonalize(space, self.onb, v)

    def contains(self, space: WeightedSpace, v: Vector) -> bool:
        nv = norm(space, v)
        if nv == 0:
            return True
        return norm(space, self.residual(space, v)) < TAU_RANK * nv

    def contains_subspace(self, space: WeightedSpace, other: "Subspace") -> bool:
        return all(self.contains(space, b) for b in other.onb)

    def gram(self, space: WeightedSpace) -> np.ndarray:
        n = self.dim
        g = np.empty((n, n), dtype=complex)
        for a in range(n):
            for b in range(n):
                g[a, b] = inner_product(space, self.onb[a], self.onb[b])
        return g

    def is_orthonormal(self, space: WeightedSpace, tol: float = TAU_ONB) -> bool:
        if self.dim == 0:
            return True
        return bool(np.max(np.abs(self.gram(space) - np.eye(self.dim))) <= tol)


def _orthogonalize(space: WeightedSpace, onb: Sequence[Vector], v: Vector) -> Vector:
    # modified Gram-Schmidt, run twice
    r = v
    for _ in range(2):
        for b in onb:
            c = inner_product(space, b, r)
            if c != 0:
                r = r - c * b
    return r


def _residual_direction(space: WeightedSpace, onb: Sequence[Vector], v: Vector) -> Vector | None:
    nv = norm(space, v)
    if nv == 0:
        return None
    r = _orthogonalize(space, onb, v)
    nr = norm(space, r)
    if nr < TAU_RANK * nv:
        return None
    return r / nr


def orthonormalize(space: WeightedSpace, vectors: Iterable[Vector]) -> Subspace:
    """Orthonormalize ``vectors``, silently dropping dependent ones."""
    vectors = tuple(vectors)
    onb: list[Vector] = []
    for v in vectors:
        u = _residual_direction(space, onb, v)
        if u is not None:
            onb.append(u)
    return Subspace(vectors, tuple(onb))


def extend(space: WeightedSpace, S: Subspace, v: Vector) -> tuple[Subspace, Vector | None]:
    """Return (S + span{v}, u) where u is the new unit direction, or (S, None)."""
    u = _residual_direction(space, S.onb, v)
    if u is None:
        return S, None
    return Subspace(S.spanning + (v,), S.onb + (u,)), u


def project(space: WeightedSpace, v: Vector, S: Subspace) -> Vector:
    out = Vector()
    for b in S.onb:
        c = inner_product(space, b, v)
        if c != 0:
            out = out + c * b
    return out


def direct_sum(space: WeightedSpace, S: Subspace, L: Subspace) -> Subspace:
    """Orthogonal direct sum; raises NotOrthogonal if S and L are not orthogonal."""
    for a in S.onb:
        for b in L.onb:
            if abs(inner_product(space, a, b)) > TAU_ONB:
                raise NotOrthogonal("subspaces are not orthogonal")
    return Subspace(S.spanning + L.spanning, S.onb + L.onb)
