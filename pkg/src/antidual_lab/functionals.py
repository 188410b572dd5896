"""Antilinear functionals on V, bounded or not.

An antifunctional zeta is fixed by its coefficients c_i = zeta(e_i); it acts
on a finitely supported z by

    zeta(z) = sum_i conj(z_i) * c_i.

Coefficients come from a closed grammar of generators (finite support,
constant, power law, alternating sign, indicator of an index set, linear
combinations and masks), so they can be queried at arbitrary indices.  That
is what makes unbounded functionals usable.

An optional ``tail_bound`` n -> B(n) is an analytic upper bound on
sum_{i>n} |c_i|^2 / w_i, i.e. on the squared operator norm of the part of
zeta beyond the first n basis vectors.  It must accept numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Mapping

import numpy as np

from .indexsets import IndexSet
from .space import Subspace, Vector, WeightedSpace

__all__ = [
    "Antifunctional",
    "FiniteSupport",
    "Constant",
    "PowerLaw",
    "Alternating",
    "Indicator",
    "Sum",
    "Masked",
    "power_law_tail",
    "evaluate",
    "embed",
    "mask",
    "riesz_restrict",
    "hyperplane_update",
    "NormVerdict",
    "NormEstimate",
    "operator_norm_estimate",
]

TailBound = Callable[[np.ndarray], np.ndarray]


class Antifunctional:
    """Base class.  Subclasses implement ``coefficients``."""

    tail_bound: TailBound | None

    def coefficients(self, indices: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def coefficient(self, i: int) -> complex:
        return complex(self.coefficients(np.array([i], dtype=np.int64))[0])

    def support_hull(self) -> IndexSet:
        """An index set known to contain every i with c_i != 0."""
        return IndexSet.everything()

    def _exact_tail(self, space: WeightedSpace, n):
        return None

    def tail(self, space: WeightedSpace, n):
        """Upper bound on sum_{i>n} |c_i|^2/w_i, or None when unknown."""
        if self.tail_bound is not None:
            with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
                return np.asarray(self.tail_bound(np.asarray(n, dtype=float)), dtype=float)
        return self._exact_tail(space, n)

    def has_tail(self, space: WeightedSpace) -> bool:
        return self.tail(space, 1) is not None

    def __add__(self, other: "Antifunctional") -> "Sum":
        if not isinstance(other, Antifunctional):
            return NotImplemented
        return Sum(((1.0, self), (1.0, other)))

    def __sub__(self, other: "Antifunctional") -> "Sum":
        if not isinstance(other, Antifunctional):
            return NotImplemented
        return Sum(((1.0, self), (-1.0, other)))

    def __mul__(self, scalar: complex) -> "Sum":
        if isinstance(scalar, Antifunctional):
            return NotImplemented
        return Sum(((complex(scalar), self),))

    __rmul__ = __mul__

    def __neg__(self) -> "Sum":
        return Sum(((-1.0, self),))


def _finite_tail(space: WeightedSpace, idx: np.ndarray, coeffs: np.ndarray, n):
    """Exact sum_{i>n} |c_i|^2/w_i for a finitely supported coefficient list."""
    n = np.asarray(n, dtype=float)
    if len(idx) == 0:
        return np.zeros_like(n)
    order = np.argsort(idx)
    idx, coeffs = idx[order], coeffs[order]
    mass = np.abs(coeffs) ** 2 / space.weights(idx)
    suffix = np.concatenate([np.cumsum(mass[::-1])[::-1], [0.0]])
    pos = np.searchsorted(idx, n, side="right")
    return suffix[pos]


@dataclass(frozen=True)
class FiniteSupport(Antifunctional):
    coeffs: tuple[tuple[int, complex], ...]
    tail_bound: TailBound | None = field(default=None, compare=False)

    def __init__(self, coeffs: Mapping[int, complex] | None = None, tail_bound=None):
        clean = {}
        for i, c in (coeffs or {}).items():
            i, c = int(i), complex(c)
            if i < 1:
                raise ValueError(f"basis indices start at 1, got {i}")
            if c != 0:
                clean[i] = c
        object.__setattr__(self, "coeffs", tuple(sorted(clean.items())))
        object.__setattr__(self, "tail_bound", tail_bound)

    @property
    def _idx(self) -> np.ndarray:
        return np.array([i for i, _ in self.coeffs], dtype=np.int64)

    @property
    def _vals(self) -> np.ndarray:
        return np.array([c for _, c in self.coeffs], dtype=complex)

    def coefficients(self, indices):
        indices = np.asarray(indices, dtype=np.int64)
        out = np.zeros(indices.shape, dtype=complex)
        if not self.coeffs:
            return out
        keys, vals = self._idx, self._vals
        pos = np.minimum(np.searchsorted(keys, indices), len(keys) - 1)
        hit = keys[pos] == indices
        out[hit] = vals[pos[hit]]
        return out

    def coefficient(self, i):
        return dict(self.coeffs).get(int(i), 0j)

    def support_hull(self):
        return IndexSet.finite(i for i, _ in self.coeffs)

    def _exact_tail(self, space, n):
        return _finite_tail(space, self._idx, self._vals, n)


@dataclass(frozen=True)
class Constant(Antifunctional):
    """c_i = value for every i."""

    value: complex = 1.0
    tail_bound: TailBound | None = field(default=None, compare=False)

    def coefficients(self, indices):
        return np.full(np.shape(indices), complex(self.value), dtype=complex)

    def support_hull(self):
        return IndexSet.empty() if self.value == 0 else IndexSet.everything()

    def _exact_tail(self, space, n):
        if self.value == 0:
            return np.zeros_like(np.asarray(n, dtype=float))
        return None


@dataclass(frozen=True)
class PowerLaw(Antifunctional):
    """c_i = scale * i**(-exponent).  Bounded (for w = 1) iff exponent > 1/2."""

    exponent: float = 1.0
    scale: complex = 1.0
    tail_bound: TailBound | None = field(default=None, compare=False)

    def coefficients(self, indices):
        i = np.asarray(indices, dtype=float)
        return complex(self.scale) * i ** (-float(self.exponent))

    def support_hull(self):
        return IndexSet.empty() if self.scale == 0 else IndexSet.everything()


@dataclass(frozen=True)
class Alternating(Antifunctional):
    """c_i = scale * (-1)**(i+1)."""

    scale: complex = 1.0
    tail_bound: TailBound | None = field(default=None, compare=False)

    def coefficients(self, indices):
        i = np.asarray(indices, dtype=np.int64)
        return complex(self.scale) * np.where(i % 2 == 1, 1.0, -1.0)

    def support_hull(self):
        return IndexSet.empty() if self.scale == 0 else IndexSet.everything()


@dataclass(frozen=True)
class Indicator(Antifunctional):
    """c_i = value on ``members``, 0 elsewhere."""

    members: IndexSet
    value: complex = 1.0
    tail_bound: TailBound | None = field(default=None, compare=False)

    def coefficients(self, indices):
        hit = self.members.contains_array(indices)
        return np.where(hit, complex(self.value), 0j)

    def support_hull(self):
        return IndexSet.empty() if self.value == 0 else self.members

    def _exact_tail(self, space, n):
        if self.value == 0 or self.members.is_finite:
            idx = np.array(sorted(self.members.flips), dtype=np.int64)
            vals = np.full(len(idx), complex(self.value))
            return _finite_tail(space, idx, vals, n)
        return None


@dataclass(frozen=True)
class Sum(Antifunctional):
    """A finite linear combination sum_j a_j * zeta_j."""

    terms: tuple[tuple[complex, Antifunctional], ...]
    tail_bound: TailBound | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((complex(a), f) for a, f in self.terms))

    def coefficients(self, indices):
        out = np.zeros(np.shape(indices), dtype=complex)
        for a, f in self.terms:
            out = out + a * f.coefficients(indices)
        return out

    def support_hull(self):
        hull = IndexSet.empty()
        for a, f in self.terms:
            if a != 0:
                hull = hull | f.support_hull()
        return hull

    def _exact_tail(self, space, n):
        # Minkowski: ||sum a_j r_j|| <= sum |a_j| ||r_j||
        total = 0.0
        for a, f in self.terms:
            if a == 0:
                continue
            t = f.tail(space, n)
            if t is None:
                return None
            total = total + abs(a) * np.sqrt(t)
        return np.asarray(total, dtype=float) ** 2 * np.ones_like(np.asarray(n, dtype=float))


@dataclass(frozen=True)
class Masked(Antifunctional):
    """zeta composed with the coordinate projector onto ``members``."""

    base: Antifunctional
    members: IndexSet
    tail_bound: TailBound | None = field(default=None, compare=False)

    def coefficients(self, indices):
        hit = self.members.contains_array(indices)
        out = np.zeros(np.shape(indices), dtype=complex)
        if np.any(hit):
            out[hit] = self.base.coefficients(np.asarray(indices)[hit])
        return out

    def support_hull(self):
        return self.base.support_hull() & self.members

    def _exact_tail(self, space, n):
        t = self.base.tail(space, n)
        if t is not None:
            return t
        hull = self.support_hull()
        if hull.is_finite:
            idx = np.array(sorted(hull.flips), dtype=np.int64)
            return _finite_tail(space, idx, self.base.coefficients(idx), n)
        return None


def power_law_tail(exponent: float, scale: complex = 1.0, min_weight: float = 1.0) -> TailBound:
    """Integral bound for sum_{i>n} |scale|^2 i^(-2s) / w_i, valid for s > 1/2."""
    s = float(exponent)
    if not s > 0.5:
        raise ValueError("power-law tail bound needs exponent > 1/2")
    a2 = abs(complex(scale)) ** 2 / float(min_weight)

    def bound(n):
        n = np.asarray(n, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(n > 0, a2 * n ** (1.0 - 2.0 * s) / (2.0 * s - 1.0), np.inf)

    return bound


# -- operations -------------------------------------------------------------


def evaluate(space: WeightedSpace, zeta: Antifunctional, z: Vector) -> complex:
    """zeta(z) = sum over supp(z) of conj(z_i) c_i, summed in index order."""
    if not z:
        return 0j
    idx = np.array(z.support, dtype=np.int64)
    c = zeta.coefficients(idx)
    total = 0j
    for i, ci in zip(z.support, c):
        total += z[i].conjugate() * complex(ci)
    return total


def embed(space: WeightedSpace, v: Vector) -> FiniteSupport:
    """The canonical image v' with v'(z) = <z|v>."""
    return FiniteSupport({i: space.weight(i) * c for i, c in v.items()})


def mask(zeta: Antifunctional, members: IndexSet) -> Masked:
    """Extension by zero off ``members``; nested masks collapse to one."""
    if isinstance(zeta, Masked):
        return Masked(zeta.base, zeta.members & members, tail_bound=zeta.tail_bound)
    return Masked(zeta, members)


def riesz_restrict(space: WeightedSpace, zeta: Antifunctional, M: Subspace) -> Vector:
    """The unique zeta_M in M with zeta(z) = <z|zeta_M> for every z in M."""
    out = Vector()
    for b in M.onb:
        c = evaluate(space, zeta, b)
        if c != 0:
            out = out + c * b
    return out


def hyperplane_update(space: WeightedSpace, zeta: Antifunctional, zeta_M: Vector, u: Vector) -> Vector:
    """zeta_N for N = M + Cu, with u a unit vector orthogonal to M."""
    return zeta_M + evaluate(space, zeta, u) * u


class NormVerdict(str, Enum):
    CERTIFIED = "certified"
    STABILIZED = "stabilized"
    GROWING = "growing"


@dataclass(frozen=True)
class NormEstimate:
    verdict: NormVerdict
    value: float
    # half-open uncertainty: the true norm lies in [value, value + error]
    error: float | None
    norms: np.ndarray
    dims: np.ndarray
    exponent: float | None = None
    squared: np.ndarray | None = None

    @property
    def steps(self) -> int:
        return len(self.norms)


def _growth_exponent(norms: np.ndarray) -> float | None:
    k = np.arange(1, len(norms) + 1, dtype=float)
    half = len(norms) // 2
    k, y = k[half:], norms[half:]
    keep = y > 0
    if keep.sum() < 2:
        return None
    slope, _ = np.polyfit(np.log(k[keep]), np.log(y[keep]), 1)
    return float(slope)


def operator_norm_estimate(
    space: WeightedSpace,
    zeta: Antifunctional,
    chain,
    max_steps: int = 10_000,
    tol: float = 1e-8,
    window: int = 8,
) -> NormEstimate:
    """Estimate ||zeta|| from the nondecreasing trace ||zeta_{M_k}|| along ``chain``.

    With a tail bound the verdict is CERTIFIED as soon as the norm is pinned
    to an interval [value, value + error] with error < tol.  Without one, the
    trace is STABILIZED if it moves by less than tol for ``window``
    consecutive steps, and GROWING otherwise.
    """
    from .chains import walk

    w = walk(space, chain, max_steps)
    has_tail = zeta.has_tail(space)
    k = 0
    while True:
        k = w.grow(k)
        sq = w.squared_norms(zeta)
        norms = np.sqrt(sq)
        if has_tail:
            t = zeta.tail(space, w.prefix[: len(sq)])
            err = np.sqrt(sq + t) - norms
            hit = np.flatnonzero(err < tol)
            if len(hit):
                j = hit[0]
                return NormEstimate(NormVerdict.CERTIFIED, float(norms[j]), float(err[j]),
                                    norms[: j + 1], w.dims[: j + 1].copy(), squared=sq[: j + 1])
        else:
            j = _first_stable(norms, tol, window)
            if j is not None:
                return NormEstimate(NormVerdict.STABILIZED, float(norms[j]), None,
                                    norms[: j + 1], w.dims[: j + 1].copy(), squared=sq[: j + 1])
        if w.exhausted:
            break
    if has_tail:
        j = _first_stable(norms, tol, window)
        if j is not None:
            return NormEstimate(NormVerdict.STABILIZED, float(norms[j]), None,
                                norms[: j + 1], w.dims[: j + 1].copy(), squared=sq[: j + 1])
    return NormEstimate(NormVerdict.GROWING, float(norms[-1]) if len(norms) else 0.0, None,
                        norms, w.dims[: len(norms)].copy(), _growth_exponent(norms), sq)


def _first_stable(values: np.ndarray, tol: float, window: int) -> int | None:
    """First index j >= window such that the last ``window`` increments are all < tol."""
    if len(values) <= window:
        return None
    steps = np.abs(np.diff(values))
    ok = (steps < tol).astype(np.int64)
    run = np.convolve(ok, np.ones(window, dtype=np.int64), mode="valid")
    hit = np.flatnonzero(run == window)
    if not len(hit):
        return None
    return int(hit[0] + window)
