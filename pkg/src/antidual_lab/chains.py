"""Nested subspace chains and the approximant net along them.

A chain M_1 ⊆ M_2 ⊆ ... is a cofinal path through the finite-dimensional
subspaces.  Walking it produces, at every step, the new orthonormal
directions u that extend M_{k-1} to M_k.  Everything else is bookkeeping on
those directions: for a functional zeta the Riesz representative grows by
zeta(u) u, so

    ||zeta_{M_k}||^2       = sum over directions so far of |zeta(u)|^2
    <xi_{M_k}|eta_{M_k}>   = sum over directions so far of conj(xi(u)) eta(u)

Chains made of coordinate directions (prefix and split chains) are walked
with numpy over index arrays; general chains go through explicit
Gram-Schmidt on sparse vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterator, NamedTuple, Sequence

import numpy as np

from .errors import ChainNeverContains, ChainNotNested, IncrementalDrift, NotBounded, PairingMismatch
from .functionals import (
    Antifunctional,
    NormVerdict,
    embed,
    evaluate,
    operator_norm_estimate,
    riesz_restrict,
)
from .indexsets import IndexSet
from .space import Subspace, Vector, WeightedSpace, _residual_direction, inner_product

__all__ = [
    "SubspaceChain",
    "Verdict",
    "Trace",
    "EvaluationOutcome",
    "walk",
    "approximant_trace",
    "partial_inner_product",
    "pairing_check",
    "PairingResult",
    "polarization_reconstruct",
    "split_partial_inner_product",
    "pointwise_limit_check",
    "PointwiseResult",
]

DEFAULT_STEPS = 10_000
FIRST_CHUNK = 1024


@dataclass(frozen=True)
class SubspaceChain:
    """A nested sequence of finite-dimensional subspaces.

    Build one with :meth:`prefix`, :meth:`split`, :meth:`explicit` or
    :meth:`generated`.  ``budget`` caps the number of steps (None = no cap
    beyond the one passed to the evaluating function).
    """

    kind: str
    members: IndexSet | None = None
    schedule: tuple[int, int] = (1, 1)
    subspaces: tuple[Subspace, ...] = ()
    step: Callable[[Subspace], Subspace | None] | None = field(default=None, compare=False)
    start: Subspace | None = None
    budget: int | None = None

    @classmethod
    def prefix(cls, budget: int | None = None) -> "SubspaceChain":
        """M_k = span{e_1, ..., e_k}."""
        return cls("prefix", budget=budget)

    @classmethod
    def split(cls, X: IndexSet, schedule: tuple[int, int] = (1, 1), budget: int | None = None) -> "SubspaceChain":
        """M_k = (prefix of X) ⊕ (prefix of its complement Y); a path through F(X, Y).

        Each step takes ``schedule[0]`` new indices from X and ``schedule[1]``
        from Y, lowest first.
        """
        a, b = (int(s) for s in schedule)
        if a < 0 or b < 0 or a + b == 0:
            raise ValueError("split schedule needs nonnegative counts, not both zero")
        return cls("split", members=X, schedule=(a, b), budget=budget)

    @classmethod
    def explicit(cls, subspaces: Sequence[Subspace]) -> "SubspaceChain":
        return cls("explicit", subspaces=tuple(subspaces), budget=len(subspaces))

    @classmethod
    def generated(cls, step: Callable[[Subspace], Subspace | None], start: Subspace | None = None,
                  budget: int | None = None) -> "SubspaceChain":
        """M_1 = step(start), M_{k+1} = step(M_k); stops when step returns None or stalls."""
        return cls("generated", step=step, start=start, budget=budget)

    @property
    def is_coordinate(self) -> bool:
        return self.kind in ("prefix", "split")

    def cap(self, steps: int) -> int:
        return steps if self.budget is None else min(steps, self.budget)

    def coordinate_schedule(self, steps: int) -> tuple[np.ndarray, np.ndarray]:
        """(indices, step_of) for the first ``steps`` steps of a coordinate chain."""
        if self.kind == "prefix":
            idx = np.arange(1, steps + 1, dtype=np.int64)
            return idx, np.arange(steps, dtype=np.int64)
        if self.kind == "split":
            a, b = self.schedule
            X = self.members
            xs = X.take(a * steps) if a else np.zeros(0, dtype=np.int64)
            ys = X.complement().take(b * steps) if b else np.zeros(0, dtype=np.int64)
            sx = np.arange(len(xs), dtype=np.int64) // max(a, 1)
            sy = np.arange(len(ys), dtype=np.int64) // max(b, 1)
            idx = np.concatenate([xs, ys])
            st = np.concatenate([sx, sy])
            side = np.concatenate([np.zeros(len(xs)), np.ones(len(ys))])
            order = np.lexsort((side, st))
            return idx[order], st[order]
        raise TypeError(f"{self.kind} chain has no coordinate schedule")

    def iter_subspaces(self, space: WeightedSpace) -> Iterator[Subspace]:
        if self.kind == "explicit":
            yield from self.subspaces
        elif self.kind == "generated":
            M = self.start or Subspace.zero()
            while True:
                M = self.step(M)
                if M is None:
                    return
                yield M
        else:
            k = 1
            while True:
                idx, st = self.coordinate_schedule(k)
                yield Subspace.coordinate(space, idx.tolist())
                k += 1


class _Walk:
    """Lazily accumulated new directions along a chain."""

    def __init__(self, space: WeightedSpace, chain: SubspaceChain, steps: int):
        self.space = space
        self.chain = chain
        self.budget = chain.cap(int(steps))
        self.exhausted = self.budget <= 0
        self.dims = np.zeros(0, dtype=np.int64)
        self.prefix = np.zeros(0, dtype=np.int64)
        self.last_dir = np.zeros(0, dtype=np.int64)
        self._cache: dict[int, tuple[Antifunctional, np.ndarray]] = {}
        # coordinate chains
        self.indices = np.zeros(0, dtype=np.int64)
        # general chains
        self.directions: list[Vector] = []
        self.subspaces: list[Subspace] = []
        self._iter = None if chain.is_coordinate else chain.iter_subspaces(space)
        self._n_prefix = 0

    @property
    def steps(self) -> int:
        return len(self.dims)

    def grow(self, current: int | None = None) -> int:
        """Extend to roughly double the current length; return the new length."""
        current = self.steps if current is None else current
        target = min(self.budget, max(FIRST_CHUNK, 2 * current))
        if target > self.steps:
            if self.chain.is_coordinate:
                self._grow_coordinate(target)
            else:
                self._grow_general(target)
        if self.steps >= self.budget:
            self.exhausted = True
        return self.steps

    def ensure(self, k: int) -> None:
        while self.steps < k and not self.exhausted:
            self.grow()

    def _grow_coordinate(self, target: int) -> None:
        idx, st = self.chain.coordinate_schedule(target)
        n_steps = int(st[-1]) + 1 if len(st) else 0
        if n_steps < target:
            self.exhausted = True
        self.indices = idx
        last = np.full(n_steps, -1, dtype=np.int64)
        last[st] = np.arange(len(st))
        self.last_dir = last
        self.dims = last + 1
        # n_k = largest n with e_1..e_n all in M_k
        big = idx.max() + 2 if len(idx) else 2
        first = np.full(big, np.iinfo(np.int64).max, dtype=np.int64)
        first[idx] = st
        reach = np.maximum.accumulate(first[1:])
        self.prefix = np.searchsorted(reach, np.arange(n_steps), side="right").astype(np.int64)

    def _grow_general(self, target: int) -> None:
        space = self.space
        dims, prefix, last = list(self.dims), list(self.prefix), list(self.last_dir)
        while len(dims) < target:
            M = next(self._iter, None)
            if M is None:
                self.exhausted = True
                break
            prev = Subspace.from_onb(self.directions)
            if not M.contains_subspace(space, prev):
                raise ChainNotNested(f"step {len(dims) + 1} does not contain its predecessor")
            new = []
            for b in M.onb:
                u = _residual_direction(space, self.directions + new, b)
                if u is not None:
                    new.append(u)
            if not new:
                # stalled: dimension did not grow
                self.exhausted = True
                break
            self.directions.extend(new)
            self.subspaces.append(M)
            acc = Subspace.from_onb(self.directions)
            while self._n_prefix < len(self.directions) and acc.contains(
                space, Vector.basis(self._n_prefix + 1)
            ):
                self._n_prefix += 1
            dims.append(len(self.directions))
            prefix.append(self._n_prefix)
            last.append(len(self.directions) - 1)
        self.dims = np.array(dims, dtype=np.int64)
        self.prefix = np.array(prefix, dtype=np.int64)
        self.last_dir = np.array(last, dtype=np.int64)

    @property
    def n_directions(self) -> int:
        return int(self.last_dir[-1]) + 1 if len(self.last_dir) else 0

    def values(self, zeta: Antifunctional) -> np.ndarray:
        """zeta(u) for every direction u walked so far."""
        n = self.n_directions
        key = id(zeta)
        done = self._cache.get(key, (zeta, np.zeros(0, dtype=complex)))[1]
        if len(done) < n:
            if self.chain.is_coordinate:
                idx = self.indices[len(done):n]
                scale = 1.0 / np.sqrt(self.space.weights(idx))
                fresh = zeta.coefficients(idx) * scale
            else:
                fresh = np.array([evaluate(self.space, zeta, u) for u in self.directions[len(done):n]],
                                 dtype=complex)
            done = np.concatenate([done, fresh])
            self._cache[key] = (zeta, done)
        return done[:n]

    def squared_norms(self, zeta: Antifunctional) -> np.ndarray:
        v = self.values(zeta)
        return np.cumsum(v.real ** 2 + v.imag ** 2)[self.last_dir] if len(v) else np.zeros(0)

    def cross(self, xi: Antifunctional, eta: Antifunctional) -> np.ndarray:
        a, b = self.values(xi), self.values(eta)
        if not len(a):
            return np.zeros(0, dtype=complex)
        # spelled out in reals: numpy's complex multiply may fuse, which would
        # break the exact symmetry cross(eta, xi) == conj(cross(xi, eta))
        prod = np.empty(len(a), dtype=complex)
        prod.real = a.real * b.real + a.imag * b.imag
        prod.imag = a.real * b.imag - a.imag * b.real
        return np.cumsum(prod)[self.last_dir]

    def subspace(self, k: int) -> Subspace:
        """M_k (1-based)."""
        self.ensure(k)
        if self.chain.is_coordinate:
            return Subspace.coordinate(self.space, self.indices[: self.last_dir[k - 1] + 1].tolist())
        return self.subspaces[k - 1]

    def first_containing(self, v: Vector) -> int | None:
        """Smallest k with v in M_k, walking further if needed."""
        if not v:
            self.ensure(1)
            return 1 if self.steps else None
        if self.chain.is_coordinate:
            need = np.array(v.support, dtype=np.int64)
            while True:
                hit = np.isin(need, self.indices)
                if hit.all():
                    pos = np.flatnonzero(np.isin(self.indices, need))
                    st = np.searchsorted(self.last_dir, pos.max())
                    return int(st) + 1
                if self.exhausted:
                    return None
                self.grow()
        k = 0
        while True:
            while k < self.steps:
                acc = Subspace.from_onb(self.directions[: self.last_dir[k] + 1])
                if acc.contains(self.space, v):
                    return k + 1
                k += 1
            if self.exhausted:
                return None
            self.grow()


def walk(space: WeightedSpace, chain: SubspaceChain, steps: int = DEFAULT_STEPS) -> _Walk:
    return _Walk(space, chain, steps)


class Verdict(str, Enum):
    CONVERGED = "converged"
    DIVERGED = "diverged"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Trace:
    """Per-step record: dimension, approximant s_k, and error bound (NaN if none)."""

    dims: np.ndarray
    values: np.ndarray
    bounds: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.values)

    def rows(self):
        for k in range(len(self.values)):
            b = None if self.bounds is None else float(self.bounds[k])
            yield k + 1, int(self.dims[k]), float(self.values[k].real), float(self.values[k].imag), b


@dataclass(frozen=True)
class EvaluationOutcome:
    verdict: Verdict
    value: complex | None
    error_bound: float | None
    certified: bool
    trace: Trace
    certificate: object | None = None

    @property
    def converged(self) -> bool:
        return self.verdict is Verdict.CONVERGED


def _check_from_scratch(space, w: _Walk, xi, eta, s: np.ndarray, verify_upto: int) -> None:
    ks = [k for k in _powers_of_two(len(s)) if w.dims[k - 1] <= verify_upto]
    if len(s) and w.dims[len(s) - 1] <= verify_upto:
        ks.append(len(s))
    for k in sorted(set(ks)):
        M = w.subspace(k)
        direct = inner_product(space, riesz_restrict(space, xi, M), riesz_restrict(space, eta, M))
        if abs(direct - s[k - 1]) > 1e-9 * max(1.0, abs(direct)):
            raise IncrementalDrift(f"step {k}: incremental {s[k - 1]} vs from-scratch {direct}")


def _powers_of_two(n: int) -> list[int]:
    out, k = [], 1
    while k <= n:
        out.append(k)
        k *= 2
    return out


def approximant_trace(
    space: WeightedSpace,
    xi: Antifunctional,
    eta: Antifunctional,
    chain: SubspaceChain,
    steps: int = DEFAULT_STEPS,
    verify_upto: int = 256,
) -> np.ndarray:
    """s_k = <xi_{M_k}|eta_{M_k}> for k = 1..steps (fewer if the chain ends).

    Values come from the incremental update; at steps 1, 2, 4, ... (and the
    last) whose dimension is at most ``verify_upto`` they are recomputed from
    scratch and IncrementalDrift is raised on disagreement beyond 1e-9.
    """
    w = walk(space, chain, steps)
    w.ensure(w.budget)
    s = w.cross(xi, eta)
    if verify_upto:
        _check_from_scratch(space, w, xi, eta, s, verify_upto)
    return s


def _pair_bounds(space, xi, eta, prefix: np.ndarray) -> np.ndarray | None:
    tx, ty = xi.tail(space, prefix), eta.tail(space, prefix)
    if tx is None and ty is None:
        return None
    # [xi|eta] - <xi_M|eta_M> = <xi_r|eta_r> with r the parts orthogonal to M;
    # a vanishing tail on one side pins the error to zero whatever the other does
    if tx is None or ty is None:
        known = tx if ty is None else ty
        return np.where(known == 0, 0.0, np.inf)
    return np.sqrt(tx) * np.sqrt(ty)


def _first_settled(s: np.ndarray, tol: float, window: int) -> int | None:
    """First k with |s_{k+j} - s_k| < tol for j = 1..window; returns k + window (0-based)."""
    if len(s) <= window:
        return None
    windows = np.lib.stride_tricks.sliding_window_view(s, window + 1)
    spread = np.max(np.abs(windows[:, 1:] - windows[:, :1]), axis=1)
    hit = np.flatnonzero(spread < tol)
    return int(hit[0] + window) if len(hit) else None


def partial_inner_product(
    space: WeightedSpace,
    xi: Antifunctional,
    eta: Antifunctional,
    chain: SubspaceChain,
    tol: float = 1e-8,
    window: int = 8,
    steps: int = DEFAULT_STEPS,
    certify_divergence: int = 0,
) -> EvaluationOutcome:
    """Evaluate [xi|eta] as the limit of <xi_{M_k}|eta_{M_k}> along ``chain``.

    When both functionals carry tail bounds the result is certified:
    CONVERGED once |[xi|eta] - s_k| <= sqrt(tail_xi(n_k) * tail_eta(n_k)) < tol,
    where n_k counts the leading basis vectors inside M_k.  Otherwise a
    CONVERGED verdict only means the trace sat still for ``window`` steps and
    ``certified`` is False.  If only one side has a tail bound, the result is
    still certified once that tail is exactly zero.  A single chain never proves divergence; with
    ``certify_divergence = k > 0`` an inconclusive run tries to build a
    k-step divergence certificate and reports DIVERGED if that succeeds.
    """
    w = walk(space, chain, steps)
    bounded = xi.has_tail(space) and eta.has_tail(space)
    partly = xi.has_tail(space) or eta.has_tail(space)
    while True:
        w.grow()
        s = w.cross(xi, eta)
        if partly:
            bounds = _pair_bounds(space, xi, eta, w.prefix)
            hit = np.flatnonzero(bounds < tol)
            if len(hit):
                j = hit[0]
                trace = Trace(w.dims[: j + 1].copy(), s[: j + 1], bounds[: j + 1])
                return EvaluationOutcome(Verdict.CONVERGED, complex(s[j]), float(bounds[j]), True, trace)
        if not bounded:
            j = _first_settled(s, tol, window)
            if j is not None:
                trace = Trace(w.dims[: j + 1].copy(), s[: j + 1])
                return EvaluationOutcome(Verdict.CONVERGED, complex(s[j]), None, False, trace)
        if w.exhausted:
            break
    trace = Trace(w.dims.copy(), s, _pair_bounds(space, xi, eta, w.prefix) if partly else None)
    if certify_divergence > 0:
        from .errors import BudgetExhausted
        from .witnesses import divergence_certificate

        try:
            cert = divergence_certificate(space, xi, eta, Subspace.zero(), certify_divergence)
        except BudgetExhausted:
            pass
        else:
            return EvaluationOutcome(Verdict.DIVERGED, None, None, True, trace, cert)
    return EvaluationOutcome(Verdict.INCONCLUSIVE, None, None, False, trace)


class PairingResult(NamedTuple):
    chain_value: complex
    direct_value: complex
    first_step: int


def pairing_check(
    space: WeightedSpace,
    x: Vector,
    eta: Antifunctional,
    chain: SubspaceChain,
    steps: int = DEFAULT_STEPS,
) -> PairingResult:
    """Compare [x'|eta] along ``chain`` with eta(x).

    The chain value is read at the first step whose subspace contains x; the
    trace must be exactly constant from there on.  The mirrored identity
    [eta|x'] = conj(eta(x)) is checked as well.
    """
    xi = embed(space, x)
    w = walk(space, chain, steps)
    k0 = w.first_containing(x)
    if k0 is None:
        raise ChainNeverContains("chain never contains x within its step budget")
    s = w.cross(xi, eta)
    mirrored = w.cross(eta, xi)
    # coordinate chains add exact zeros past k0; general ones only round-off
    slack = 0.0 if chain.is_coordinate else 1e-12 * max(1.0, float(np.max(np.abs(s[k0 - 1:]))))
    if np.any(np.abs(s[k0 - 1:] - s[k0 - 1]) > slack):
        raise PairingMismatch("approximant trace is not stationary once the chain contains x")
    direct = evaluate(space, eta, x)
    if mirrored[k0 - 1] != np.conj(s[k0 - 1]):
        raise PairingMismatch("mirrored pairing is not the complex conjugate")
    if abs(mirrored[k0 - 1] - np.conj(direct)) > 1e-9 * max(1.0, abs(direct)):
        raise PairingMismatch("mirrored pairing disagrees with conj(eta(x))")
    return PairingResult(complex(s[k0 - 1]), direct, k0)


class PointwiseResult(NamedTuple):
    first_step: int
    value: complex
    target: complex
    stationary: bool


def pointwise_limit_check(
    space: WeightedSpace,
    zeta: Antifunctional,
    z: Vector,
    chain: SubspaceChain,
    steps: int = DEFAULT_STEPS,
) -> PointwiseResult:
    """Track zeta'_{M_k}(z) = <z|zeta_{M_k}> and report when it reaches zeta(z)."""
    w = walk(space, chain, steps)
    k0 = w.first_containing(z)
    if k0 is None:
        raise ChainNeverContains("chain never contains z within its step budget")
    s = w.cross(embed(space, z), zeta)
    tail = s[k0 - 1:]
    slack = 0.0 if chain.is_coordinate else 1e-12 * max(1.0, float(np.max(np.abs(tail))))
    stationary = bool(np.all(np.abs(tail - tail[0]) <= slack))
    return PointwiseResult(k0, complex(s[k0 - 1]), evaluate(space, zeta, z), stationary)


def polarization_reconstruct(
    space: WeightedSpace,
    xi: Antifunctional,
    eta: Antifunctional,
    chain: SubspaceChain,
    tol: float = 1e-8,
    steps: int = 4_000_000,
) -> complex:
    """[xi|eta] from operator norms: 4[xi|eta] = sum_n i^(-n) ||xi + i^n eta||^2.

    Each squared norm is pinned to within ``tol``: a first estimate gives an
    upper bound U on the norm, and the final one is run at tol / (2U + 1).
    """
    total = 0j
    for n in range(4):
        phase = 1j ** n
        zeta = xi + phase * eta
        est = operator_norm_estimate(space, zeta, chain, steps, tol)
        if est.verdict is NormVerdict.GROWING:
            raise NotBounded(f"||xi + i^{n} eta|| did not settle within {steps} steps")
        upper = est.value + (est.error or 0.0)
        est = operator_norm_estimate(space, zeta, chain, steps, tol / (2.0 * upper + 1.0))
        if est.verdict is NormVerdict.GROWING:
            raise NotBounded(f"||xi + i^{n} eta|| did not settle within {steps} steps")
        total += est.value ** 2 / phase
    return total / 4


def _structurally_split(xi: Antifunctional, eta: Antifunctional, X: IndexSet) -> bool:
    Y = X.complement()
    hx, hy = xi.support_hull(), eta.support_hull()
    return (hx.issubset(X) and hy.issubset(Y)) or (hx.issubset(Y) and hy.issubset(X))


def split_partial_inner_product(
    space: WeightedSpace,
    xi: Antifunctional,
    eta: Antifunctional,
    X: IndexSet,
    tol: float = 1e-8,
    budget: int = DEFAULT_STEPS,
    schedule: tuple[int, int] = (1, 1),
    window: int = 8,
) -> EvaluationOutcome:
    """[xi|eta]_{X,Y}: the limit along subspaces that split as M_X ⊕ M_Y.

    If xi lives on X and eta on Y (or the reverse) then xi_M ∈ M_X and
    eta_M ∈ M_Y for every split M, so every approximant is exactly zero and
    the result is CONVERGED(0) with zero error.
    """
    chain = SubspaceChain.split(X, schedule)
    if _structurally_split(xi, eta, X):
        w = walk(space, chain, budget)
        w.grow()
        s = w.cross(xi, eta)
        if np.any(s != 0):
            raise ArithmeticError("split approximants should vanish identically")
        trace = Trace(w.dims.copy(), s, np.zeros(len(s)))
        return EvaluationOutcome(Verdict.CONVERGED, 0j, 0.0, True, trace)
    return partial_inner_product(space, xi, eta, chain, tol, window, budget)
