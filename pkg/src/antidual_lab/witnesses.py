"""Constructive witnesses.

* A unit vector u attaining |<x|u><u|y>| = (1 + |<x|y>|)/2 >= 1/2 for unit x, y.
  This is the numerical radius of the rank-one operator z -> <x|z> y.
* The real numerical range of the same form: a closed interval of length one.
* Divergence certificates: nested subspaces M ⊂ M ⊕ Cu ⊂ ... along which
  <xi_M|eta_M> jumps by more than 1/2 at every step, so the approximant net
  of an unbounded pair is not Cauchy.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExhausted, NotReal, NotUnit
from .functionals import Antifunctional, evaluate, riesz_restrict
from .space import (
    TAU_ONB,
    Subspace,
    Vector,
    WeightedSpace,
    direct_sum,
    inner_product,
    norm,
    orthonormalize,
)

__all__ = [
    "numerical_radius_witness",
    "real_range_interval",
    "sample_real_range",
    "real_range_extremes",
    "DivergenceStep",
    "DivergenceCertificate",
    "divergence_step",
    "divergence_certificate",
    "check_certificate",
]


def _require_unit(space: WeightedSpace, *vectors: Vector) -> None:
    for v in vectors:
        if abs(norm(space, v) - 1.0) > 1e-10:
            raise NotUnit(f"expected a unit vector, got norm {norm(space, v)!r}")


def numerical_radius_witness(space: WeightedSpace, x: Vector, y: Vector) -> tuple[Vector, float]:
    """Return (u, |<x|u><u|y>|) with u a unit vector and value (1 + |<x|y>|)/2.

    Rotating y by the phase of <x|y> makes <x|y'> = |<x|y>| >= 0, so
    ||x + y'||^2 = 2 + 2|<x|y>| >= 2 and u = (x + y')/||x + y'|| is always
    defined.
    """
    _require_unit(space, x, y)
    c = inner_product(space, x, y)
    theta = cmath.phase(c) if c != 0 else 0.0
    s = x + cmath.exp(-1j * theta) * y
    u = s / norm(space, s)
    value = abs(inner_product(space, x, u) * inner_product(space, u, y))
    return u, value


def _require_real(*vectors: Vector) -> None:
    for v in vectors:
        if not v.is_real():
            raise NotReal("expected real coefficients")


def real_range_interval(space: WeightedSpace, x: Vector, y: Vector) -> tuple[float, float]:
    """The set of (x|u)(u|y) over real unit u: [((x|y) - 1)/2, ((x|y) + 1)/2]."""
    _require_unit(space, x, y)
    _require_real(x, y)
    c = inner_product(space, x, y).real
    return (c - 1.0) / 2.0, (c + 1.0) / 2.0


def _fresh_index(*vectors: Vector) -> int:
    used = set()
    for v in vectors:
        used.update(v.support)
    m = 1
    while m in used:
        m += 1
    return m


def _real_span(space: WeightedSpace, x: Vector, y: Vector) -> Subspace:
    m = _fresh_index(x, y)
    return orthonormalize(space, [x, y, Vector.basis(m)])


def sample_real_range(space: WeightedSpace, x: Vector, y: Vector, n_samples: int = 10_000,
                      rng: np.random.Generator | None = None) -> np.ndarray:
    """(x|u)(u|y) for random real unit u in span{x, y, e_m}, e_m orthogonal to both."""
    _require_unit(space, x, y)
    _require_real(x, y)
    rng = np.random.default_rng() if rng is None else rng
    W = _real_span(space, x, y)
    a = np.array([inner_product(space, b, x).real for b in W.onb])
    b = np.array([inner_product(space, bb, y).real for bb in W.onb])
    coords = rng.standard_normal((n_samples, W.dim))
    coords /= np.linalg.norm(coords, axis=1, keepdims=True)
    # in ONB coordinates (x|u) = a.c and (u|y) = b.c
    return (coords @ a) * (coords @ b)


def real_range_extremes(space: WeightedSpace, x: Vector, y: Vector) -> tuple[tuple[float, Vector], tuple[float, Vector]]:
    """Minimize and maximize (x|u)(u|y) over real unit u in span{x, y, e_m}.

    The form is u^T S u with S = (a b^T + b a^T)/2 in ONB coordinates, so the
    extremes are the extreme eigenpairs of S.
    """
    _require_unit(space, x, y)
    _require_real(x, y)
    W = _real_span(space, x, y)
    a = np.array([inner_product(space, b, x).real for b in W.onb])
    b = np.array([inner_product(space, bb, y).real for bb in W.onb])
    S = 0.5 * (np.outer(a, b) + np.outer(b, a))
    evals, evecs = np.linalg.eigh(S)

    def lift(c):
        out = Vector()
        for coef, basis in zip(c, W.onb):
            out = out + float(coef) * basis
        return out

    lo, hi = lift(evecs[:, 0]), lift(evecs[:, -1])
    value = lambda u: (inner_product(space, x, u) * inner_product(space, u, y)).real  # noqa: E731
    return (value(lo), lo), (value(hi), hi)


@dataclass(frozen=True)
class DivergenceStep:
    M: Subspace
    u: Vector
    jump: complex


@dataclass(frozen=True)
class DivergenceCertificate:
    """Nested extensions M -> M ⊕ Cu with |conj(xi(u)) eta(u)| >= jump_floor each."""

    base: Subspace
    steps: tuple[DivergenceStep, ...]
    jump_floor: float

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def final(self) -> Subspace:
        if not self.steps:
            return self.base
        last = self.steps[-1]
        return Subspace(last.M.spanning + (last.u,), last.M.onb + (last.u,))

    def to_json(self) -> dict:
        def vec(v: Vector) -> dict:
            return {
                "support": list(v.support),
                "re": [v[i].real for i in v.support],
                "im": [v[i].imag for i in v.support],
            }

        return {
            "base_dim": self.base.dim,
            "base_onb": [vec(b) for b in self.base.onb],
            "jump_floor": self.jump_floor,
            "steps": [
                {"dim": s.M.dim, "u": vec(s.u), "jump_re": s.jump.real, "jump_im": s.jump.imag}
                for s in self.steps
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "DivergenceCertificate":
        def vec(d: dict) -> Vector:
            return Vector({i: complex(r, m) for i, r, m in zip(d["support"], d["re"], d["im"])})

        base = Subspace.from_onb(vec(b) for b in data["base_onb"])
        M = base
        steps = []
        for s in data["steps"]:
            u = vec(s["u"])
            steps.append(DivergenceStep(M, u, complex(s["jump_re"], s["jump_im"])))
            M = Subspace(M.spanning + (u,), M.onb + (u,))
        return cls(base, tuple(steps), float(data["jump_floor"]))


def divergence_step(
    space: WeightedSpace,
    xi: Antifunctional,
    eta: Antifunctional,
    M: Subspace,
    lower: float = 1.0,
    cap: int = 10_000,
) -> tuple[Vector, Subspace]:
    """Find a unit u ⊥ M with |conj(xi(u)) eta(u)| > lower^2 / 2.

    Fresh basis vectors (lowest indices outside the support of M, hence
    orthogonal to M) are collected into L until ||xi_L|| and ||eta_L|| both
    exceed ``lower``; the numerical-radius witness for the normalized
    representatives then gives u in L.  Raises BudgetExhausted if ``cap``
    fresh indices are not enough.
    """
    used = M.support
    picked: list[int] = []
    nx = ny = 0.0
    i = 0
    while not (nx > lower ** 2 and ny > lower ** 2):
        i += 1
        if i in used:
            continue
        if len(picked) >= cap:
            raise BudgetExhausted(f"no norm growth past {lower} within {cap} fresh indices")
        picked.append(i)
        w = space.weight(i)
        cx, cy = xi.coefficient(i), eta.coefficient(i)
        nx += (cx.real ** 2 + cx.imag ** 2) / w
        ny += (cy.real ** 2 + cy.imag ** 2) / w
    L = Subspace.coordinate(space, picked)
    xL, yL = riesz_restrict(space, xi, L), riesz_restrict(space, eta, L)
    u, _ = numerical_radius_witness(space, xL / norm(space, xL), yL / norm(space, yL))
    N = direct_sum(space, M, Subspace((u,), (u,)))
    return u, N


def divergence_certificate(
    space: WeightedSpace,
    xi: Antifunctional,
    eta: Antifunctional,
    M0: Subspace | None = None,
    k: int = 5,
    cap: int = 10_000,
) -> DivergenceCertificate:
    """Chain k divergence steps from M0 with lower = 1; every jump exceeds 1/2."""
    M = M0 or Subspace.zero()
    base = M
    steps = []
    for _ in range(k):
        u, N = divergence_step(space, xi, eta, M, 1.0, cap)
        jump = evaluate(space, xi, u).conjugate() * evaluate(space, eta, u)
        steps.append(DivergenceStep(M, u, jump))
        M = N
    return DivergenceCertificate(base, tuple(steps), 0.5)


def check_certificate(
    space: WeightedSpace,
    cert: DivergenceCertificate,
    xi: Antifunctional,
    eta: Antifunctional,
    tol: float = 1e-10,
) -> list[str]:
    """Re-validate a certificate from its data alone; returns the list of failures.

    For every step: u is a unit vector orthogonal to M, the recorded jump is
    the cross term conj(xi(u)) eta(u), it equals <xi_N|eta_N> - <xi_M|eta_M>
    recomputed from scratch with N = M ⊕ Cu, its modulus is at least the
    floor, and the next M contains N.
    """
    problems = []
    prev_N: Subspace | None = None
    if not cert.base.is_orthonormal(space):
        problems.append("base basis is not orthonormal")
    for j, s in enumerate(cert.steps):
        M, u = s.M, s.u
        if prev_N is None:
            if not M.contains_subspace(space, cert.base):
                problems.append(f"step {j}: M does not contain the base")
        elif not M.contains_subspace(space, prev_N):
            problems.append(f"step {j}: M does not contain the previous M ⊕ Cu")
        if abs(norm(space, u) - 1.0) > TAU_ONB:
            problems.append(f"step {j}: u is not a unit vector")
        if any(abs(inner_product(space, b, u)) > TAU_ONB for b in M.onb):
            problems.append(f"step {j}: u is not orthogonal to M")
        cross = evaluate(space, xi, u).conjugate() * evaluate(space, eta, u)
        if abs(cross - s.jump) > tol * max(1.0, abs(cross)):
            problems.append(f"step {j}: recorded jump differs from conj(xi(u)) eta(u)")
        N = Subspace(M.spanning + (u,), M.onb + (u,))
        before = inner_product(space, riesz_restrict(space, xi, M), riesz_restrict(space, eta, M))
        after = inner_product(space, riesz_restrict(space, xi, N), riesz_restrict(space, eta, N))
        if abs((after - before) - s.jump) > tol * max(1.0, abs(before), abs(after)):
            problems.append(f"step {j}: jump is not the change in <xi_M|eta_M>")
        if abs(s.jump) < cert.jump_floor - 1e-12:
            problems.append(f"step {j}: |jump| = {abs(s.jump)} below floor {cert.jump_floor}")
        prev_N = N
    return problems
