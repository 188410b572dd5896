import math

import numpy as np
import pytest

from antidual_lab import (
    Alternating,
    Constant,
    FiniteSupport,
    IndexSet,
    Indicator,
    NormVerdict,
    PowerLaw,
    Subspace,
    SubspaceChain,
    Vector,
    WeightedSpace,
    embed,
    evaluate,
    hyperplane_update,
    inner_product,
    mask,
    norm,
    operator_norm_estimate,
    orthonormalize,
    power_law_tail,
    project,
    riesz_restrict,
)

from conftest import random_space, random_vector

e = Vector.basis
IDX = np.arange(1, 101)


def close(a: Vector, b: Vector, tol=1e-12):
    return all(abs(a[i] - b[i]) <= tol for i in set(a.support) | set(b.support))


def dense_riesz(space, zeta, spanning):
    """Oracle: solve the Hermitian Gram system on the raw spanning set."""
    G = np.array([[inner_product(space, a, b) for b in spanning] for a in spanning])
    rhs = np.array([evaluate(space, zeta, s) for s in spanning])
    coef, *_ = np.linalg.lstsq(G, rhs, rcond=None)
    out = Vector()
    for c, s in zip(coef, spanning):
        out = out + complex(c) * s
    return out


def random_functional(rng):
    kind = rng.integers(0, 4)
    scale = complex(rng.standard_normal(), rng.standard_normal())
    if kind == 0:
        return FiniteSupport(random_vector(rng, max_support=10).coeffs)
    if kind == 1:
        return PowerLaw(float(rng.uniform(-1, 2)), scale)
    if kind == 2:
        return mask(Alternating(scale), IndexSet.residue(3, [0, 1]))
    return Constant(scale) + PowerLaw(1.0, 2j)


class TestEvaluate:
    def test_examples(self, flat):
        assert evaluate(flat, FiniteSupport({1: 1, 2: 2}), e(2)) == 2
        assert evaluate(flat, Constant(1), 1j * e(7)) == -1j
        assert evaluate(flat, PowerLaw(1.0), e(2) + e(4)) == 0.75

    def test_antilinear(self, rng, flat):
        for _ in range(50):
            z, x = random_functional(rng), random_vector(rng)
            lam = complex(*rng.standard_normal(2))
            assert evaluate(flat, z, lam * x) == pytest.approx(lam.conjugate() * evaluate(flat, z, x), abs=1e-10)

    def test_generators(self):
        assert Alternating(2).coefficients(np.array([1, 2, 3])).tolist() == [2, -2, 2]
        assert Indicator(IndexSet.finite([2])).coefficients(np.array([1, 2])).tolist() == [0, 1]
        assert PowerLaw(0.5).coefficient(4) == 0.5
        s = 2 * PowerLaw(1.0) - Constant(1)
        assert s.coefficient(2) == 0


class TestEmbed:
    def test_examples(self, flat):
        assert embed(flat, e(1)).coefficients(np.array([1, 2])).tolist() == [1, 0]
        assert embed(WeightedSpace(1, {2: 4}), e(2)).coefficient(2) == 4
        assert embed(flat, Vector()).coeffs == ()

    def test_reproduces_inner_product(self, rng):
        for _ in range(50):
            sp = random_space(rng)
            v, z = random_vector(rng), random_vector(rng)
            assert evaluate(sp, embed(sp, v), z) == pytest.approx(inner_product(sp, z, v), abs=1e-12)

    def test_exact_tail(self):
        sp = WeightedSpace(1, {2: 4})
        t = embed(sp, e(1) + e(2) + e(5)).tail(sp, np.array([0, 1, 2, 5]))
        # |c_i|^2/w_i = 1, 4, 1
        assert t.tolist() == [6, 5, 1, 0]


class TestMask:
    def test_examples(self):
        m = mask(Constant(1), IndexSet.even())
        assert m.coefficients(np.arange(1, 5)).tolist() == [0, 1, 0, 1]
        assert mask(m, IndexSet.even()) == m
        z = mask(m, IndexSet.odd())
        assert not np.any(z.coefficients(IDX))

    def test_tail_inherited(self, flat):
        z = PowerLaw(1.0, tail_bound=lambda n: 1 / n)
        assert mask(z, IndexSet.odd()).tail(flat, 10.0) == pytest.approx(0.1)
        assert mask(Constant(1), IndexSet.finite([3, 4])).tail(flat, 3) == 1


class TestRieszRestrict:
    def test_examples(self, flat):
        zM = riesz_restrict(flat, FiniteSupport({1: 1, 2: 2, 3: 3}), Subspace.coordinate(flat, [1, 2, 3]))
        assert close(zM, Vector({1: 1, 2: 2, 3: 3}))
        sp = WeightedSpace(1, {2: 4})
        zM = riesz_restrict(sp, FiniteSupport({1: 2, 2: 2}), Subspace.coordinate(sp, [1, 2]))
        assert close(zM, Vector({1: 2, 2: 0.5}))
        zM = riesz_restrict(flat, FiniteSupport({1: 1, 2: 3}), orthonormalize(flat, [e(1) + e(2)]))
        assert close(zM, 2 * e(1) + 2 * e(2))

    def test_matches_dense_oracle(self, rng):
        for _ in range(100):
            sp = random_space(rng)
            span = [random_vector(rng) for _ in range(int(rng.integers(1, 7)))]
            M = orthonormalize(sp, span)
            z = random_functional(rng)
            zM = riesz_restrict(sp, z, M)
            scale = max(1.0, norm(sp, zM))
            assert close(zM, dense_riesz(sp, z, span), 1e-9 * scale)
            for s in span:
                assert abs(evaluate(sp, z, s) - inner_product(sp, s, zM)) <= 1e-9 * scale * max(1, norm(sp, s))


class TestHyperplaneUpdate:
    def test_examples(self, flat):
        z = FiniteSupport({1: 1, 2: 2, 3: 5})
        assert hyperplane_update(flat, z, Vector({1: 1, 2: 2}), e(3)) == Vector({1: 1, 2: 2, 3: 5})
        assert hyperplane_update(flat, FiniteSupport({1: 1}), e(1), e(2)) == e(1)
        u = (e(2) + e(3)) / math.sqrt(2)
        got = hyperplane_update(flat, Constant(1), e(1), u)
        assert close(got, e(1) + e(2) + e(3), 1e-15)

    def test_agrees_with_restriction(self, rng):
        for _ in range(100):
            sp = random_space(rng)
            M = orthonormalize(sp, [random_vector(rng) for _ in range(4)])
            v = random_vector(rng)
            u = v - project(sp, v, M)
            if norm(sp, u) < 1e-6:
                continue
            u = u / norm(sp, u)
            N = Subspace(M.spanning + (u,), M.onb + (u,))
            z = random_functional(rng)
            got = hyperplane_update(sp, z, riesz_restrict(sp, z, M), u)
            want = riesz_restrict(sp, z, N)
            assert close(got, want, 1e-10 * max(1, norm(sp, want)))


class TestOperatorNorm:
    def test_finite_support_certified(self, flat):
        est = operator_norm_estimate(flat, FiniteSupport({1: 3, 2: 4}), SubspaceChain.prefix())
        assert est.verdict is NormVerdict.CERTIFIED
        assert est.value == 5 and est.steps == 2 and est.error == 0

    def test_basel(self, flat):
        z = PowerLaw(1.0, tail_bound=lambda n: 1 / n)
        est = operator_norm_estimate(flat, z, SubspaceChain.prefix(), 10_000, 1e-4)
        assert est.verdict is NormVerdict.CERTIFIED
        truth = math.pi / math.sqrt(6)
        assert est.value <= truth <= est.value + est.error
        assert abs(est.value - truth) < 1e-4

    def test_all_ones_grows(self, flat):
        est = operator_norm_estimate(flat, Constant(1), SubspaceChain.prefix(), 4096)
        assert est.verdict is NormVerdict.GROWING
        assert np.array_equal(est.squared, np.arange(1, 4097))
        assert np.array_equal(est.norms, np.sqrt(np.arange(1, 4097)))
        assert est.exponent == pytest.approx(0.5, abs=1e-6)

    def test_stabilized_without_tail(self, flat):
        est = operator_norm_estimate(flat, PowerLaw(2.0), SubspaceChain.prefix(), 10_000, 1e-8)
        assert est.verdict is NormVerdict.STABILIZED
        assert est.value == pytest.approx(math.pi ** 2 / math.sqrt(90), abs=1e-5)

    def test_monotone_on_general_chain(self, rng):
        sp = random_space(rng)
        M, subs = Subspace.zero(), []
        for _ in range(12):
            M = orthonormalize(sp, M.onb + (random_vector(rng),))
            subs.append(M)
        est = operator_norm_estimate(sp, Constant(1 + 1j), SubspaceChain.explicit(subs), 100, 1e-300)
        assert np.all(np.diff(est.norms) >= -1e-12)

    def test_square_summable_matches_closed_form(self):
        sp = WeightedSpace(1.0)
        rng = np.random.default_rng(1)
        for _ in range(10):
            s = float(rng.uniform(1.0, 3.0))
            z = PowerLaw(s, tail_bound=power_law_tail(s))
            est = operator_norm_estimate(sp, z, SubspaceChain.prefix(), 1_000_000, 1e-5)
            assert est.verdict is NormVerdict.CERTIFIED
            from scipy.special import zeta as hurwitz

            truth = math.sqrt(hurwitz(2 * s))
            assert est.value - 1e-12 <= truth <= est.value + est.error + 1e-12
