import math

import numpy as np
import pytest
from hypothesis import given

from antidual_lab import (
    TAU_ONB,
    NotOrthogonal,
    Subspace,
    Vector,
    WeightedSpace,
    direct_sum,
    extend,
    inner_product,
    norm,
    orthonormalize,
    project,
)

from conftest import complexes, random_space, random_vector, spaces, vectors

e = Vector.basis


def close(a: Vector, b: Vector, tol=1e-12):
    keys = set(a.support) | set(b.support)
    return all(abs(a[i] - b[i]) <= tol for i in keys)


class TestVector:
    def test_exact_zeros_dropped(self):
        assert Vector({1: 1, 2: 0}) == Vector({1: 1})
        assert Vector({3: 0}).support == ()

    def test_indices_start_at_one(self):
        with pytest.raises(ValueError):
            Vector({0: 1})

    def test_arithmetic(self):
        v = e(1) + 1j * e(2)
        assert v[2] == 1j
        assert (v - v) == Vector()
        assert (2 * v)[1] == 2
        assert (v / 2)[2] == 0.5j


class TestInnerProduct:
    def test_examples(self, flat):
        assert inner_product(flat, e(1), e(1)) == 1
        assert inner_product(flat, e(1) + 1j * e(2), e(2)) == -1j
        assert inner_product(WeightedSpace(1, {3: 1 / 9}), e(3), e(3)) == 1 / 9

    def test_norm_examples(self, flat):
        assert norm(flat, 3 * e(4)) == 3
        assert norm(flat, e(1) + e(2)) == math.sqrt(2)
        assert norm(WeightedSpace(1, {2: 4}), e(1) + e(2)) == pytest.approx(math.sqrt(5), abs=1e-15)

    @given(spaces, vectors, vectors)
    def test_hermitian(self, sp, x, y):
        assert abs(inner_product(sp, x, y) - inner_product(sp, y, x).conjugate()) <= 1e-12 * (
            1 + norm(sp, x) * norm(sp, y))

    @given(spaces, vectors, vectors, complexes)
    def test_sesquilinear(self, sp, x, y, lam):
        scale = 1e-12 * (1 + abs(lam)) * (1 + norm(sp, x) * norm(sp, y))
        assert abs(inner_product(sp, lam * x, y) - lam.conjugate() * inner_product(sp, x, y)) <= scale
        assert abs(inner_product(sp, x, lam * y) - lam * inner_product(sp, x, y)) <= scale

    @given(spaces, vectors, vectors)
    def test_cauchy_schwarz(self, sp, x, y):
        assert abs(inner_product(sp, x, y)) <= norm(sp, x) * norm(sp, y) * (1 + 1e-12) + 1e-300

    @given(spaces, vectors)
    def test_norm_zero_iff_zero(self, sp, x):
        assert (norm(sp, x) == 0) == (not x)


class TestOrthonormalize:
    def test_dependent_input(self, flat):
        S = orthonormalize(flat, [e(1), e(1)])
        assert S.dim == 1 and S.onb == (e(1),)

    def test_hand_gram_schmidt(self, flat):
        S = orthonormalize(flat, [e(1) + e(2), e(1) - e(2)])
        r = 1 / math.sqrt(2)
        assert S.dim == 2
        assert close(S.onb[0], r * e(1) + r * e(2))
        assert close(S.onb[1], r * e(1) - r * e(2))

    def test_empty(self, flat):
        assert orthonormalize(flat, []).dim == 0

    def test_gram_is_identity(self, rng):
        for _ in range(50):
            sp = random_space(rng)
            vs = [random_vector(rng) for _ in range(int(rng.integers(1, 8)))]
            vs.append(vs[0] + 2j * vs[-1])  # dependent
            S = orthonormalize(sp, vs)
            assert S.dim <= len(vs) - 1
            assert S.is_orthonormal(sp, TAU_ONB)
            assert all(S.contains(sp, v) for v in vs)

    def test_near_dependent_dropped(self, flat):
        S = orthonormalize(flat, [e(1), e(1) + 1e-12 * e(2)])
        assert S.dim == 1


class TestExtendProjectSum:
    def test_extend_examples(self, flat):
        S = Subspace.coordinate(flat, [1])
        assert extend(flat, S, e(1)) == (S, None)
        N, u = extend(flat, S, e(1) + e(2))
        assert N.dim == 2 and close(u, e(2))
        N, u = extend(flat, Subspace.zero(), 2 * e(3))
        assert N.dim == 1 and u == e(3)

    def test_project_examples(self, flat):
        assert project(flat, e(1) + e(2), Subspace.coordinate(flat, [1])) == e(1)
        assert project(flat, e(3), Subspace.coordinate(flat, [1, 2])) == Vector()
        S = orthonormalize(flat, [e(1) + 1j * e(5), e(2)])
        v = 3 * (e(1) + 1j * e(5)) - e(2)
        assert close(project(flat, v, S), v, 1e-10)

    def test_projection_pythagoras(self, rng):
        for _ in range(100):
            sp = random_space(rng)
            S = orthonormalize(sp, [random_vector(rng) for _ in range(4)])
            v = random_vector(rng)
            p = project(sp, v, S)
            lhs = norm(sp, v) ** 2
            assert lhs == pytest.approx(norm(sp, p) ** 2 + norm(sp, v - p) ** 2, abs=1e-10 * max(1, lhs))
            assert norm(sp, p) <= norm(sp, v) * (1 + 1e-12)
            assert close(project(sp, p, S), p, 1e-10 * max(1, norm(sp, v)))

    def test_direct_sum(self, flat):
        A, B = Subspace.coordinate(flat, [1]), Subspace.coordinate(flat, [2])
        assert direct_sum(flat, A, B).onb == (e(1), e(2))
        assert direct_sum(flat, Subspace.zero(), A) == A
        with pytest.raises(NotOrthogonal):
            direct_sum(flat, A, orthonormalize(flat, [e(1) + e(2)]))


class TestWeightedSpace:
    def test_positive(self):
        with pytest.raises(ValueError):
            WeightedSpace(0)
        with pytest.raises(ValueError):
            WeightedSpace(1, {3: 0})

    def test_vectorized_weights(self):
        sp = WeightedSpace(2.0, {3: 5.0, 7: 0.5})
        assert sp.weights(np.array([1, 3, 7, 8])).tolist() == [2.0, 5.0, 0.5, 2.0]
        assert sp.min_weight == 0.5


def test_norm_survives_extreme_scales(flat):
    assert norm(flat, Vector({1: 3e-300, 2: 4e-300j})) == pytest.approx(5e-300)
    assert norm(flat, Vector({1: 3e300, 2: 4e300})) == pytest.approx(5e300)
