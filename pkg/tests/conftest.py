import numpy as np
import pytest
from hypothesis import strategies as st

from antidual_lab import Vector, WeightedSpace

MAX_INDEX = 64


@pytest.fixture
def flat():
    return WeightedSpace()


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


def random_vector(rng, max_index=MAX_INDEX, max_support=6, real=False):
    k = int(rng.integers(1, min(max_support, max_index) + 1))
    idx = rng.choice(np.arange(1, max_index + 1), size=k, replace=False)
    vals = rng.standard_normal(k) + (0 if real else 1j * rng.standard_normal(k))
    return Vector(dict(zip(idx.tolist(), vals.tolist())))


def random_space(rng, max_index=MAX_INDEX):
    n = int(rng.integers(0, min(10, max_index + 1)))
    idx = rng.choice(np.arange(1, max_index + 1), size=n, replace=False)
    w = np.exp(rng.uniform(-1.5, 1.5, size=n))
    return WeightedSpace(float(np.exp(rng.uniform(-0.5, 0.5))), dict(zip(idx.tolist(), w.tolist())))


finite_floats = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
complexes = st.builds(complex, finite_floats, finite_floats)
vectors = st.dictionaries(st.integers(1, 20), complexes, max_size=6).map(Vector)
spaces = st.builds(
    WeightedSpace,
    st.floats(0.1, 10),
    st.dictionaries(st.integers(1, 20), st.floats(0.1, 10), max_size=5),
)
