from fractions import Fraction

import numpy as np
import pytest

from cvcorr.gaussian import PartitionedCovariance

THIRD = Fraction(1, 3)

# three single-mode parties A, B, C
EXAMPLE_EXACT = [
    [2, 0, 1, 0, THIRD, 0],
    [0, 2, 0, 1, 0, THIRD],
    [1, 0, 3, 0, 1, 0],
    [0, 1, 0, 3, 0, 1],
    [THIRD, 0, 1, 0, 2, 0],
    [0, THIRD, 0, 1, 0, 2],
]


@pytest.fixture
def example_exact():
    return [row[:] for row in EXAMPLE_EXACT]


@pytest.fixture
def example_state():
    return PartitionedCovariance(np.array(EXAMPLE_EXACT, dtype=float), [[0], [1], [2]])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_pd(rng, dim, shift=0.5):
    g = rng.standard_normal((dim, dim))
    return g @ g.T + shift * np.eye(dim)
