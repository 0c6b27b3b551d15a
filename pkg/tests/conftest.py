import numpy as np
import pytest

from rcmsim import Euclidean, SO3


@pytest.fixture
def so3():
    return SO3()


@pytest.fixture
def r3():
    return Euclidean(3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
