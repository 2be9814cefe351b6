import numpy as np
import pytest

from shadowcap.linalg import RngSeed, haar_orthogonal



@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def haar():
    def draw(n, seed=0):
        return haar_orthogonal(2 * n, RngSeed(seed))

    return draw
