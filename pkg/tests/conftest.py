import numpy as np
import pytest

from orthoarm.geometry import DhParams

FOUR_CUSP_ARM = DhParams(1, 2, 1.5, 1)
LONG_FOREARM_ARM = DhParams(1, 3, 4, 3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
