import numpy as np
import pytest

from cpn_bruhat.charts import PointSampler


@pytest.fixture
def sampler():
    return PointSampler(2024)


@pytest.fixture
def rng():
    return np.random.default_rng(99)
