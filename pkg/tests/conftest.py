import numpy as np
import pytest

from dissipation_lab.model import OscillatorParams


@pytest.fixture
def rng():
    return np.random.default_rng(20231016)


@pytest.fixture
def weak_damping():
    return OscillatorParams(m=1.0, gamma=0.2, k=1.0)


@pytest.fixture
def undamped():
    return OscillatorParams(m=1.0, gamma=0.0, k=1.0)
