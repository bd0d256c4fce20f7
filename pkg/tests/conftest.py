import numpy as np
import pytest

from qpbeam.fourier import TruncationBox
from qpbeam.frequency import golden_frequency


@pytest.fixture
def box():
    return TruncationBox(2, 1, 8, 2)


@pytest.fixture
def omega():
    return golden_frequency()


@pytest.fixture
def rng():
    return np.random.default_rng(7)
