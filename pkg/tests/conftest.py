import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from slicecert import load_system


@pytest.fixture(scope="session")
def example1():
    return load_system("example1")


@pytest.fixture(scope="session")
def saddle():
    return load_system("saddle")


@pytest.fixture
def rng():
    return np.random.default_rng(7)
