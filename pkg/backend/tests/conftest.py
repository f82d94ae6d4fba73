import os

# Settings are read at import time; point the app at an in-memory database and a single worker
os.environ["SSGA_DATABASE_URL"] = "sqlite://"
os.environ["SSGA_WORKERS"] = "1"

import numpy as np
import pytest

from app.services.operators import Genome, Population


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def make_population():
    def _make(*bitstrings, capacity=None):
        return Population([Genome.from_string(s) for s in bitstrings], capacity=capacity)

    return _make
