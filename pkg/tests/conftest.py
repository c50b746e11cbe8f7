import numpy as np
import pytest


@pytest.fixture(params=["numpy", "numba"])
def backend(request, monkeypatch):
    """Run the decorated test once per kernel backend."""
    monkeypatch.setenv("SVF_BACKEND", request.param)
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
