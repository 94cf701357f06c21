import os

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=100, deadline=None)
settings.register_profile("ci", max_examples=50, deadline=None)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def separated_instance():
    """10 well-separated points: Gram near identity, smallest eigenvalue near 1."""
    from splitsvm.data import Dataset
    from splitsvm.kernels import KernelSpec, gram

    pts = np.array([[i * 5.0, j * 5.0] for i in range(5) for j in range(2)])
    y = np.where(pts[:, 0] > 10, 1.0, -1.0)
    spec = KernelSpec("gaussian", 1.0)
    return Dataset(pts, y), spec, gram(spec, pts)
