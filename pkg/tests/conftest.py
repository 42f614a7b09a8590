"""Shared fixtures: grids are immutable, so session scope is safe."""

import numpy as np
import pytest

from hamelflow import build_grid


@pytest.fixture(scope="session")
def grid():
    """Default working grid for module tests."""
    return build_grid(1e4, 48)


@pytest.fixture(scope="session")
def coarse_grid():
    return build_grid(1e4, 24)


@pytest.fixture()
def rng():
    return np.random.default_rng(2026)
