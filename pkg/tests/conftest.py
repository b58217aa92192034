import numpy as np
import pytest

from vicon.topology import build_topology


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_topo():
    """1-D net, 9 neurons, truncated windows: the workhorse test geometry."""
    return build_topology(grid_shape=9, retina_shape=9, num_retinae=1,
                          rf_shape=3, inhibition_shape=3, leakage_shape=3,
                          leakage_sigma=1.0)


@pytest.fixture
def paper_1d_topo():
    """The 1-D dominance-stripe geometry: M=30, RF 9, N 5, L 5."""
    return build_topology(grid_shape=30, retina_shape=30, num_retinae=2,
                          rf_shape=9, inhibition_shape=5, leakage_shape=5,
                          leakage_sigma=1.0)
