"""Binary checkpoint format: exactness, validation, corruption handling."""

import numpy as np
import pytest

from vicon.checkpoint import load_checkpoint, save_checkpoint
from vicon.errors import CheckpointError
from vicon.model import init_params
from vicon.topology import build_topology


def _topo():
    return build_topology(grid_shape=(6, 5), retina_shape=(6, 5), num_retinae=2,
                          rf_shape=(3, 3), inhibition_shape=(3, 3),
                          leakage_shape=(3, 3), leakage_sigma=(1.0, 0.5))


def test_round_trip_is_bit_exact(tmp_path):
    topo = _topo()
    params = init_params(topo, np.random.default_rng(0))
    path = tmp_path / "net.vicn"
    save_checkpoint(path, params, topo)
    loaded, rebuilt = load_checkpoint(path)
    np.testing.assert_array_equal(loaded.weights, params.weights)
    np.testing.assert_array_equal(loaded.biases, params.biases)
    np.testing.assert_array_equal(loaded.references, params.references)
    assert rebuilt.grid_shape == topo.grid_shape
    assert rebuilt.leakage_sigma == topo.leakage_sigma
    assert rebuilt.wrap == topo.wrap


def test_load_against_matching_topology(tmp_path):
    topo = _topo()
    params = init_params(topo, np.random.default_rng(1))
    path = tmp_path / "net.vicn"
    save_checkpoint(path, params, topo)
    loaded, same = load_checkpoint(path, topo)
    assert same is topo
    np.testing.assert_array_equal(loaded.weights, params.weights)


def test_shape_mismatch_names_both_shapes(tmp_path):
    topo = _topo()
    save_checkpoint(tmp_path / "net.vicn", init_params(topo, np.random.default_rng(2)), topo)
    other = build_topology(grid_shape=(5, 5), retina_shape=(5, 5), num_retinae=2,
                           rf_shape=(3, 3), inhibition_shape=(3, 3),
                           leakage_shape=(3, 3))
    with pytest.raises(CheckpointError, match=r"\(6, 5\).*\(5, 5\)"):
        load_checkpoint(tmp_path / "net.vicn", other)


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "bad.vicn"
    path.write_bytes(b"NOPE" + b"\x00" * 64)
    with pytest.raises(CheckpointError, match="magic"):
        load_checkpoint(path)


def test_truncated_file_rejected(tmp_path):
    topo = _topo()
    path = tmp_path / "net.vicn"
    save_checkpoint(path, init_params(topo, np.random.default_rng(3)), topo)
    blob = path.read_bytes()
    path.write_bytes(blob[: len(blob) // 2])
    with pytest.raises(CheckpointError, match="truncated"):
        load_checkpoint(path)


def test_missing_file_rejected(tmp_path):
    with pytest.raises(CheckpointError, match="cannot read"):
        load_checkpoint(tmp_path / "absent.vicn")
