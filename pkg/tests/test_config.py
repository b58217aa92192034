"""Config text format: parsing, validation, round-tripping."""

import pytest

from vicon.config import load_config, parse_config, serialize_config
from vicon.errors import ConfigError
from vicon.trainer import Phase

MINIMAL = """
topology.grid = 30
topology.retinae = 2
topology.rf = 9
topology.inhibition = 5
topology.leakage = 5
schedule.phases = 2000:0.01:1.0, 2000:0.01:0.5
data.mode = synthetic
run.outdir = out/x
"""


def test_parse_minimal():
    cfg = parse_config(MINIMAL)
    assert cfg.grid == (30,)
    assert cfg.retinae == 2
    assert cfg.phases == [Phase(2000, 0.01, 1.0), Phase(2000, 0.01, 0.5)]
    assert cfg.mode == "synthetic"
    assert cfg.seed == 0 and cfg.log_interval == 100


def test_parse_2d_shapes_and_anisotropic_sigma():
    text = MINIMAL.replace("topology.grid = 30", "topology.grid = 40x40") \
                  .replace("topology.rf = 9", "topology.rf = 3x3") \
                  .replace("topology.inhibition = 5", "topology.inhibition = 5x5") \
                  .replace("topology.leakage = 5", "topology.leakage = 3x3") \
        + "topology.sigma = 1.0x0.5\n"
    cfg = parse_config(text)
    assert cfg.grid == (40, 40)
    assert cfg.sigma == (1.0, 0.5)
    topo = cfg.to_topology()
    assert topo.grid_shape == (40, 40)
    assert topo.leakage_sigma == (1.0, 0.5)


def test_round_trip_is_semantically_identical():
    cfg = parse_config(MINIMAL + "topology.wrap = true\ndata.correlated = true\n")
    again = parse_config(serialize_config(cfg))
    assert again == cfg


def test_comments_and_blank_lines_ignored():
    cfg = parse_config("# header\n\n" + MINIMAL + "  # trailing comment line\n")
    assert cfg.grid == (30,)


@pytest.mark.parametrize("mutation, message", [
    ("nonsense line", "expected"),
    ("bogus.key = 1", "unknown key"),
    ("topology.grid = 3x", "bad shape"),
    ("schedule.phases = 100:0.01", "bad phase"),
    ("topology.wrap = perhaps", "bad boolean"),
    ("data.mode = tea", "data.mode"),
])
def test_bad_lines_rejected(mutation, message):
    if mutation.startswith(("data.mode", "schedule.phases", "topology.grid")):
        key = mutation.split("=")[0].strip()
        text = "\n".join(l for l in MINIMAL.splitlines() if not l.startswith(key))
        text += "\n" + mutation + "\n"
    else:
        text = MINIMAL + mutation + "\n"
    with pytest.raises(ConfigError, match=message):
        parse_config(text)


def test_missing_required_key_rejected():
    text = "\n".join(l for l in MINIMAL.splitlines() if "rf" not in l)
    with pytest.raises(ConfigError, match="topology.rf"):
        parse_config(text)


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config(MINIMAL + "run.outdir = elsewhere\n")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.cfg")


def test_shipped_configs_parse():
    import glob
    import os

    root = os.path.join(os.path.dirname(__file__), "..", "configs")
    paths = sorted(glob.glob(os.path.join(root, "*.cfg")))
    assert len(paths) >= 3
    for path in paths:
        cfg = load_config(path)
        cfg.to_topology()  # geometry must be buildable
        assert cfg.phases
