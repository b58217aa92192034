"""End-to-end command-line behaviour: artifacts, exit codes, determinism."""

import os
import time

from vicon.cli import main
from vicon.imageio import load_pgm

TINY = """
topology.grid = 12
topology.retinae = 2
topology.rf = 5
topology.inhibition = 3
topology.leakage = 3
schedule.phases = 150:0.01:1.0
data.mode = synthetic
run.seed = 9
run.outdir = {outdir}
run.log_interval = 50
"""

TINY_2D = """
topology.grid = 8x8
topology.retinae = 1
topology.rf = 5x5
topology.inhibition = 3x3
topology.leakage = 3x3
schedule.phases = 200:0.01:1.0
data.mode = procedural
data.seed = 3
data.size = 32x32
run.seed = 4
run.outdir = {outdir}
run.log_interval = 100
"""


def _write_cfg(tmp_path, template, name="exp.cfg", **kw):
    path = tmp_path / name
    path.write_text(template.format(**kw))
    return str(path)


class TestTrain:
    def test_train_writes_expected_artifacts(self, tmp_path, capsys):
        outdir = tmp_path / "run"
        cfg = _write_cfg(tmp_path, TINY, outdir=outdir)
        assert main(["train", cfg]) == 0
        for name in ("checkpoint.vicn", "objective_trace.csv",
                     "ocularity.csv", "ocularity_signed.csv"):
            assert (outdir / name).exists(), name
        out = capsys.readouterr().out
        assert "update" in out and "stripes:" in out

        trace = (outdir / "objective_trace.csv").read_text().splitlines()
        assert trace[0] == "update,phase,objective"
        assert trace[1].startswith("50,0,")

        ocularity = (outdir / "ocularity.csv").read_text().splitlines()
        assert ocularity[0] == "index,left,right"
        assert len(ocularity) == 13

    def test_train_2d_writes_images(self, tmp_path):
        outdir = tmp_path / "run2d"
        cfg = _write_cfg(tmp_path, TINY_2D, outdir=outdir)
        assert main(["train", cfg]) == 0
        for name in ("montage.pgm", "input.pgm", "posterior.pgm",
                     "reconstruction.pgm"):
            assert (outdir / name).exists(), name
        assert load_pgm(outdir / "posterior.pgm").shape == (8, 8)

    def test_bad_config_exits_one(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("topology.grid = 12\n")
        assert main(["train", str(bad)]) == 1
        assert "config error" in capsys.readouterr().err

    def test_missing_texture_exits_two(self, tmp_path, capsys):
        cfg = _write_cfg(
            tmp_path,
            TINY.replace("data.mode = synthetic",
                         "data.mode = texture\ndata.texture = nowhere.pgm"),
            outdir=tmp_path / "x")
        assert main(["train", cfg]) == 2
        assert "data error" in capsys.readouterr().err

    def test_usage_error_exits_one(self, capsys):
        assert main(["train"]) == 1
        assert "usage error" in capsys.readouterr().err


class TestAnalyze:
    def test_analyze_reproduces_train_outputs_byte_for_byte(self, tmp_path):
        outdir = tmp_path / "run"
        cfg = _write_cfg(tmp_path, TINY_2D, outdir=outdir)
        assert main(["train", cfg]) == 0
        redo = tmp_path / "redo"
        assert main(["analyze", str(outdir / "checkpoint.vicn"), cfg,
                     "--outdir", str(redo)]) == 0
        names = ["montage.pgm", "input.pgm", "posterior.pgm", "reconstruction.pgm"]
        for name in names:
            assert (redo / name).read_bytes() == (outdir / name).read_bytes(), name

    def test_missing_checkpoint_exits_two(self, tmp_path, capsys):
        cfg = _write_cfg(tmp_path, TINY, outdir=tmp_path / "y")
        assert main(["analyze", str(tmp_path / "none.vicn"), cfg]) == 2
        assert "data error" in capsys.readouterr().err

    def test_topology_mismatch_reports_both_shapes(self, tmp_path, capsys):
        outdir = tmp_path / "run"
        cfg = _write_cfg(tmp_path, TINY, outdir=outdir)
        assert main(["train", cfg]) == 0
        other = _write_cfg(tmp_path, TINY.replace("topology.grid = 12",
                                                  "topology.grid = 14"),
                           name="other.cfg", outdir=tmp_path / "z")
        assert main(["analyze", str(outdir / "checkpoint.vicn"), other]) == 2
        err = capsys.readouterr().err
        assert "12" in err and "14" in err


class TestVerify:
    def test_verify_passes_quickly(self, capsys):
        start = time.time()
        assert main(["verify"]) == 0
        elapsed = time.time() - start
        out = capsys.readouterr().out
        assert out.count("PASS") >= 7 and "FAIL" not in out
        assert elapsed < 60.0


class TestGenTexture:
    def test_writes_loadable_graymap(self, tmp_path):
        out = tmp_path / "tex.pgm"
        assert main(["gen-texture", "7", str(out), "--size", "48x32"]) == 0
        image = load_pgm(out)
        assert image.shape == (48, 32)
        assert image.min() >= 0.0 and image.max() <= 1.0

    def test_seeded_output_reproducible(self, tmp_path):
        a, b = tmp_path / "a.pgm", tmp_path / "b.pgm"
        main(["gen-texture", "5", str(a)])
        main(["gen-texture", "5", str(b)])
        assert a.read_bytes() == b.read_bytes()


def test_train_twice_is_bit_identical(tmp_path):
    """Same seed and config give byte-identical artifacts."""
    digests = []
    for tag in ("one", "two"):
        outdir = tmp_path / tag
        cfg = _write_cfg(tmp_path, TINY, name=f"{tag}.cfg", outdir=outdir)
        assert main(["train", cfg]) == 0
        digests.append({
            name: (outdir / name).read_bytes()
            for name in sorted(os.listdir(outdir))
        })
    assert sorted(digests[0]) == sorted(digests[1])
    for name in digests[0]:
        assert digests[0][name] == digests[1][name], name
