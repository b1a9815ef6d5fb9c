import json
import sys

import pytest
from loguru import logger

from glstep.main import EXIT_OK, EXIT_USAGE, main


@pytest.fixture(autouse=True)
def restore_logging():
    yield
    logger.remove()
    logger.add(sys.stderr, level="WARNING")


def summary(path):
    return json.loads(path.with_name(path.name + ".summary.json").read_text())


class TestUsageErrors:
    @pytest.mark.parametrize(
        "argv",
        [
            ["degennes", "--grid", ""],
            ["degennes", "--grid", "1:0:0.1"],
            ["fiber", "--a", "0"],
            ["fiber", "--a", "1.5"],
            ["strip", "--a=-1", "--b", "1.2", "--m", "3"],
            ["strip", "--a=-1", "--b", "0.9"],
            ["gl1d", "--a", "0.5", "--b", "3"],
            ["surface", "--grid", "0.5,1.2"],
            ["phase", "--a=-1", "--grid", "1.2", "--geometry", "1,1"],
            ["degennes", "--grid", "0", "--bogus", "1"],
            ["nosuchcommand"],
        ],
    )
    def test_exit_code(self, argv):
        assert main(argv) == EXIT_USAGE

    def test_missing_config_file(self, tmp_path):
        assert main(["degennes", "--grid", "0", "--config", str(tmp_path / "missing.ini")]) == EXIT_USAGE


class TestCommands:
    def test_degennes_writes_table_and_record(self, tmp_path):
        out = tmp_path / "theta.csv"
        assert main(["degennes", "--grid", "0", "--spacing", "0.02", "--out", str(out)]) == EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0] == "gamma,theta,xi_star,phi0"
        assert len(lines) == 2
        record = summary(out)
        assert record["command"] == "degennes"
        assert record["outputs"]["theta0"] == pytest.approx(0.5901, abs=1e-2)
        assert record["inputs"]["grid"] == [0.0]
        assert "wall_time" not in record["provenance"]

    def test_fiber_positive_a_has_no_minimizer(self, tmp_path):
        out = tmp_path / "fiber.json"
        argv = ["fiber", "--a", "0.5", "--grid", "0,1", "--spacing", "0.02", "--format", "json", "--out", str(out)]
        assert main(argv) == EXIT_OK
        assert [row["xi"] for row in json.loads(out.read_text())] == [0.0, 1.0]
        outputs = summary(out)["outputs"]
        assert outputs["beta"] == 0.5
        assert outputs["zeta"] is None

    def test_gl1d_above_threshold_is_trivial(self, tmp_path):
        out = tmp_path / "gl1d.csv"
        assert main(["gl1d", "--a=-1", "--b", "2", "--out", str(out)]) == EXIT_OK
        outputs = summary(out)["outputs"]
        assert outputs["trivial"] is True
        assert outputs["energy"] == 0.0
        assert outputs["xi0"] is None

    def test_barrier_positive_a_is_trivial(self, tmp_path):
        out = tmp_path / "barrier.csv"
        assert main(["barrier", "--a", "0.5", "--b", "2.5", "--out", str(out)]) == EXIT_OK
        assert out.read_text() == "R,g,g_over_R\n"
        outputs = summary(out)["outputs"]
        assert outputs["trivial"] is True
        assert outputs["e_best"] == 0.0

    def test_phase_table(self, tmp_path):
        out = tmp_path / "phase.csv"
        argv = ["phase", "--a", "0.5,0.8", "--grid", "1.5,2.5", "--spacing", "0.02", "--out", str(out)]
        assert main(argv) == EXIT_OK
        assert [t["family"] for t in summary(out)["outputs"]["thresholds"]] == ["aligned-weak", "aligned-strong"]
        rows = out.read_text().splitlines()
        assert rows[0] == "a,b,barrier,bnd1,bnd2,regime,EL"
        assert rows[1].startswith("0.5,1.5,,,,bulk")

    def test_stdout(self, capsys):
        assert main(["degennes", "--grid", "0", "--spacing", "0.02", "--stdout"]) == EXIT_OK
        assert capsys.readouterr().out.startswith("gamma,theta,xi_star,phi0\n")

    def test_timing_is_opt_in(self, tmp_path):
        out = tmp_path / "timed.csv"
        assert main(["degennes", "--grid", "0", "--spacing", "0.02", "--timing", "--out", str(out)]) == EXIT_OK
        assert summary(out)["provenance"]["wall_time"] > 0


@pytest.mark.parametrize(
    "argv",
    [
        ["degennes", "--grid", "0,0.5", "--spacing", "0.02"],
        ["fiber", "--a=-1", "--grid=-1:0:0.5", "--spacing", "0.02"],
        ["gl1d", "--a=-1", "--b", "1.2", "--spacing", "0.02"],
        ["surface", "--grid", "1.2,2", "--spacing", "0.02"],
        ["strip", "--a=-1", "--b", "1.2", "--R", "6", "--m", "4", "--hx", "0.25", "--hy", "0.25"],
        pytest.param(
            ["barrier", "--a=-1", "--b", "1.2", "--schedule", "6,8", "--hx", "0.25", "--hy", "0.25"]
            + ["--spacing", "0.02"],
            marks=pytest.mark.slow,
        ),
        ["phase", "--a=-1,0.5,0.8", "--grid", "1.5,2.5", "--spacing", "0.02"],
    ],
    ids=lambda argv: argv[0],
)
def test_reruns_are_byte_identical(tmp_path, argv):
    paths = [tmp_path / "first.csv", tmp_path / "second.csv"]
    for path in paths:
        assert main(argv + ["--out", str(path)]) == EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert summary(paths[0]) == summary(paths[1])
    assert summary(paths[0])["command"] == argv[0]


class TestConfigFile:
    def test_sections_and_override(self, tmp_path):
        config = tmp_path / "run.ini"
        config.write_text("[global]\nspacing = 0.02\nlog_level = WARNING\n\n[degennes]\ngrid = 0,0.5\n")
        out = tmp_path / "theta.csv"
        assert main(["degennes", "--config", str(config), "--out", str(out)]) == EXIT_OK
        assert summary(out)["inputs"]["grid"] == [0.0, 0.5]
        assert summary(out)["inputs"]["spacing"] == 0.02

        assert main(["degennes", "--config", str(config), "--grid", "0", "--out", str(out)]) == EXIT_OK
        assert summary(out)["inputs"]["grid"] == [0.0]

    def test_environment_variable(self, tmp_path, monkeypatch):
        config = tmp_path / "run.ini"
        config.write_text("[degennes]\ngrid = 0\nspacing = 0.02\n")
        monkeypatch.setenv("GLSTEP_CONFIG", str(config))
        out = tmp_path / "theta.csv"
        assert main(["degennes", "--out", str(out)]) == EXIT_OK
        assert summary(out)["inputs"]["spacing"] == 0.02
