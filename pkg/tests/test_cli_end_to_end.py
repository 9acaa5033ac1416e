"""
End-to-end runs of the command-line interface.
"""

import csv

import orjson
import pytest

from beamscint.src.io.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, EXIT_ROW_FAILURES, run_cli
from beamscint.src.pipeline.models import SweepRow

CHANNEL = """\
# fig2 channel, short paths
cn2 = 1e-14
l0 = 6.283185307179586e-3
q0 = 1e7
r0 = 0.01
z = 1000
axis = z
grid = 200, 400
mc_samples = 2000
tol = 1e-6
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(CHANNEL)
    return path


def run(config, output, cache, *extra):
    return run_cli(["--config", str(config), "--output", str(output), "--cache", str(cache), *extra])


class TestRun:
    """Successful runs and their artifacts."""

    def test_writes_csv_and_sidecar(self, config_file, tmp_path):
        """A run writes an LF-only CSV with the row columns and a sidecar."""
        output = tmp_path / "out.csv"
        assert run(config_file, output, tmp_path / "cache") == EXIT_OK

        raw = output.read_bytes()
        assert b"\r\n" not in raw
        rows = list(csv.DictReader(output.open()))
        assert list(rows[0]) == SweepRow.columns()
        assert [float(r["value"]) for r in rows] == [200.0, 400.0]
        for r in rows:
            assert float(r["sigma2_full"]) > 0.0
            assert r["error"] == ""

        meta = orjson.loads((tmp_path / "out.csv.meta.json").read_bytes())
        assert meta["seed"] == meta["row_seeds"][0] ^ 0xE220A8397B1DCDAF
        assert meta["rows"] == 2
        assert meta["failures"] == []
        assert meta["wall_time_s"] >= 0.0
        assert "grid = 200, 400" in meta["config_text"]

    def test_rerun_is_byte_identical(self, config_file, tmp_path):
        """Same config and seed give the same bytes, cached or not."""
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        assert run(config_file, first, tmp_path / "cache-a") == EXIT_OK
        assert run(config_file, second, tmp_path / "cache-b", "--no-cache") == EXIT_OK
        assert first.read_bytes() == second.read_bytes()

    def test_threads_do_not_change_output(self, config_file, tmp_path):
        """Thread count does not change the CSV."""
        serial = tmp_path / "serial.csv"
        parallel = tmp_path / "parallel.csv"
        assert run(config_file, serial, tmp_path / "c1", "--no-cache") == EXIT_OK
        assert run(config_file, parallel, tmp_path / "c2", "--no-cache", "--threads", "2") == EXIT_OK
        assert serial.read_bytes() == parallel.read_bytes()

    def test_warm_cache_reproduces_output(self, config_file, tmp_path):
        """A warm cache reproduces the cold run."""
        cold = tmp_path / "cold.csv"
        warm = tmp_path / "warm.csv"
        assert run(config_file, cold, tmp_path / "cache") == EXIT_OK
        assert run(config_file, warm, tmp_path / "cache") == EXIT_OK
        assert cold.read_bytes() == warm.read_bytes()

    def test_replay_from_sidecar(self, config_file, tmp_path):
        """Replaying a sidecar regenerates the CSV."""
        original = tmp_path / "orig.csv"
        replayed = tmp_path / "replayed.csv"
        assert run(config_file, original, tmp_path / "cache", "--seed", "77") == EXIT_OK
        status = run_cli(
            ["--replay", str(tmp_path / "orig.csv.meta.json"), "--output", str(replayed), "--no-cache"]
        )
        assert status == EXIT_OK
        assert original.read_bytes() == replayed.read_bytes()

    def test_seed_changes_cross_term(self, config_file, tmp_path):
        """A different seed gives a different x2."""
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert run(config_file, a, tmp_path / "cache", "--seed", "1") == EXIT_OK
        assert run(config_file, b, tmp_path / "cache", "--seed", "2") == EXIT_OK
        x2_a = [r["x2_ratio"] for r in csv.DictReader(a.open())]
        x2_b = [r["x2_ratio"] for r in csv.DictReader(b.open())]
        assert x2_a != x2_b

    def test_strength_family(self, tmp_path):
        """A cn2_series run writes one block of rows per Cn²."""
        path = tmp_path / "family.cfg"
        path.write_text(CHANNEL.replace("cn2 = 1e-14", "cn2 = 1e-14\ncn2_series = 0, 1e-14"))
        output = tmp_path / "family.csv"
        assert run(path, output, tmp_path / "cache") == EXIT_OK
        rows = list(csv.DictReader(output.open()))
        assert [float(r["cn2"]) for r in rows] == [0.0, 0.0, 1e-14, 1e-14]
        assert [float(r["value"]) for r in rows] == [200.0, 400.0, 200.0, 400.0]
        assert [float(r["sigma2_full"]) for r in rows[:2]] == [0.0, 0.0]
        meta = orjson.loads((tmp_path / "family.csv.meta.json").read_bytes())
        assert "cn2_series = 0, 1e-14" in meta["config_text"]

    def test_long_paths(self, tmp_path):
        """Distances out to 1100 m finish without row failures."""
        path = tmp_path / "long.cfg"
        text = CHANNEL.replace("grid = 200, 400", "grid = 600, 1100")
        path.write_text(text.replace("mc_samples = 2000", "mc_samples = 20000"))
        output = tmp_path / "long.csv"
        assert run(path, output, tmp_path / "cache") == EXIT_OK
        for r in csv.DictReader(output.open()):
            assert r["error"] == ""
            assert float(r["sigma2_full"]) > 0.0


class TestExitCodes:
    """Distinct statuses for the failure classes."""

    def test_missing_source(self, tmp_path):
        """No config, preset or sidecar is a configuration error."""
        assert run_cli(["--output", str(tmp_path / "x.csv")]) == EXIT_CONFIG

    def test_invalid_config(self, tmp_path):
        """Invalid values exit with the configuration status."""
        path = tmp_path / "bad.cfg"
        path.write_text("cn2 = -1\n")
        assert run(path, tmp_path / "x.csv", tmp_path / "cache") == EXIT_CONFIG

    def test_missing_config_file(self, tmp_path):
        """An unreadable config file is an I/O error."""
        assert run(tmp_path / "nope.cfg", tmp_path / "x.csv", tmp_path / "cache") == EXIT_IO

    def test_unwritable_output(self, config_file, tmp_path):
        """An output path that cannot be written is an I/O error."""
        blocker = tmp_path / "file"
        blocker.write_text("x")
        assert run(config_file, blocker / "out.csv", tmp_path / "cache") == EXIT_IO

    def test_failed_rows(self, tmp_path, capsys):
        """Row failures exit with status 1 and are listed in the sidecar."""
        path = tmp_path / "vacuum.cfg"
        path.write_text(CHANNEL.replace("cn2 = 1e-14", "cn2 = 0").replace("grid = 200, 400", "grid = -100, 200"))
        output = tmp_path / "out.csv"
        assert run(path, output, tmp_path / "cache") == EXIT_ROW_FAILURES
        rows = list(csv.DictReader(output.open()))
        assert rows[0]["error"] != ""
        assert rows[1]["error"] == ""
        meta = orjson.loads((tmp_path / "out.csv.meta.json").read_bytes())
        assert meta["failures"][0]["index"] == 0
        assert "failed" in capsys.readouterr().out
