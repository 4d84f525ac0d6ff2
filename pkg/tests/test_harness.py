import json

import pytest
from typer.testing import CliRunner

from isolation_sim.harness import (
    EXIT_FAIL,
    EXIT_IO,
    EXIT_OK,
    aggregate_table,
    cmd_run,
    cmd_sweep,
    cmd_verify,
    sweep_cells,
)
from isolation_sim.config import SweepGrid
from isolation_sim.main import app

THETA_RUN = {
    "maxDepth": 3, "horizon": 8, "seed": 0,
    "adversaries": [{"index": 0, "theta": "faithful"}],
}

GRID = {
    "maxDepth": [3],
    "horizon": [8],
    "seeds": [0, 1],
    "mixes": {
        "theta": [{"index": 0, "theta": "faithful"}],
        "psi": [{"index": 0, "psi": "faithful"}],
    },
}


class TestRun:
    def test_writes_trace_and_manifest(self, write_yaml, tmp_path):
        config = write_yaml("run.yaml", THETA_RUN)
        trace = tmp_path / "out" / "run.trace"
        code, manifest = cmd_run(config, trace)
        assert code == EXIT_OK
        lines = trace.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "HDR seed=0 maxDepth=3 horizon=8"
        assert manifest.events == len(lines)
        assert manifest.stages == 8 and manifest.initializations == 0
        assert len(manifest.config_digest) == 64
        data = json.loads(manifest.to_json())
        assert data["maxDepth"] == 3 and data["tracePath"] == str(trace)

    def test_seed_override_reaches_the_header(self, write_yaml, tmp_path):
        config = write_yaml("run.yaml", THETA_RUN)
        trace = tmp_path / "run.trace"
        code, manifest = cmd_run(config, trace, seed=9)
        assert code == EXIT_OK and manifest.seed == 9
        assert trace.read_text(encoding="utf-8").startswith("HDR seed=9 ")

    @pytest.mark.parametrize("body", ["[1, 2]", "maxDepth: 0\n", "horizon: [\n", "colour: blue\n"])
    def test_bad_config(self, tmp_path, body):
        config = tmp_path / "bad.yaml"
        config.write_text(body, encoding="utf-8")
        code, manifest = cmd_run(config, tmp_path / "t.trace")
        assert (code, manifest) == (EXIT_IO, None)

    def test_missing_config(self, tmp_path):
        assert cmd_run(tmp_path / "nope.yaml", tmp_path / "t.trace") == (EXIT_IO, None)


class TestVerify:
    def test_round_trip_with_report(self, write_yaml, tmp_path):
        config = write_yaml("run.yaml", THETA_RUN)
        trace = tmp_path / "run.trace"
        cmd_run(config, trace)
        report_out = tmp_path / "reports" / "run.report"
        code, report = cmd_verify(trace, config, report_out)
        assert code == EXIT_OK
        lines = report_out.read_text(encoding="utf-8").splitlines()
        assert lines == report.to_lines()
        assert "CHK replay PASS" in lines

    def test_uses_the_seed_from_the_header(self, write_yaml, tmp_path):
        config = write_yaml("run.yaml", THETA_RUN)
        trace = tmp_path / "run.trace"
        cmd_run(config, trace, seed=4)
        code, report = cmd_verify(trace, config)
        assert code == EXIT_OK
        assert report.check("replay").status.value == "PASS"

    def test_tampered_trace_fails(self, write_yaml, tmp_path):
        config = write_yaml("run.yaml", THETA_RUN)
        trace = tmp_path / "run.trace"
        cmd_run(config, trace)
        text = trace.read_text(encoding="utf-8")
        trace.write_text(text + "CHG 8 4 Extract\n", encoding="utf-8")
        code, report = cmd_verify(trace, config)
        assert code == EXIT_FAIL
        assert report.check("replay").status.value == "FAIL"

    def test_missing_trace(self, write_yaml, tmp_path):
        config = write_yaml("run.yaml", THETA_RUN)
        assert cmd_verify(tmp_path / "missing.trace", config) == (EXIT_IO, None)


class TestSweep:
    def test_cells_are_ordered(self):
        labels = [label for label, _, _ in sweep_cells(SweepGrid.parse(GRID))]
        assert labels == ["d3-h8-psi-s0", "d3-h8-psi-s1", "d3-h8-theta-s0", "d3-h8-theta-s1"]

    def test_sweep_writes_every_artifact(self, write_yaml, tmp_path):
        grid = write_yaml("grid.yaml", GRID)
        out = tmp_path / "sweep"
        code, table = cmd_sweep(grid, out)
        assert code == EXIT_OK
        rows = table.splitlines()
        assert rows[0].split("\t")[:3] == ["cell", "mix", "status"]
        assert [r.split("\t")[2] for r in rows[1:5]] == ["ok"] * 4
        assert rows[-1].startswith("MAX\t*\t-\t0\t0\t1\t1\t1\t1")
        assert (out / "summary.tsv").read_text(encoding="utf-8") == table
        for suffix in (".trace", ".report", ".manifest.json"):
            assert (out / f"d3-h8-theta-s1{suffix}").exists()
        manifest = json.loads((out / "d3-h8-theta-s1.manifest.json").read_text(encoding="utf-8"))
        assert manifest["seed"] == 1 and manifest["reportPath"].endswith(".report")

    def test_empty_grid(self, write_yaml, tmp_path):
        grid = write_yaml("grid.yaml", {"maxDepth": [3], "horizon": [8], "seeds": [0]})
        assert cmd_sweep(grid, tmp_path / "sweep") == (EXIT_IO, None)


def test_aggregate_table_keeps_failures_and_maxima():
    results = [
        {"cell": "a", "mix": "m", "status": "ok", "failed": [],
         "bounds": {"f": [1, 3], "g": [2, 4], "h": [2, None], "max_cyc": [1, 2], "closed_f": [1, 5], "closed_g": [2, 30]}},
        {"cell": "b", "mix": "m", "status": "FAIL", "failed": ["bounds"],
         "bounds": {"f": [1, 5], "g": [1, 9], "h": [1, None], "max_cyc": [0, 3], "closed_f": [1, 5], "closed_g": [2, 30]}},
        {"cell": "c", "mix": "m", "status": "error", "failed": [], "bounds": {}},
    ]
    rows = aggregate_table(results).splitlines()
    assert rows[1] == "a\tm\tok\t0\t1\t1\t1\t2\t2\t1\t2\t-"
    assert rows[4] == "b\tm\tFAIL\t1\t3\t2\t5\t9\t-\t5\t30\tbounds"
    assert rows[5] == "c\tm\terror\t-\t-\t-\t-\t-\t-\t-\t-\t-"
    assert rows[6] == "MAX\t*\t-\t0\t1\t1\t1\t2\t2\t-\t-\t-"
    assert rows[7] == "MAX\t*\t-\t1\t3\t2\t5\t9\t-\t-\t-\t-"


class TestCli:
    runner = CliRunner()

    def test_run_then_verify(self, write_yaml, tmp_path):
        config = write_yaml("run.yaml", THETA_RUN)
        trace = tmp_path / "run.trace"
        result = self.runner.invoke(app, ["run", "--config", str(config), "--trace-out", str(trace)])
        assert result.exit_code == 0
        assert '"configDigest"' in result.output

        result = self.runner.invoke(app, ["verify", "--trace", str(trace), "--config", str(config)])
        assert result.exit_code == 0
        assert "check\tstatus\tlocus\tmessage" in result.output

    def test_io_errors_exit_two(self, tmp_path):
        result = self.runner.invoke(app, ["verify", "--trace", str(tmp_path / "x"), "--config", str(tmp_path / "y")])
        assert result.exit_code == 2

    def test_sweep(self, write_yaml, tmp_path):
        grid = write_yaml("grid.yaml", GRID)
        result = self.runner.invoke(app, ["sweep", "--grid", str(grid), "--out", str(tmp_path / "sweep")])
        assert result.exit_code == 0
        assert "MAX" in result.output
