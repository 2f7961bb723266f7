import json
import math
import subprocess
import sys

import numpy as np
import pytest
from click.testing import CliRunner

from curvcomp import cli
from curvcomp import documents as docs
from curvcomp import fixtures


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def sixpoint_json():
    return fixtures.sixpoint().to_json()


def report_of(result):
    return json.loads(result.output)


class TestCheckCommands:
    def test_check1p3_pass(self, runner, sixpoint_json):
        res = runner.invoke(cli.main, ["check1p3"], input=sixpoint_json)
        assert res.exit_code == 0
        rep = report_of(res)
        assert rep["command"] == "check1p3"
        assert rep["exit"] == 0
        assert rep["results"][0]["n_tuples"] == 60

    def test_check1p3_fail(self, runner):
        res = runner.invoke(
            cli.main, ["check1p3"], input=fixtures.tripod().to_json()
        )
        assert res.exit_code == 1

    def test_check2p2_sixpoint_fails(self, runner, sixpoint_json):
        res = runner.invoke(cli.main, ["check2p2"], input=sixpoint_json)
        assert res.exit_code == 1

    def test_check1pn_single_basepoint(self, runner, sixpoint_json):
        res = runner.invoke(
            cli.main, ["check1pn", "--basepoint", "a", "--restarts", "8"],
            input=sixpoint_json,
        )
        assert res.exit_code == 0
        rep = report_of(res)
        assert len(rep["results"]) == 1

    def test_check2n2(self, runner, sixpoint_json):
        res = runner.invoke(
            cli.main,
            ["check2n2", "--x", "a", "--y", "b", "--pairs", "x:y"],
            input=sixpoint_json,
        )
        assert res.exit_code == 1
        rep = report_of(res)
        assert rep["results"][0]["verdict"] == "FAIL"

    def test_bad_pairs_spec(self, runner, sixpoint_json):
        res = runner.invoke(
            cli.main,
            ["check2n2", "--x", "a", "--y", "b", "--pairs", "xy"],
            input=sixpoint_json,
        )
        assert res.exit_code == 2

    def test_csv_input(self, runner):
        csv_text = fixtures.sixpoint().to_decrypting_csv()
        res = runner.invoke(cli.main, ["check1p3"], input=csv_text)
        assert res.exit_code == 0

    def test_malformed_input(self, runner):
        res = runner.invoke(cli.main, ["check1p3"], input="{broken")
        assert res.exit_code == 2


class TestSolverCommands:
    def test_fourpoint_tripod(self, runner):
        res = runner.invoke(
            cli.main, ["fourpoint", "--sides", "2,2,2", "--radii", "1,1,1"]
        )
        assert res.exit_code == 1
        rep = report_of(res)
        assert rep["results"][0]["defect"] == pytest.approx(
            2.0 / math.sqrt(3.0) - 1.0, abs=1e-9
        )

    def test_fourpoint_feasible(self, runner):
        r = math.sqrt(2.0)
        res = runner.invoke(
            cli.main,
            ["fourpoint", "--sides", f"2,2,{2 * r}", "--radii", f"{r},{r},{r}"],
        )
        assert res.exit_code == 0

    def test_cheb_command(self, runner):
        inst = {
            "kappa": 0.0,
            "chart_dim": 2,
            "targets": [[0.0, 0.0], [2.0, 0.0]],
            "radii": [1.5, 1.5],
        }
        res = runner.invoke(cli.main, ["cheb"], input=json.dumps(inst))
        assert res.exit_code == 0

    def test_barycenter_command(self, runner):
        inst = {
            "kappa": 0.0,
            "chart_dim": 2,
            "targets": [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            "radii": [0, 0, 0],
            "weights": [1, 1, 1],
        }
        res = runner.invoke(cli.main, ["barycenter"], input=json.dumps(inst))
        assert res.exit_code == 0
        rep = report_of(res)
        assert rep["results"][0]["point"] == pytest.approx([1 / 3, 1 / 3], abs=1e-8)

    def test_project_empty(self, runner):
        inst = {
            "kappa": 0.0,
            "chart_dim": 2,
            "targets": [[0.0, 0.0], [4.0, 0.0]],
            "radii": [1.0, 1.0],
        }
        res = runner.invoke(
            cli.main, ["project", "--point", "2,2"], input=json.dumps(inst)
        )
        assert res.exit_code == 1
        assert report_of(res)["results"][0]["empty"] is True

    def test_helly_witness(self, runner):
        s3 = math.sqrt(3.0)
        inst = {
            "kappa": 0.0,
            "chart_dim": 2,
            "targets": [[0.0, 0.0], [2.0, 0.0], [1.0, s3]],
            "radii": [1.05, 1.05, 1.05],
        }
        res = runner.invoke(cli.main, ["helly"], input=json.dumps(inst))
        assert res.exit_code == 1
        assert sorted(report_of(res)["results"][0]["witness"]) == [0, 1, 2]

    def test_extend_hemisphere(self, runner):
        text = docs.map_to_json(fixtures.hemisphere(8))
        res = runner.invoke(cli.main, ["extend"], input=text)
        assert res.exit_code == 1
        rep = report_of(res)
        assert rep["results"][0]["defect"] == pytest.approx(
            3 * math.pi / 8, abs=1e-6
        )


class TestFixtureCommand:
    def test_fixture_emits_raw_document(self, runner):
        res = runner.invoke(cli.main, ["fixture", "sixpoint"])
        assert res.exit_code == 0
        doc = docs.MetricDocument.from_json(res.output)
        assert doc.labels == fixtures.sixpoint().labels

    def test_unknown_fixture(self, runner):
        res = runner.invoke(cli.main, ["fixture", "nope"])
        assert res.exit_code == 2


class TestOutputModes:
    def test_csv_format(self, runner, sixpoint_json):
        res = runner.invoke(
            cli.main, ["check1p3", "--format", "csv"], input=sixpoint_json
        )
        assert res.exit_code == 0
        lines = res.output.strip().splitlines()
        assert len(lines) >= 2
        assert "," in lines[0]

    def test_out_file(self, runner, sixpoint_json, tmp_path):
        path = tmp_path / "report.json"
        res = runner.invoke(
            cli.main, ["check1p3", "--out", str(path)], input=sixpoint_json
        )
        assert res.exit_code == 0
        rep = json.loads(path.read_text())
        assert rep["command"] == "check1p3"
        assert "elapsed_ms" in rep

    def test_figures_written(self, runner, sixpoint_json, tmp_path):
        figdir = tmp_path / "figs"
        res = runner.invoke(
            cli.main, ["check1p3", "--figures", str(figdir)], input=sixpoint_json
        )
        assert res.exit_code == 0
        rep = report_of(res)
        paths = rep["config"]["figures"]
        assert paths
        for p in paths:
            assert (tmp_path / "figs").exists()
            assert p.endswith(".png")


class TestPipeline:
    def test_subprocess_pipe(self):
        fix = subprocess.run(
            [sys.executable, "-m", "curvcomp.cli", "fixture", "tripod"],
            capture_output=True, text=True,
        )
        assert fix.returncode == 0
        check = subprocess.run(
            [sys.executable, "-m", "curvcomp.cli", "check1p3"],
            input=fix.stdout, capture_output=True, text=True,
        )
        assert check.returncode == 1
        rep = json.loads(check.stdout)
        assert rep["results"][0]["n_fail"] >= 1
