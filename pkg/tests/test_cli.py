"""End-to-end tests of the floodlib command line."""

import json

import pytest
from typer.testing import CliRunner

from floodlib.cli import app

runner = CliRunner()


@pytest.fixture(autouse=True)
def isolated_cwd(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("FLOODLIB_OUT_DIR", raising=False)
    monkeypatch.delenv("FLOODLIB_WORKERS", raising=False)


@pytest.fixture
def toy_config_path(write_config, small_toy_config):
    return write_config(small_toy_config)


def _exp_dir(tmp_path):
    return tmp_path / "runs" / "small"


def test_version_command():
    """version prints the package version."""
    result = runner.invoke(app, ["version"])
    assert result.exit_code == 0
    assert "floodlib v" in result.output


def test_invalid_config_exits_2(write_config):
    """A config that fails validation exits with code 2."""
    path = write_config({"name": "bad", "train": {"epochs": -1}})
    result = runner.invoke(app, ["train", "--config", str(path)])
    assert result.exit_code == 2
    assert "Error" in result.output


def test_missing_config_exits_2(tmp_path):
    """A missing config file exits with code 2."""
    result = runner.invoke(app, ["gen-data", "--config", str(tmp_path / "nope.json")])
    assert result.exit_code == 2


def test_gen_data(toy_config_path, tmp_path):
    """gen-data writes the splits and the manifest."""
    result = runner.invoke(app, ["gen-data", "--config", str(toy_config_path)])

    assert result.exit_code == 0, result.output
    data_dir = _exp_dir(tmp_path) / "data"
    assert {p.name for p in data_dir.iterdir()} == {"train.csv", "val.csv", "test.csv", "b.csv", "manifest.json"}
    assert (_exp_dir(tmp_path) / "config.json").exists()


def test_out_option_overrides_config(toy_config_path, tmp_path):
    """--out moves the output directory."""
    result = runner.invoke(app, ["gen-data", "--config", str(toy_config_path), "--out", str(tmp_path / "elsewhere")])
    assert result.exit_code == 0, result.output
    assert (tmp_path / "elsewhere" / "small" / "data" / "manifest.json").exists()


def test_train_without_flood_table_exits_3(toy_config_path):
    """Training AdaFlood before train-aux exits with code 3."""
    result = runner.invoke(app, ["train", "--config", str(toy_config_path)])
    assert result.exit_code == 3
    assert "train-aux" in result.output


def test_full_pipeline_is_reproducible(toy_config_path, tmp_path):
    """Rerunning train-aux and train yields byte-identical tables and summaries."""
    exp = _exp_dir(tmp_path)
    assert runner.invoke(app, ["train-aux", "--config", str(toy_config_path)]).exit_code == 0
    table_bytes = (exp / "aux" / "flood_table.csv").read_bytes()
    result = runner.invoke(app, ["train", "--config", str(toy_config_path)])
    assert result.exit_code == 0, result.output
    summary_bytes = (exp / "summary.json").read_bytes()
    metrics_bytes = (exp / "0" / "adaflood" / "metrics.json").read_bytes()

    assert runner.invoke(app, ["train-aux", "--config", str(toy_config_path)]).exit_code == 0
    assert runner.invoke(app, ["train", "--config", str(toy_config_path)]).exit_code == 0

    assert (exp / "aux" / "flood_table.csv").read_bytes() == table_bytes
    assert (exp / "summary.json").read_bytes() == summary_bytes
    assert (exp / "0" / "adaflood" / "metrics.json").read_bytes() == metrics_bytes

    result = runner.invoke(app, ["evaluate", "--config", str(toy_config_path)])
    assert result.exit_code == 0, result.output
    assert (exp / "evaluation.json").exists()

    result = runner.invoke(app, ["calibrate", "--config", str(toy_config_path)])
    assert result.exit_code == 0, result.output
    summary = json.loads((exp / "calibration_summary.json").read_text())
    assert len(summary["methods"]) == 4


def test_seed_option_trains_one_seed(toy_config_path, tmp_path):
    """--seed trains exactly one seed."""
    assert runner.invoke(app, ["train-aux", "--config", str(toy_config_path)]).exit_code == 0
    result = runner.invoke(app, ["train", "--config", str(toy_config_path), "--seed", "5"])

    assert result.exit_code == 0, result.output
    summary = json.loads((_exp_dir(tmp_path) / "summary.json").read_text())
    assert [r["seed"] for r in summary["methods"][0]["runs"]] == [5]


def test_set_option(toy_config_path, tmp_path):
    """--set overrides a top-level config key."""
    result = runner.invoke(app, ["gen-data", "--config", str(toy_config_path), "--set", "name=renamed"])
    assert result.exit_code == 0, result.output
    assert (tmp_path / "runs" / "renamed" / "data" / "manifest.json").exists()


def test_proposition_check(tmp_path, write_config):
    """proposition-check prints a passing summary."""
    path = write_config({"name": "prop", "out_dir": str(tmp_path / "runs"), "seeds": [0, 1]})
    result = runner.invoke(app, ["proposition-check", "--config", str(path)])

    assert result.exit_code == 0, result.output
    report = json.loads((tmp_path / "runs" / "prop" / "proposition.json").read_text())
    assert report["passed"] is True
    assert set(report["seeds"]) == {"0", "1"}


def test_proposition_premise_violation_exits_3(tmp_path, write_config):
    """A violated premise exits with code 3."""
    path = write_config({"name": "prop", "out_dir": str(tmp_path / "runs"), "proposition": {"n_points": 12, "noise_rate": 0.5, "samples_per_point": 6}})
    result = runner.invoke(app, ["proposition-check", "--config", str(path)])
    assert result.exit_code == 3


def test_ledger_tail(toy_config_path):
    """ledger tail prints recent events."""
    assert runner.invoke(app, ["gen-data", "--config", str(toy_config_path)]).exit_code == 0

    result = runner.invoke(app, ["ledger", "tail", "--config", str(toy_config_path)])
    assert result.exit_code == 0
    assert "DATA_GENERATED" in result.output

    result = runner.invoke(app, ["ledger", "tail", "--config", str(toy_config_path), "--full"])
    assert result.exit_code == 0
    assert "manifest" in result.output


def test_ledger_tail_empty(toy_config_path):
    """ledger tail on an empty ledger says so."""
    result = runner.invoke(app, ["ledger", "tail", "--config", str(toy_config_path)])
    assert result.exit_code == 0
    assert "No events" in result.output


def test_missing_csv_path_exits_2(write_config, tmp_path):
    """A config pointing at a CSV that does not exist is a config error, not a traceback."""
    path = write_config(
        {"name": "csv", "out_dir": str(tmp_path / "runs"), "dataset": {"kind": "csv", "csv_path": "missing.csv"}}
    )
    result = runner.invoke(app, ["gen-data", "--config", str(path)])
    assert result.exit_code == 2
    assert "does not exist" in result.output


def test_non_utf8_csv_exits_2(write_config, tmp_path):
    """A CSV that is not UTF-8 exits with code 2 and names the file."""
    (tmp_path / "bad.csv").write_bytes(b"\xff\xfex,target\n1.0,0\n")
    path = write_config(
        {"name": "csv", "out_dir": str(tmp_path / "runs"), "dataset": {"kind": "csv", "csv_path": "bad.csv"}}
    )
    result = runner.invoke(app, ["gen-data", "--config", str(path)])
    assert result.exit_code == 2
    assert "UTF-8" in result.output
