import csv
import json
import shutil
import subprocess
from importlib import resources

import pytest

from satops import comms
from satops.runtime import CSV_HEADER
from satops.scenarios.cli import main
from satops.scenarios.config import build_actors, load_config

CONFIGS = resources.files("satops") / "configs"


def _config(name):
    return str(CONFIGS / name)


def test_run_constellation_writes_log(tmp_path, capsys):
    out = tmp_path / "out.csv"
    assert main(["run", _config("constellation.json"), "--log", str(out), "--duration-s", "600"]) == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) > 16
    summary = json.loads(capsys.readouterr().out)
    assert summary["satellites"] == 16


def test_run_custom_with_summary_csv(tmp_path, capsys):
    table = tmp_path / "summary.csv"
    assert main(["run", _config("maspalomas.json"), "--duration-s", "3600", "--csv", str(table)]) == 0
    rows = list(csv.DictReader(table.open()))
    assert rows[0]["actors"] == "2"
    assert 0.0 <= float(rows[0]["final.sat1.state_of_charge"]) <= 1.0


def test_seed_override_changes_constellation(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["run", _config("constellation.json"), "--log", str(a), "--duration-s", "120", "--seed", "1"])
    main(["run", _config("constellation.json"), "--log", str(b), "--duration-s", "120", "--seed", "2"])
    assert a.read_bytes() != b.read_bytes()


def test_windows_matches_library(tmp_path, capsys):
    table = tmp_path / "windows.csv"
    code = main(["windows", "--config", _config("maspalomas.json"), "--from", "sat1", "--to", "maspalomas",
                 "--hours", "24", "--csv", str(table)])
    assert code == 0
    config = load_config(_config("maspalomas.json"))
    actors = {a.id: a for a in build_actors(config)}
    expected = comms.find_windows(actors["sat1"], actors["maspalomas"], config.epoch, config.epoch + 86400.0)
    rows = list(csv.DictReader(table.open()))
    assert len(rows) == len(expected)
    for row, w in zip(rows, expected):
        assert float(row["start_s"]) == w.start.seconds
        assert float(row["end_s"]) == w.end.seconds
    printed = capsys.readouterr().out
    assert printed.startswith(f"{len(expected)} windows sat1 -> maspalomas")


def test_windows_unknown_actor(capsys):
    code = main(["windows", "--config", _config("maspalomas.json"), "--from", "sat9", "--to", "maspalomas"])
    assert code != 0
    assert "sat9" in capsys.readouterr().err


def test_missing_config_names_path(tmp_path, capsys):
    missing = tmp_path / "absent.json"
    assert main(["run", str(missing)]) != 0
    assert str(missing) in capsys.readouterr().err


def test_unwritable_log_path(tmp_path, capsys):
    target = tmp_path / "no" / "such" / "dir" / "log.csv"
    assert main(["run", _config("maspalomas.json"), "--log", str(target), "--duration-s", "60"]) != 0
    assert "does not exist" in capsys.readouterr().err


def test_unknown_subcommand():
    with pytest.raises(SystemExit) as info:
        main(["launch"])
    assert info.value.code != 0


def test_bench_scaling_small(tmp_path, capsys):
    table = tmp_path / "scaling.csv"
    assert main(["bench", "scaling", "--sizes", "4,8", "--duration-s", "30", "--repeats", "1", "--csv", str(table)]) == 0
    rows = list(csv.DictReader(table.open()))
    assert [r["satellites"] for r in rows] == ["4", "8"]
    assert "per-satellite spread" in capsys.readouterr().out


def test_bench_overhead_short(tmp_path):
    table = tmp_path / "overhead.csv"
    code = main(["bench", "overhead", "--interval", "0.5", "--runs", "1", "--warmup", "0",
                 "--activity-s", "1.5", "--csv", str(table)])
    assert code == 0
    (row,) = list(csv.DictReader(table.open()))
    assert float(row["interval_s"]) == 0.5
    assert float(row["wall_s"]) >= 1.5


@pytest.mark.skipif(shutil.which("sim") is None, reason="console script not installed")
def test_console_script(tmp_path):
    proc = subprocess.run(["sim", "run", str(tmp_path / "x.json")], capture_output=True, text=True)
    assert proc.returncode == 2
    assert "x.json" in proc.stderr
