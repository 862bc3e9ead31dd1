import csv
import subprocess
import sys

import pytest

from gmab.bench.cli import main, parse_args, read_config


def test_run_and_aggregate(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["run", "--runs", "2", "--budget-reps", "1000", "--checkpoints", "100,1000", "--out", str(out)]) == 0
    assert "2 runs, 0 failed" in capsys.readouterr().out
    bands = tmp_path / "bands.csv"
    assert main(["aggregate", str(out / "trace.csv"), "--out", str(bands)]) == 0
    rows = list(csv.DictReader(open(bands)))
    assert [r["replications"] for r in rows] == ["100", "1000"]


def test_config_file_and_override(tmp_path):
    conf = tmp_path / "gmab.cfg"
    conf.write_text("# experiment\nproblem = tp4\ndims=3\n--p-mu=0.5\nm=10\nruns=4\n")
    args = parse_args(["run", "--config", str(conf), "--m", "6"])
    assert (args.problem, args.dims, args.p_mu, args.m, args.runs) == ("tp4", 3, 0.5, 6, 4)
    assert read_config(str(conf))["p_mu"] == "0.5"


def test_config_errors(tmp_path, capsys):
    conf = tmp_path / "bad.cfg"
    conf.write_text("colour=blue\n")
    with pytest.raises(SystemExit):
        parse_args(["run", "--config", str(conf)])
    conf.write_text("no equals sign\n")
    assert main(["run", "--config", str(conf)]) == 2


def test_bad_parameters_exit_code(tmp_path, capsys):
    assert main(["run", "--m", "3", "--out", str(tmp_path)]) == 2
    assert "m must be an even integer" in capsys.readouterr().err


def test_sweep_and_runtime_and_fsc(tmp_path, capsys):
    sweep_csv = tmp_path / "sweep.csv"
    assert main(["sweep", "--problem", "tp4", "--dims", "2", "--runs", "1", "--budget-reps", "300",
                 "--grid-m", "2,4", "--grid-p-cr", "0.5,1", "--out", str(sweep_csv)]) == 0
    assert len(sweep_csv.read_text().strip().splitlines()) == 5
    rt = tmp_path / "rt.csv"
    assert main(["bench-runtime", "--problem", "tp4", "--dims", "10", "--budget-iters", "10", "--out", str(rt)]) == 0
    assert len(rt.read_text().strip().splitlines()) == 11
    assert main(["fsc-compare", "--runs", "2", "--budget-reps", "500", "--truth", "mc", "--truth-reps", "100"]) == 0
    out = capsys.readouterr().out
    assert "fsc1: mean gap" in out and "fsc3" in out


def test_direction_flag(tmp_path):
    assert main(["run", "--problem", "tp4", "--dims", "2", "--direction", "maximize", "--budget-reps", "400",
                 "--out", str(tmp_path)]) == 0
    row = list(csv.DictReader(open(tmp_path / "summary.csv")))[0]
    # maximizing the negative humps drives coordinates to where both humps vanish
    assert float(row["final_mean"]) > -50


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "gmab", "run", "--budget-reps", "200", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "summary.csv").exists()
