import csv
import io
import math

import pytest

from gmab import GmabParams, StoppingBudget
from gmab.bench import (
    ExperimentConfig,
    RaggedTraceError,
    aggregate_file,
    aggregate_rows,
    default_checkpoints,
    fsc_compare,
    measure_iteration_runtime,
    median_near,
    nearest_rank,
    run_experiment,
    sweep,
)
from gmab.bench.experiment import SUMMARY_HEADER, TRACE_HEADER, TruthOracle
from gmab.problems import InventoryProblem, MultimodalProblem, SumOfHumpsProblem


def cfg(**kw):
    budget = kw.pop("budget", 2000)
    params = kw.pop("params", GmabParams(budget=StoppingBudget(max_replications=budget)))
    return ExperimentConfig(params=params, **kw)


def read(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))


def test_default_checkpoints():
    assert default_checkpoints(10_000) == [50, 100, 200, 500, 1000, 2000, 5000, 10_000]
    assert default_checkpoints(3000) == [50, 100, 200, 500, 1000, 2000, 3000]
    assert default_checkpoints(40) == [40]


def test_config_validation():
    with pytest.raises(ValueError):
        cfg(runs=0)
    with pytest.raises(ValueError):
        cfg(checkpoints=[100, 100])
    with pytest.raises(ValueError):
        cfg(truth="guess")


def test_run_experiment_files(tmp_path):
    records = run_experiment(cfg(runs=3, checkpoints=[100, 1000, 2000]), str(tmp_path))
    trace = read(tmp_path / "trace.csv")
    summary = read(tmp_path / "summary.csv")
    assert trace[0] == TRACE_HEADER and summary[0] == SUMMARY_HEADER
    assert len(trace) == 1 + 3 * 3 and len(summary) == 1 + 3
    assert [r[0] for r in summary[1:]] == ["0", "1", "2"]
    tp3 = MultimodalProblem()
    for row in trace[1:]:
        x = tuple(int(v) for v in row[2].split(";"))
        assert float(row[4]) == tp3.true_value(x)
        assert float(row[5]) == pytest.approx(tp3.true_value(x) + 20.0)
    for rec, row in zip(records, summary[1:]):
        assert int(row[7]) == rec.result.replications >= 2000
        assert float(row[5]) >= -1e-12


def test_seeds_are_base_plus_index(tmp_path):
    a = run_experiment(cfg(runs=3, base_seed=10))
    b = run_experiment(cfg(runs=1, base_seed=12))
    assert a[2].summary_row[1:8] == b[0].summary_row[1:8]


def test_initialization_only_run():
    params = GmabParams(budget=StoppingBudget(max_iterations=0))
    (rec,) = run_experiment(cfg(params=params))
    assert rec.summary_row[6] == "0" and rec.summary_row[7] == "20"
    assert rec.trace_rows == []


def test_byte_identical_reruns(tmp_path):
    c = cfg(runs=2, problem="tp1", budget=600)
    run_experiment(c, str(tmp_path / "a"))
    run_experiment(c, str(tmp_path / "b"))
    assert (tmp_path / "a" / "trace.csv").read_bytes() == (tmp_path / "b" / "trace.csv").read_bytes()
    strip = lambda p: [row[:-1] for row in read(p)]  # wall_seconds is a measurement
    assert strip(tmp_path / "a" / "summary.csv") == strip(tmp_path / "b" / "summary.csv")


def test_parallel_runs_match_sequential(tmp_path):
    seq = run_experiment(cfg(runs=3, problem="tp4", dims=3, workers=1))
    par = run_experiment(cfg(runs=3, problem="tp4", dims=3, workers=2))
    assert [r.trace_rows for r in seq] == [r.trace_rows for r in par]
    assert [r.summary_row[:-1] for r in seq] == [r.summary_row[:-1] for r in par]


def test_failed_run_is_reported(tmp_path, capsys):
    records = run_experiment(cfg(problem="external", external_cmd="/nonexistent/sim"), str(tmp_path))
    assert records[0].error
    assert len(read(tmp_path / "summary.csv")) == 2
    assert "failed" in capsys.readouterr().err


def test_truth_oracle_modes():
    tp1 = InventoryProblem()
    oracle = TruthOracle(tp1, "auto", reps=2000)
    v = oracle((17, 36))
    assert v == oracle((17, 36))  # memoized
    assert abs(v - 106.167) < 1.5
    assert oracle.gap(106.167) == pytest.approx(0.0)
    assert TruthOracle(tp1, "none")((17, 36)) is None
    assert TruthOracle(tp1, "analytic")((17, 36)) is None


def test_nearest_rank():
    assert nearest_rank([10, 20, 30, 40], 25) == 10
    vals = [1, 2, 3, 4, 5]
    assert (nearest_rank(vals, 50), nearest_rank(vals, 0), nearest_rank(vals, 100)) == (3, 1, 5)
    with pytest.raises(ValueError):
        nearest_rank([], 50)


def _rows(data):
    return [{"run_id": str(r), "replications": str(c), "gap": repr(g)} for r, c, g in data]


def test_aggregate_examples():
    bands = aggregate_rows(_rows([(i, 100, g) for i, g in enumerate([1.0, 2.0, 3.0, 4.0, 5.0])]))
    (b,) = bands
    assert (b["p0"], b["p50"], b["p100"], b["mean"], b["runs"]) == (1.0, 3.0, 5.0, 3.0, 5)
    (single,) = aggregate_rows(_rows([(0, 100, 7.5)]))
    assert {single[k] for k in single if k.startswith("p")} == {7.5}


def test_aggregate_ragged():
    with pytest.raises(RaggedTraceError):
        aggregate_rows(_rows([(0, 100, 1.0), (0, 200, 1.0), (1, 100, 2.0)]))


def test_aggregate_file_is_pure(tmp_path):
    run_experiment(cfg(runs=4, checkpoints=[50, 500, 2000]), str(tmp_path))
    out1, out2 = io.StringIO(), io.StringIO()
    bands = aggregate_file(str(tmp_path / "trace.csv"), out1)
    aggregate_file(str(tmp_path / "trace.csv"), out2)
    assert out1.getvalue() == out2.getvalue()
    assert [b["replications"] for b in bands] == [50, 500, 2000]
    for b in bands:
        ps = [b[k] for k in ("p0", "p5", "p25", "p50", "p75", "p95", "p100")]
        assert ps == sorted(ps)


def test_sweep_cells(tmp_path):
    base = cfg(runs=2, problem="tp4", dims=2, budget=500)
    out = io.StringIO()
    rows = sweep(base, [0.5, 1.0], [0.25, 0.5], [2, 4], out)
    assert len(rows) == 8
    assert len(out.getvalue().strip().splitlines()) == 9
    assert all(r["error"] == "" and r["mean_gap"] is not None for r in rows)


def test_sweep_single_cell_equals_experiment():
    base = cfg(runs=2)
    (row,) = sweep(base, [1.0], [0.25], [20])
    records = run_experiment(base)
    gaps = [float(r.summary_row[5]) for r in records]
    assert row["mean_gap"] == pytest.approx(sum(gaps) / 2)


def test_sweep_records_failures():
    rows = sweep(cfg(runs=1, budget=100), [1.0], [0.25], [3, 4])
    assert rows[0]["error"] and rows[0]["mean_gap"] is None
    assert rows[1]["error"] == ""


def test_runtime_rows():
    rows = measure_iteration_runtime(SumOfHumpsProblem(dims=10), GmabParams(), iterations=10)
    assert len(rows) == 10
    assert [r[0] for r in rows] == list(range(1, 11))
    assert all(r[2] >= 0 for r in rows)
    rows = measure_iteration_runtime(SumOfHumpsProblem(dims=3), GmabParams(), max_visited=300)
    assert rows[-1][1] >= 300 > rows[-2][1]
    assert median_near(rows, 300) > 0
    with pytest.raises(ValueError):
        measure_iteration_runtime(SumOfHumpsProblem(dims=3), GmabParams())


def test_fsc_compare_output():
    out = io.StringIO()
    means = fsc_compare(cfg(runs=3), out)
    assert set(means) == {"fsc1", "fsc2", "fsc3"}
    assert all(v is not None and v >= -1e-9 for v in means.values())
    lines = out.getvalue().strip().splitlines()
    assert len(lines) == 1 + 9
