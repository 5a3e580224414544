import json
import os


from fmanneal.cli import main
from fmanneal.fm import Qubo
from fmanneal.stats import aggregate, load_records, mean_std, to_csv
from fmanneal.driver import RunRecord

FAST = ["--set", "epochs=30", "--set", "outer_loops=20", "--set", "d_init=10", "--set", "k=3"]


def read_record(path):
    with open(path) as fh:
        return RunRecord.from_jsonl(fh.read())


def test_run_smoke(tmp_path, capsys):
    cfg = tmp_path / "table1.cfg"
    main(["defaults", "-o", str(cfg)])
    out = tmp_path / "rec.jsonl"
    code = main(["run", "--config", str(cfg), "--set", "n=16", "--set", "n_iter=5", *FAST, "-o", str(out)])
    assert code == 0
    text = capsys.readouterr().out
    assert "best objective:" in text and "residual:" in text
    lines = out.read_text().splitlines()
    assert len(lines) == 6
    assert json.loads(lines[-1])["type"] == "summary"
    rec = read_record(out)
    assert rec.complete and rec.best_residual is not None


def test_run_fifo_cap_on_defaults(tmp_path):
    out = tmp_path / "rec.jsonl"
    code = main(["run", "--set", "policy=fifo:100", "--set", "n_iter=3", "--set", "epochs=20",
                 "--set", "outer_loops=10", "-o", str(out)])
    assert code == 0
    rec = read_record(out)
    assert rec.config["input_dimension"] == "64"
    assert all(row["dataset_size"] == 100 for row in rec.trace)
    assert rec.optimum == -9.84615385


def test_run_missing_config(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_run_bad_override(capsys):
    assert main(["run", "--set", "hyperparameter_k=-3"]) == 2
    assert "hyperparameter_k" in capsys.readouterr().err


def test_run_unknown_optimum_for_large_n(tmp_path, capsys):
    out = tmp_path / "r.jsonl"
    assert main(["run", "--set", "n=30", "--set", "n_iter=1", *FAST, "-o", str(out)]) == 0
    assert "residual: n/a" in capsys.readouterr().out


def test_oracle(capsys):
    assert main(["oracle", "labs", "--n", "3"]) == 0
    out = capsys.readouterr().out
    assert "energy: 1\n" in out and "merit_factor: 4.5\n" in out and "wall_time_s" in out
    assert main(["oracle", "labs", "--n", "2"]) == 0
    assert "energy: 1\n" in capsys.readouterr().out
    assert main(["oracle", "labs", "--n", "30"]) == 4


def test_oracle_and_anneal_qubo(tmp_path, capsys):
    q = Qubo(0.0, [[-1.0, 3.0], [0.0, -1.0]])
    path = tmp_path / "q.txt"
    path.write_text(q.to_text())
    assert main(["oracle", "qubo", "--qubo", str(path)]) == 0
    out = capsys.readouterr().out
    assert "energy: -1.0" in out and "x: 01" in out
    assert main(["anneal", "--qubo", str(path), "--outer-loops", "50", "--num-reads", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 3 and all(l.startswith("-1.0 ") for l in lines)
    assert main(["anneal", "--qubo", str(tmp_path / "none.txt")]) == 2


def test_mean_std():
    assert mean_std([1.0, 3.0]) == (2.0, 1.0)
    assert mean_std([0.5]) == (0.5, 0.0)


def _write_spec(tmp_path, axis="d_latest", values="1, 100, all", seeds="0,1,2,3,4,5,6,7,8,9", extra=""):
    spec = tmp_path / "sweep.txt"
    spec.write_text(
        f"axis = {axis}\nvalues = {values}\nseeds = {seeds}\noutput_dir = out\n"
        "n = 6\nd_init = 5\nn_iter = 2\nepochs = 10\nouter_loops = 5\nk = 2\n" + extra
    )
    return spec


def test_sweep_counts_and_stats_idempotence(tmp_path, capsys):
    spec = _write_spec(tmp_path)
    assert main(["sweep", str(spec), "--workers", "1"]) == 0
    out_dir = tmp_path / "out"
    records = sorted(p for p in os.listdir(out_dir) if p.endswith(".jsonl"))
    assert len(records) == 30
    agg = (out_dir / "aggregate.csv").read_text()
    rows = [l for l in agg.splitlines() if not l.startswith("#")]
    assert rows[0].startswith("axis_value,mean_residual,std_residual,mean_improvement_rate")
    assert [r.split(",")[0] for r in rows[1:]] == ["1", "100", "all"]
    all_row = rows[-1].split(",")
    assert float(all_row[3]) == 0.0
    assert main(["stats", str(out_dir / "*.jsonl"), "-o", str(tmp_path / "again.csv")]) == 0
    assert (tmp_path / "again.csv").read_text() == agg


def test_sweep_parallel_matches_sequential(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir(), b.mkdir()
    for d, workers in ((a, "1"), (b, "2")):
        spec = _write_spec(d, values="2, all", seeds="0,1")
        assert main(["sweep", str(spec), "--workers", workers]) == 0
    names = sorted(os.listdir(a / "out"))
    assert names == sorted(os.listdir(b / "out"))
    for n in names:
        assert (a / "out" / n).read_bytes() == (b / "out" / n).read_bytes()


def test_sweep_other_axis_has_baselines(tmp_path):
    spec = _write_spec(tmp_path, axis="k", values="2, 3", seeds="0,1", extra="policy = fifo:3\n")
    assert main(["sweep", str(spec), "--workers", "1"]) == 0
    names = os.listdir(tmp_path / "out")
    assert sum(n.startswith("baseline__") for n in names) == 4
    recs = load_records([str(tmp_path / "out" / "*.jsonl")])
    rows = aggregate(recs)
    assert [r.axis_value for r in rows] == ["2", "3"]
    assert all(r.n_runs == 2 and r.mean_improvement_rate is not None for r in rows)


def test_sweep_bad_spec(tmp_path):
    spec = tmp_path / "s.txt"
    spec.write_text("axis = temperature\nvalues = 1\nseeds = 0\n")
    assert main(["sweep", str(spec)]) == 2
    spec.write_text("axis = k\nvalues = all\nseeds = 0\n")
    assert main(["sweep", str(spec)]) == 2


def _fake_record(value, seed, best, optimum=-5.0, complete=True):
    return RunRecord(config={}, seed=seed, optimum=optimum, best_objective=best, complete=complete,
                     meta={"sweep": {"value": value, "value_index": 0}})


def test_stats_hand_arithmetic():
    rows = aggregate([_fake_record("", 0, -4.0)])
    assert rows[0].mean_residual == 1.0 and rows[0].std_residual == 0.0
    rows = aggregate([_fake_record("", 0, -4.0), _fake_record("", 1, -2.0)])
    assert rows[0].mean_residual == 2.0 and rows[0].std_residual == 1.0


def test_stats_counts_failures():
    rows = aggregate([_fake_record("", 0, -4.0), _fake_record("", 1, None, complete=False)])
    assert rows[0].n_runs == 1 and rows[0].n_failed == 1
    assert "population" in to_csv(rows).splitlines()[0]


def test_stats_no_match(tmp_path):
    assert main(["stats", str(tmp_path / "*.jsonl")]) == 2
