import json
import math

import numpy as np
import pytest

from goldstein.cli import main
from goldstein.harness import ExperimentConfig, build_objective, random_unit_sphere, run_experiment
from goldstein.plotting import plot_convergence
from goldstein.trace import CSV_HEADER, Trace, TraceRow, read_csv, write_csv


def small_config(tmp_path, **kw):
    base = dict(objective={"instance": {"seed": 1, "dimension": 4, "pieces": 3}},
                algorithm="alg7", betas=[0.25, 0.5], x0={"random_unit_sphere": 1},
                output_dir=str(tmp_path), n=12, seed=1)
    base.update(kw)
    return ExperimentConfig.from_dict(base)


def test_csv_round_trip():
    rows = [TraceRow(1, 3, 0, 0, 0.1, 1 / 3, math.pi, 1e-300),
            TraceRow(1, 5, 0, 0, 0.05, 0.2, 0.0, 0.0)]
    text = write_csv(Trace(1.0, 2.0, rows))
    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    back = read_csv(text, 1.0, 2.0)
    assert back.rows == rows
    assert len(back.steps) == 1


def test_csv_bad_header():
    with pytest.raises(ValueError):
        read_csv("a,b\n1,2\n")


def test_build_objective():
    f = build_objective({"builtin": "quartic", "alpha": 2.0, "dim": 3})
    assert f.dim == 3 and f.lipschitz == 2.0
    f = build_objective({"builtin": "max_affine", "slopes": [[1.0], [-1.0]]})
    assert f(np.array([-2.0])) == 2.0
    with pytest.raises(ValueError):
        build_objective({"alpha": 1.0})


def test_random_unit_sphere():
    x = random_unit_sphere(5, 10)
    assert np.linalg.norm(x) == pytest.approx(1.0)
    np.testing.assert_array_equal(x, random_unit_sphere(5, 10))


def test_config_validation(tmp_path):
    with pytest.raises(ValueError):
        small_config(tmp_path, algorithm="alg9")
    with pytest.raises(ValueError):
        small_config(tmp_path, unknown=1)
    with pytest.raises(ValueError):
        small_config(tmp_path, algorithm="alg4", betas=[2.0])
    with pytest.raises(ValueError):
        small_config(tmp_path, betas=[])


def test_sweep_outputs_and_ledger_conservation(tmp_path):
    summary = run_experiment(small_config(tmp_path))
    assert {r["tag"] for r in summary["runs"]} == {"alg7_beta0.25", "alg7_beta0.5"}
    on_disk = json.loads((tmp_path / "summary.json").read_text())
    assert on_disk == json.loads(json.dumps(summary))
    for run in summary["runs"]:
        trace = read_csv(tmp_path / run["trace"])
        last = trace.rows[-1]
        # the trace's final counters are the run's totals
        assert (last.s_goldstein, last.s_approx, last.s_subgrad) == (
            run["total_goldstein_calls"], run["total_approx_calls"], run["total_subgrad_evals"])
        assert run["total_calls"] == run["total_approx_calls"]
        assert run["accepted_steps"] == len(trace.steps)
        counts = trace.column("s_subgrad")
        assert counts == sorted(counts)
    for name in summary["figures"]:
        assert (tmp_path / name).read_text().lstrip().startswith("<?xml")
    assert summary["figures"] == ["fig_dist_vs_calls.svg", "fig_gap_vs_calls.svg",
                                  "fig_dist_vs_evals.svg"]


def test_exact_runs(tmp_path):
    cfg = small_config(tmp_path, objective={"builtin": "half_sq_norm", "dim": 2},
                       algorithm="alg4", betas=[0.5, 1.0], x0=[1.0, 0.0], max_oracle_calls=40)
    summary = run_experiment(cfg)
    for run in summary["runs"]:
        assert run["total_calls"] == run["total_goldstein_calls"] == 41
        assert run["total_subgrad_evals"] == 0
        assert run["stop_reason"] == "budget"
    assert "fig_dist_vs_evals.svg" not in summary["figures"]


def test_alg3_at_minimizer(tmp_path):
    cfg = small_config(tmp_path, objective={"builtin": "scaled_norm", "dim": 2},
                       algorithm="alg3", x0=[0.0, 0.0], max_oracle_calls=3)
    run = run_experiment(cfg)["runs"][0]
    trace = read_csv(tmp_path / run["trace"])
    assert run["tag"] == "alg3" and run["accepted_steps"] == 0
    assert len(trace.rows) == 1 and trace.rows[0].gap == 0.0


def test_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_experiment(small_config(a, workers=2))
    run_experiment(small_config(b, workers=1))
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    # summary.json records output_dir and workers, which differ on purpose
    for name in names:
        if name != "summary.json":
            assert (a / name).read_bytes() == (b / name).read_bytes(), name
    sa = json.loads((a / "summary.json").read_text())
    sb = json.loads((b / "summary.json").read_text())
    assert sa["runs"] == sb["runs"]


def test_failing_run_does_not_stop_sweep(tmp_path, monkeypatch):
    import goldstein.harness as h

    real = h._run_one

    def flaky(cfg, f, x0, beta):
        if beta == 0.5:
            raise RuntimeError("boom")
        return real(cfg, f, x0, beta)

    monkeypatch.setattr(h, "_run_one", flaky)
    summary = run_experiment(small_config(tmp_path))
    errs = [r for r in summary["runs"] if "error" in r]
    assert len(errs) == 1 and "boom" in errs[0]["error"]
    assert (tmp_path / "trace_alg7_beta0.25.csv").exists()


def test_plot_rejects_empty_trace(tmp_path):
    with pytest.raises(ValueError):
        plot_convergence([Trace(1.0, 1.0)], ["x"], out=tmp_path / "f.svg")
    with pytest.raises(ValueError):
        plot_convergence([], [], out=tmp_path / "f.svg")


def test_plot_png(tmp_path):
    rows = [TraceRow(k, k, 0, 0, 0.1, 1.0, 2.0**-k, 2.0**-k) for k in range(1, 6)]
    out = tmp_path / "f.png"
    plot_convergence([Trace(1, 1, rows)], ["a"], y="gap", out=out, title="t")
    assert out.read_bytes()[:4] == b"\x89PNG"


def test_cli_run_and_plot(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"objective": {"builtin": "scaled_norm", "dim": 1},
                               "algorithm": "alg3", "x0": [1.0], "max_oracle_calls": 30,
                               "figures": False}))
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--output-dir", str(out)]) == 0
    assert "alg3: steps=" in capsys.readouterr().out
    fig = tmp_path / "p.svg"
    assert main(["plot", "--trace", str(out / "trace_alg3.csv"), "--y", "gap", "--out", str(fig)]) == 0
    assert fig.exists()


def test_cli_error_json(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "FileNotFoundError" and err["message"]
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"objective": {"builtin": "nope"}, "algorithm": "alg3"}))
    assert main(["run", "--config", str(cfg), "--output-dir", str(tmp_path)]) == 1
    assert json.loads(capsys.readouterr().err)["error"] == "ValueError"
    assert main(["plot", "--trace", str(tmp_path / "none.csv"), "--out", str(tmp_path / "x.svg")]) == 1
    assert json.loads(capsys.readouterr().err)["error"] == "FileNotFoundError"


def test_cli_selftest(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") >= 4


def test_three_beta_sweep_structure(tmp_path):
    cfg = small_config(tmp_path, objective={"instance": {"seed": 1, "dimension": 10, "pieces": 5}},
                       betas=[0.125, 0.25, 0.5], n=10, figures=False)
    summary = run_experiment(cfg)
    csvs = sorted(tmp_path.glob("trace_*.csv"))
    assert len(csvs) == 3 and (tmp_path / "summary.json").exists()
    for run in summary["runs"]:
        assert run["stop_reason"] == "iterations"
        lines = (tmp_path / run["trace"]).read_text().splitlines()
        # a run that ends on a step has no terminal row: one line per step plus the header
        assert len(lines) == run["accepted_steps"] + 1
        for key in ("final_gap", "final_dist", "total_calls", "total_subgrad_evals", "seed"):
            assert key in run
