"""CLI contract: subcommands, exit codes, determinism, output schemas."""

import json

import pytest

from lazymcmc.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_plan_with_eps(capsys):
    code, out, _ = run_cli(capsys, "plan", "-d", "3", "-a", "2", "--eps", "0.1")
    assert code == 0
    doc = json.loads(out)
    assert doc["n0"] == 40_960_000
    assert doc["cost_burn_in_term"] == 40_960_000
    assert doc["cost_sampling_term"] == 102_400_000_000
    assert doc["cost_total"] == doc["n"] + doc["n0"]
    assert doc["delta"] == 0.5
    assert doc["phi_lower"] == 0.000625
    assert doc["phi_lazy_lower"] == 0.0003125


def test_plan_with_samples(capsys):
    code, out, _ = run_cli(capsys, "plan", "-d", "2", "-a", "0", "-n", "10000")
    assert code == 0
    doc = json.loads(out)
    assert doc["n0"] == 0
    assert doc["headline_error_bound"] == pytest.approx(240.0, rel=1e-9)


def test_plan_missing_target_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "plan", "-d", "3", "-a", "2")
    assert code == 2
    assert "error" in err


def test_plan_conflicting_targets(capsys):
    code, _, _ = run_cli(capsys, "plan", "-d", "3", "-a", "2", "--eps", "0.1", "-n", "10")
    assert code == 2


def test_integrate_json_deterministic(capsys):
    argv = (
        "integrate", "-d", "2", "--rho", "uniform", "--f", "coord2:1",
        "-n", "20000", "--seed", "7", "--reps", "3",
    )
    code, out1, _ = run_cli(capsys, *argv)
    assert code == 0
    code, out2, _ = run_cli(capsys, *argv)
    assert out1 == out2  # byte-identical
    doc = json.loads(out1)
    assert len(doc["runs"]) == 3
    assert doc["mse_report"]["replications"] == 3
    assert doc["reference"]["value"] == pytest.approx(0.25, rel=1e-6)
    assert abs(doc["mse_report"]["estimate_mean"] - 0.25) < 0.05


def test_integrate_single_run(capsys):
    code, out, _ = run_cli(
        capsys, "integrate", "-d", "2", "--rho", "explin:1,0", "--f", "coord:1",
        "-n", "5000", "--n0", "1000", "--seed", "3",
    )
    assert code == 0
    doc = json.loads(out)
    assert "mse_report" not in doc
    assert doc["spec"]["n0"] == 1000
    assert len(doc["runs"]) == 1


def test_integrate_csv(capsys):
    code, out, _ = run_cli(
        capsys, "integrate", "-d", "2", "--rho", "uniform", "--f", "coord2:1",
        "-n", "2000", "--seed", "1", "--reps", "2", "--format", "csv",
    )
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "d,alpha,delta,n,n0,seed,estimate,reference,rmse,bound,margin"
    assert len(lines) == 3


def test_integrate_csv_file_appends(tmp_path, capsys):
    target = tmp_path / "runs.csv"
    argv = (
        "integrate", "-d", "2", "--rho", "uniform", "--f", "one",
        "-n", "500", "--seed", "1", "--reps", "2", "--format", "csv", "-o", str(target),
    )
    assert main(list(argv)) == 0
    assert main(list(argv)) == 0
    capsys.readouterr()
    content = target.read_text()
    assert content.count("d,alpha") == 1  # single header across appends
    assert len(content.strip().split("\n")) == 5


def test_integrate_bad_density_spec(capsys):
    code, _, err = run_cli(
        capsys, "integrate", "-d", "2", "--rho", "nope:1", "--f", "one", "-n", "100",
    )
    assert code == 2
    assert "nope" in err


def test_integrate_wrong_arity_spec(capsys):
    code, _, _ = run_cli(
        capsys, "integrate", "-d", "3", "--rho", "explin:1,2", "--f", "one", "-n", "100",
    )
    assert code == 2


def test_verify_passes_and_is_deterministic(capsys):
    code, out1, _ = run_cli(capsys, "verify", "--seed", "42")
    assert code == 0
    assert "PASS" in out1
    assert "FAIL" not in out1
    code, out2, _ = run_cli(capsys, "verify", "--seed", "42")
    assert out1 == out2


def test_sweep_cost_increases_with_dimension(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--dims", "1,2,4,8", "--alphas", "1", "--eps", "0.1")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0].startswith("d,alpha,delta,")
    costs = [float(line.split(",")[6]) for line in lines[1:]]
    assert costs == sorted(costs)
    assert len(set(costs)) == len(costs)


def test_sweep_burn_in_column_formula(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--dims", "2", "--alphas", "0,1,2,4", "--eps", "0.1")
    assert code == 0
    lines = out.strip().split("\n")[1:]
    for line, alpha in zip(lines, (0.0, 1.0, 2.0, 4.0)):
        n0 = int(line.split(",")[4])
        assert n0 == int(1280000 * alpha * 3 * max(3.0, alpha**2))  # exact integers here


def test_sweep_single_cell(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--dims", "3", "--alphas", "2", "--eps", "1.0")
    assert code == 0
    lines = out.strip().split("\n")
    assert len(lines) == 2


def test_sweep_empty_grid(capsys):
    code, _, _ = run_cli(capsys, "sweep", "--dims", "", "--alphas", "1", "--eps", "0.1")
    assert code == 2


def test_integrate_runtime_failure_exits_one(monkeypatch, capsys):
    import lazymcmc.cli as cli
    from lazymcmc.densities import DensityEvaluationError

    def broken(*args, **kwargs):
        raise DensityEvaluationError("step 5: log-density of 'bad' is nan at [0.1, 0.2]")

    monkeypatch.setattr(cli, "run_replications", broken)
    code, _, err = run_cli(
        capsys, "integrate", "-d", "2", "--rho", "uniform", "--f", "one", "-n", "10",
    )
    assert code == 1
    assert "step 5" in err


def test_config_file_defaults_and_flag_precedence(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"dimension": 3, "alpha": 2.0, "eps": 0.1}))
    code, out, _ = run_cli(capsys, "--config", str(config), "plan")
    assert code == 0
    assert json.loads(out)["n0"] == 40_960_000
    # explicit flag overrides the config value
    code, out, _ = run_cli(capsys, "--config", str(config), "plan", "-a", "0")
    assert code == 0
    assert json.loads(out)["n0"] == 0


def test_output_file(tmp_path, capsys):
    target = tmp_path / "plan.json"
    code, out, _ = run_cli(capsys, "plan", "-d", "2", "-a", "1", "-n", "100", "-o", str(target))
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text())["n"] == 100
