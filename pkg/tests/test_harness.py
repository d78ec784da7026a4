import csv
import json

import numpy as np
import pytest

from mcmcbench.cli import main as cli_main
from mcmcbench.harness import (
    REPORT_COLUMNS,
    ExperimentConfig,
    RunReport,
    emit_report,
    make_dataset,
    repeated_datasets,
    run_experiment,
)


def quick_cfg(**kw):
    defaults = dict(prior="LM-C", n=30, p=3, seed=0, n_iter=300, n_burn=100,
                    backends=("gibbs",))
    defaults.update(kw)
    return ExperimentConfig(**defaults)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(prior="LM-X")
    with pytest.raises(ValueError):
        ExperimentConfig(prior="LM-C", chains=0)
    with pytest.raises(ValueError):
        ExperimentConfig(prior="LM-C", repeats=0)


def test_schedule_defaults():
    assert ExperimentConfig(prior="LM-C").sampler_config("gibbs").n_iter == 11000
    assert ExperimentConfig(prior="LM-C").sampler_config("gibbs").n_burn == 1000
    assert ExperimentConfig(prior="LM-L").sampler_config("nuts").n_iter == 20000
    assert ExperimentConfig(prior="AFT-NH").sampler_config("rwmh").n_burn == 5000
    assert ExperimentConfig(prior="LR-L").sampler_config("gibbs").n_iter == 15000
    assert ExperimentConfig(prior="LM-C").sampler_config("gibbs").n_thin == 2


def test_backends_string_split():
    cfg = quick_cfg(backends="gibbs,nuts")
    assert cfg.backends == ("gibbs", "nuts")


def test_same_dataset_across_backends():
    cfg = quick_cfg(backends=("gibbs", "rwmh"))
    a = make_dataset(cfg)
    b = make_dataset(cfg)
    np.testing.assert_array_equal(a.y, b.y)
    np.testing.assert_array_equal(a.X, b.X)


def test_run_experiment_rows_and_timing():
    cfg = quick_cfg(backends=("gibbs", "nuts"))
    reports = run_experiment(cfg)
    assert set(reports) == {"gibbs", "nuts"}
    for rep in reports.values():
        row = rep.row()
        assert row["N_it"] == 300
        assert row["N_it_per_s"] == pytest.approx(300 / rep.t_s)
        assert row["kl"] == ""  # not a mixture
        assert 0 < row["mean_E"] <= 1.0
    assert reports["nuts"].row()["n_divergences"] != "-"
    assert reports["gibbs"].row()["n_divergences"] == ""  # not applicable


def test_determinism_bitwise(tmp_path):
    # everything seed-derived is bitwise identical; the two wall-clock
    # columns (t_s, N_it_per_s) are the only nondeterministic fields
    out1, out2 = tmp_path / "a", tmp_path / "b"
    run_experiment(quick_cfg(out=str(out1)))
    run_experiment(quick_cfg(out=str(out2)))
    assert (out1 / "chain_gibbs_0.csv").read_bytes() == (out2 / "chain_gibbs_0.csv").read_bytes()

    def strip_timing(path):
        with path.open() as fh:
            rows = list(csv.DictReader(fh))
        for row in rows:
            row.pop("t_s")
            row.pop("N_it_per_s")
        return rows

    assert strip_timing(out1 / "report.csv") == strip_timing(out2 / "report.csv")


def test_csv_round_trip(tmp_path):
    cfg = quick_cfg()
    reports = run_experiment(cfg)
    path = tmp_path / "r.csv"
    emit_report(list(reports.values()), path, fmt="csv")
    with path.open() as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1
    mem = reports["gibbs"].row()
    assert float(rows[0]["mean_E"]) == mem["mean_E"]
    assert float(rows[0]["lpml"]) == mem["lpml"]
    assert rows[0]["kl"] == ""
    assert list(rows[0]) == REPORT_COLUMNS


def test_json_mirrors_csv(tmp_path):
    reports = run_experiment(quick_cfg())
    path = tmp_path / "r.json"
    emit_report(list(reports.values()), path, fmt="json")
    data = json.loads(path.read_text())
    assert data[0]["prior"] == "LM-C"
    assert set(data[0]) == set(REPORT_COLUMNS)


def test_skipped_row_dash_convention():
    rep = RunReport(cfg=quick_cfg(), backend="nuts", skipped=True, note="incompatible")
    row = rep.row()
    assert row["mean_E"] == "-"
    assert row["lpml"] == "-"
    assert row["backend"] == "nuts"


def test_emit_report_empty_raises(tmp_path):
    with pytest.raises(ValueError):
        emit_report([], tmp_path / "x.csv")


def test_parallel_chains_match_sequential_seeds():
    # chain i derives its stream from (seed, spawn_key=(i,)), so running
    # K chains in a pool must equal K one-chain runs
    cfg = quick_cfg(chains=3)
    rep = run_experiment(cfg)["gibbs"]
    assert len(rep.chains) == 3
    from mcmcbench.harness import _chain_worker

    ds = make_dataset(cfg)
    for i in range(3):
        solo = _chain_worker((cfg, ds, "gibbs", i))
        np.testing.assert_array_equal(rep.chains[i].samples, solo.samples)


def test_k1_equals_run_experiment():
    a = run_experiment(quick_cfg(chains=1))["gibbs"]
    b = run_experiment(quick_cfg())["gibbs"]
    np.testing.assert_array_equal(a.chain.samples, b.chain.samples)


def test_repeated_datasets_smoke():
    cfg = quick_cfg(repeats=2, backends=("gibbs", "rwmh"))
    result = repeated_datasets(cfg)
    assert len(result["rows"]) == 4  # 2 datasets x 2 backends
    seeds = {row["seed"] for row in result["rows"]}
    assert seeds == {0, 1}
    stats = result["summary"]["gibbs"]["mean_E"]
    assert set(stats) == {"mean", "sd", "min", "max"}
    assert stats["min"] <= stats["mean"] <= stats["max"]


def test_repeated_datasets_writes_sweep(tmp_path):
    cfg = quick_cfg(repeats=2, out=str(tmp_path / "sw"))
    repeated_datasets(cfg)
    with (tmp_path / "sw" / "sweep.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2
    assert json.loads((tmp_path / "sw" / "summary.json").read_text())


def test_mixture_report_has_kl_and_no_error():
    cfg = ExperimentConfig(prior="MM", n=40, H=2, seed=1, n_iter=400, n_burn=200,
                           backends=("gibbs",))
    row = run_experiment(cfg)["gibbs"].row()
    assert row["kl"] != ""
    assert row["error"] == ""


# ---------------------------------------------------------------------------
# CLI


def test_cli_run(tmp_path, capsys):
    code = cli_main([
        "run", "--prior", "LM-C", "--n", "30", "--p", "3", "--seed", "1",
        "--niter", "300", "--nburn", "100", "--backends", "gibbs",
        "--out", str(tmp_path / "o"),
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith(",".join(REPORT_COLUMNS[:3]))
    assert (tmp_path / "o" / "report.csv").exists()
    assert (tmp_path / "o" / "report.json").exists()


def test_cli_sweep(capsys):
    code = cli_main([
        "sweep", "--prior", "LM-C", "--n", "30", "--p", "3", "--repeats", "2",
        "--niter", "300", "--nburn", "100", "--backends", "gibbs",
    ])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 3  # header + 2 rows


def test_cli_config_file_with_flag_override(tmp_path, capsys):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({
        "prior": "LM-C", "n": 30, "p": 3, "seed": 5, "n_iter": 300,
        "n_burn": 100, "backends": "gibbs",
    }))
    code = cli_main(["run", "--config", str(cfg_file), "--seed", "9",
                     "--format", "json"])
    assert code == 0
    rows = json.loads(capsys.readouterr().out)
    assert rows[0]["seed"] == 9  # flag wins over file


def test_cli_error_is_machine_readable(capsys):
    code = cli_main(["run", "--prior", "BOGUS"])
    assert code != 0
    err = json.loads(capsys.readouterr().err)
    assert "error" in err and "message" in err


def test_cli_model_mismatch(capsys):
    code = cli_main(["run", "--prior", "LM-C", "--model", "LR"])
    assert code != 0
