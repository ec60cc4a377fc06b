"""Benchmark harness tests: seeding, records, summaries, CSV round trips."""

import math

import numpy as np
import pytest

from bccblasso.errors import ConfigError, InvalidArgumentError, ZeroReferenceError
from bccblasso.experiments import (
    CellSummary,
    ExperimentConfig,
    TrialRecord,
    draw_targets,
    experiment_config_from_dict,
    experiment_config_to_dict,
    read_records_csv,
    relative_error,
    run_grid,
    run_trial,
    summarize,
    write_plot_data_csv,
    write_records_csv,
    write_summary_csv,
)

TINY = dict(
    m1_count=10,
    m2_count=6,
    element_count=24,
    l2=8,
    l1_values=(8,),
    iteration_values=(20,),
    trials=2,
    base_seed=321,
    solvers=("ista",),
)


def test_relative_error():
    a = np.array([3.0 + 4.0j, 0.0])
    b = np.array([3.0 + 4.0j, 1.0])
    assert relative_error(a, b) == pytest.approx(1.0 / 5.0, rel=1e-15)
    assert relative_error(a, a) == 0.0
    with pytest.raises(InvalidArgumentError):
        relative_error(a, b[:1])
    with pytest.raises(ZeroReferenceError):
        relative_error(np.zeros(2, dtype=complex), b)


def test_draw_targets():
    rng = np.random.default_rng(5)
    for _ in range(50):
        targets = draw_targets(rng, (1, 10))
        assert 1 <= len(targets) <= 10
        for target in targets:
            assert -0.5 <= target.f1 < 0.5
            assert -0.5 <= target.f2 < 0.5
            np.testing.assert_allclose(abs(target.amplitude), 1.0, rtol=1e-12)
    assert len(draw_targets(rng, (3, 3))) == 3


def test_experiment_config_defaults_match_benchmark_setup():
    config = ExperimentConfig()
    assert (config.m1_count, config.m2_count, config.element_count) == (51, 16, 40)
    assert config.l2 == 32
    assert config.l1_values == (64, 128, 256, 512)
    assert config.iteration_values == (50, 100, 200, 400)
    assert config.snr_db == 15.0
    assert config.k_range == (1, 10)
    assert config.trials == 10
    assert config.solvers == ("ista", "fista", "admm")
    assert config.tau_fraction == 0.1


def test_experiment_config_validation():
    with pytest.raises(InvalidArgumentError):
        ExperimentConfig(solvers=("ista", "newton"))
    with pytest.raises(InvalidArgumentError):
        ExperimentConfig(trials=0)
    with pytest.raises(InvalidArgumentError):
        ExperimentConfig(l1_values=())
    with pytest.raises(InvalidArgumentError):
        ExperimentConfig(element_count=3)
    with pytest.raises(InvalidArgumentError):
        ExperimentConfig(element_count=1000)  # more than the full URA
    with pytest.raises(InvalidArgumentError):
        ExperimentConfig(k_range=(5, 2))
    with pytest.raises(InvalidArgumentError):
        ExperimentConfig(tau_fraction=0.0)
    config = ExperimentConfig(l1_values=[16, 32], solvers=["fista"])  # lists coerce
    assert config.l1_values == (16, 32)
    assert config.solvers == ("fista",)


def test_trial_record_validation():
    TrialRecord("ista", 8, 8, 10, 0, float("nan"), 0.5, float("nan"), 1, float("nan"), 0.1)
    with pytest.raises(InvalidArgumentError):
        TrialRecord("ista", 8, 8, 10, 0, -1.0, 0.5, 0.0, 1, 0.0, 0.1)
    with pytest.raises(InvalidArgumentError):
        TrialRecord("ista", 8, 8, 10, 0, 1.0, 0.0, 0.0, 1, 0.0, 0.1)
    with pytest.raises(InvalidArgumentError):
        TrialRecord("ista", 8, 8, 10, 0, 1.0, 0.5, -0.5, 1, 0.0, 0.1)


def test_run_trial_is_deterministic():
    config = ExperimentConfig(**TINY)
    first = run_trial(config, "ista", 8, 20, trial_index=1)
    second = run_trial(config, "ista", 8, 20, trial_index=1)
    assert first.seed == second.seed
    assert first.epsilon_r == second.epsilon_r  # bitwise identical estimates
    assert first.solver == "ista" and first.l1 == 8 and first.l2 == 8
    assert first.n_iter == 20 and first.trial_index == 1
    assert first.t_fast_ms > 0 and first.t_reg_ms > 0
    third = run_trial(config, "ista", 8, 20, trial_index=0)
    assert third.seed != first.seed


def test_run_trial_seeds_differ_across_solvers():
    config = ExperimentConfig(**dict(TINY, solvers=("ista", "fista", "admm")))
    seeds = {
        solver: run_trial(config, solver, 8, 20, 0).seed for solver in ("ista", "fista", "admm")
    }
    assert len(set(seeds.values())) == 3


def test_run_trial_skips_dense_when_over_budget():
    # budget admits the M x L dictionary (24*64*16 = 24576 bytes) but not
    # the L x L dense matrix (64*64*16 = 65536 bytes)
    config = ExperimentConfig(**dict(TINY, memory_budget_bytes=30_000))
    record = run_trial(config, "ista", 8, 20, 0)
    assert math.isnan(record.t_reg_ms)
    assert math.isnan(record.epsilon_r)
    assert math.isnan(record.t_reg_precompute_ms)
    assert record.t_fast_ms > 0


def test_run_trial_rejects_bad_arguments():
    config = ExperimentConfig(**TINY)
    with pytest.raises(InvalidArgumentError):
        run_trial(config, "newton", 8, 20, 0)
    with pytest.raises(InvalidArgumentError):
        run_trial(config, "ista", 8, 0, 0)


def test_summarize_groups_and_averages():
    records = [
        TrialRecord("ista", 8, 8, 10, 0, 2.0, 1.0, 1e-12, 1, 0.5, 0.1),
        TrialRecord("ista", 8, 8, 10, 1, 4.0, 3.0, 3e-12, 2, 0.5, 0.1),
        TrialRecord("fista", 8, 8, 10, 0, 6.0, 5.0, 5e-12, 3, 0.5, 0.1),
    ]
    summaries = summarize(records)
    assert [(s.solver, s.l1, s.n_iter, s.trials) for s in summaries] == [
        ("ista", 8, 10, 2),
        ("fista", 8, 10, 1),
    ]
    assert summaries[0].mean_t_reg_ms == pytest.approx(3.0)
    assert summaries[0].mean_t_fast_ms == pytest.approx(2.0)
    assert summaries[0].mean_epsilon_r == pytest.approx(2e-12)


def test_summarize_propagates_nan():
    records = [
        TrialRecord("ista", 8, 8, 10, 0, 2.0, 1.0, 1e-12, 1, 0.5, 0.1),
        TrialRecord("ista", 8, 8, 10, 1, float("nan"), 3.0, float("nan"), 2, float("nan"), 0.1),
    ]
    summary = summarize(records)[0]
    assert math.isnan(summary.mean_t_reg_ms)
    assert math.isnan(summary.mean_epsilon_r)
    assert summary.mean_t_fast_ms == pytest.approx(2.0)


def test_run_grid_shape_and_order():
    config = ExperimentConfig(
        **dict(TINY, solvers=("ista", "admm"), l1_values=(8, 16), trials=1)
    )
    records, summaries = run_grid(config)
    assert len(records) == 2 * 2 * 1 * 1
    assert [(r.solver, r.l1) for r in records] == [
        ("ista", 8), ("ista", 16), ("admm", 8), ("admm", 16),
    ]
    assert len(summaries) == 4
    assert all(s.trials == 1 for s in summaries)
    assert all(s.l2 == 8 for s in summaries)


def test_records_csv_round_trip(tmp_path):
    config = ExperimentConfig(**dict(TINY, memory_budget_bytes=30_000))
    records = [
        run_trial(config, "ista", 8, 20, 0),  # NaN regular columns
        run_trial(ExperimentConfig(**TINY), "ista", 8, 20, 1),
    ]
    path = tmp_path / "records.csv"
    write_records_csv(path, records)
    header = path.read_text().splitlines()[0]
    assert header == (
        "solver,l1,l2,n_iter,trial_index,t_reg_ms,t_fast_ms,epsilon_r,seed,"
        "t_reg_precompute_ms,t_fast_precompute_ms"
    )
    loaded = read_records_csv(path)
    assert len(loaded) == 2
    for original, back in zip(records, loaded):
        assert back.solver == original.solver
        assert (back.l1, back.l2, back.n_iter, back.trial_index) == (
            original.l1, original.l2, original.n_iter, original.trial_index,
        )
        assert back.seed == original.seed
        for field in ("t_reg_ms", "t_fast_ms", "epsilon_r", "t_reg_precompute_ms"):
            a, b = getattr(original, field), getattr(back, field)
            assert (math.isnan(a) and math.isnan(b)) or a == b  # 17 digits: lossless


def test_summary_and_plot_csv(tmp_path):
    summaries = [
        CellSummary("ista", 8, 8, 10, 2, 3.0, 2.0, 2e-12),
        CellSummary("admm", 16, 8, 10, 2, float("nan"), 4.0, float("nan")),
    ]
    write_summary_csv(tmp_path / "summary.csv", summaries)
    lines = (tmp_path / "summary.csv").read_text().splitlines()
    assert lines[0] == "solver,l1,l2,n_iter,trials,mean_t_reg_ms,mean_t_fast_ms,mean_epsilon_r"
    assert lines[1].startswith("ista,8,8,10,2,3,2,")
    assert "nan" in lines[2]

    write_plot_data_csv(tmp_path / "plot.csv", summaries)
    lines = (tmp_path / "plot.csv").read_text().splitlines()
    assert lines[0] == "solver,l1,n_iter,mean_t_reg_ms,mean_t_fast_ms,mean_epsilon_r"
    assert len(lines) == 3


def test_config_dict_round_trip():
    config = ExperimentConfig(**dict(TINY, solvers=("ista", "admm")))
    payload = experiment_config_to_dict(config)
    assert payload["l1_values"] == [8]  # JSON-friendly lists
    rebuilt = experiment_config_from_dict(payload)
    assert rebuilt == config


def test_config_dict_rejects_unknown_and_invalid():
    with pytest.raises(ConfigError) as info:
        experiment_config_from_dict({"m1_count": 10, "m2_counts": 6})
    assert info.value.field == "m2_counts"
    with pytest.raises(ConfigError):
        experiment_config_from_dict({"trials": 0})
