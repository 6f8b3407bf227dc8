"""Tests for the Monte Carlo harness, sweeps and the grid equilibrium oracle."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest

from oracles import distribution_by_enumeration, payoffs_by_enumeration
from tencards.core import (
    EntangledState,
    GameDomainError,
    Outcome,
    PayoffMatrix,
    StrategyProfile,
    expected_payoffs,
    nash_equilibria,
)
from tencards.experiments import (
    EquilibriumGridReport,
    ExperimentConfig,
    ExperimentReport,
    equilibrium_oracle_grid,
    payoff_grids,
    run_experiment,
    sweep,
)

BOS = PayoffMatrix(5.0, 3.0, 1.0)


def make_config(**overrides) -> ExperimentConfig:
    base = dict(
        payoffs=BOS, a_sq=0.5, p=0.5, q=0.5, trials=10_000, seed=7, backend="machine"
    )
    base.update(overrides)
    return ExperimentConfig(**base)


# ---------------------------------------------------------------------------
# run_experiment
# ---------------------------------------------------------------------------

def test_deterministic_branch_is_exact():
    for backend in ("machine", "cards"):
        report = run_experiment(
            make_config(a_sq=1.0, p=1.0, q=1.0, trials=1000, backend=backend)
        )
        assert report.counts[Outcome.OO] == 1000
        assert report.counts[Outcome.OT] == 0
        assert report.empirical_payoffs == (5.0, 3.0)
        assert report.standard_errors == (0.0, 0.0)
        assert report.abs_errors == (0.0, 0.0)


def test_counts_sum_to_trials():
    report = run_experiment(make_config(trials=12_345))
    assert sum(report.counts.values()) == 12_345


def test_half_entangled_idle_players():
    # At p=q=1 and a_sq=1/2 Alice's analytic payoff is (alpha+beta)/2 = 4.
    report = run_experiment(make_config(a_sq=0.5, p=1.0, q=1.0, trials=100_000))
    assert report.analytic_payoffs[0] == pytest.approx(4.0, abs=1e-12)
    assert report.abs_errors[0] < 4 * report.standard_errors[0]


def test_center_point_empirical():
    report = run_experiment(make_config(trials=100_000, seed=11))
    for side in (0, 1):
        assert report.analytic_payoffs[side] == pytest.approx(2.5, abs=1e-12)
        assert report.abs_errors[side] < 4 * report.standard_errors[side]


def test_empirical_matches_enumeration_oracle():
    rng = np.random.default_rng(2025)
    for trial in range(5):
        p, q, a_sq = (float(x) for x in rng.random(3))
        config = make_config(p=p, q=q, a_sq=a_sq, trials=20_000, seed=trial, backend="cards")
        report = run_experiment(config)
        ref = payoffs_by_enumeration(p, q, a_sq, BOS)
        assert report.analytic_payoffs[0] == pytest.approx(ref[0], abs=1e-12)
        assert report.analytic_payoffs[1] == pytest.approx(ref[1], abs=1e-12)
        assert report.abs_errors[0] < 4 * report.standard_errors[0]
        assert report.abs_errors[1] < 4 * report.standard_errors[1]


def test_outcome_frequencies_match_enumeration():
    p, q, a_sq = 0.3, 0.8, 0.6
    n = 50_000
    report = run_experiment(make_config(p=p, q=q, a_sq=a_sq, trials=n, seed=3))
    ref = distribution_by_enumeration(p, q, a_sq)
    for outcome, count in report.counts.items():
        prob = ref[outcome.value]
        tol = 4 * math.sqrt(prob * (1 - prob) / n) + 1e-12
        assert abs(count / n - prob) < tol


def test_machine_draw_statistics():
    report = run_experiment(make_config(trials=1000))
    assert report.mean_draws == 1.0
    assert report.tie_breaks == 0


def test_cards_draw_statistics():
    report = run_experiment(make_config(a_sq=0.5, trials=1000, backend="cards"))
    assert report.mean_draws == 1.0  # one digit always decides at a_sq = 1/2
    report = run_experiment(make_config(a_sq=0.37, trials=1000, backend="cards"))
    assert report.mean_draws >= 1.0
    assert report.tie_breaks == 0


def test_reports_are_reproducible():
    a = run_experiment(make_config(seed=99, backend="cards"))
    b = run_experiment(make_config(seed=99, backend="cards"))
    assert a == b
    assert json.dumps(a.to_json_dict(), sort_keys=True) == json.dumps(
        b.to_json_dict(), sort_keys=True
    )
    c = run_experiment(make_config(seed=100, backend="cards"))
    assert a != c


def test_config_validation():
    with pytest.raises(GameDomainError):
        make_config(trials=0)
    with pytest.raises(GameDomainError):
        make_config(backend="levers")
    with pytest.raises(GameDomainError):
        make_config(p=1.5)
    with pytest.raises(GameDomainError):
        make_config(a_sq=-0.1)


def test_convergence_rate():
    # Error at N=10^4 vs N=10^6 should shrink roughly like 1/sqrt(N): the
    # per-seed error ratio is noisy but its median over 10 seeds is near 10.
    ratios = []
    for seed in range(10):
        small = run_experiment(make_config(p=0.4, q=0.7, a_sq=0.3, trials=10_000, seed=seed))
        large = run_experiment(make_config(p=0.4, q=0.7, a_sq=0.3, trials=1_000_000, seed=seed))
        ratios.append(small.abs_errors[0] / max(large.abs_errors[0], 1e-15))
    assert 5 <= float(np.median(ratios)) <= 20


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def test_sweep_over_entanglement():
    reports = sweep(make_config(p=1.0, q=1.0, trials=100_000), "a_sq", [0.0, 0.5, 1.0])
    freqs = [r.counts[Outcome.OO] / r.config.trials for r in reports]
    assert freqs[0] == 0.0
    assert freqs[2] == 1.0
    assert abs(freqs[1] - 0.5) < 4 * math.sqrt(0.25 / 100_000)


def test_sweep_over_p():
    reports = sweep(make_config(a_sq=1.0, q=1.0, trials=100), "p", [0.0, 1.0])
    assert [r.analytic_payoffs[0] for r in reports] == [1.0, 5.0]


def test_degenerate_sweep_equals_single_run():
    base = make_config(trials=5000, seed=21, backend="cards")
    (row,) = sweep(base, "q", [0.5])
    assert row == run_experiment(make_config(trials=5000, seed=21, backend="cards", q=0.5))


def test_sweep_subseeding():
    base = make_config(trials=100, seed=12)
    reports = sweep(base, "a_sq", [0.1, 0.2, 0.3, 0.4])
    assert [r.config.seed for r in reports] == [12 ^ 0, 12 ^ 1, 12 ^ 2, 12 ^ 3]
    assert [r.config.a_sq for r in reports] == [0.1, 0.2, 0.3, 0.4]


def test_sweep_validation():
    with pytest.raises(GameDomainError):
        sweep(make_config(), "a_sq", [])
    with pytest.raises(GameDomainError):
        sweep(make_config(), "alpha", [1.0])
    with pytest.raises(GameDomainError):
        sweep(make_config(), "p", [0.5, 2.0])


# ---------------------------------------------------------------------------
# equilibrium grid oracle
# ---------------------------------------------------------------------------

def test_payoff_grids_match_closed_forms():
    pvals = np.linspace(0.0, 1.0, 11)
    qvals = np.linspace(0.0, 1.0, 11)
    state = EntangledState(0.3)
    grid_a, grid_b = payoff_grids(pvals, qvals, state, BOS)
    for i in (0, 3, 10):
        for j in (0, 5, 7):
            ref = expected_payoffs(
                StrategyProfile(float(pvals[i]), float(qvals[j])), state, BOS
            )
            assert grid_a[i, j] == pytest.approx(ref[0], abs=1e-12)
            assert grid_b[i, j] == pytest.approx(ref[1], abs=1e-12)


def test_oracle_classical_bos():
    report = equilibrium_oracle_grid(EntangledState(1.0), BOS, step=0.01)
    assert set(report.mutual_cells) == {(0.0, 0.0), (1.0, 1.0)}
    assert len(report.crossing_cells) == 1
    (cell,) = report.crossing_cells
    assert abs(cell[0] - 2 / 3) <= 0.01
    assert abs(cell[1] - 1 / 3) <= 0.01
    assert report.matched


def test_oracle_half_entangled():
    # p* = q* = 1/2 sits exactly on the grid, so it appears as a mutual cell.
    report = equilibrium_oracle_grid(EntangledState(0.5), BOS, step=0.01)
    assert (0.5, 0.5) in report.mutual_cells
    assert (0.0, 0.0) in report.mutual_cells
    assert (1.0, 1.0) in report.mutual_cells
    assert report.matched


def test_oracle_constant_game_marks_everything():
    report = equilibrium_oracle_grid(EntangledState(0.5), PayoffMatrix(2.0, 2.0, 2.0), step=0.1)
    assert len(report.mutual_cells) == 11 * 11
    assert report.matched


def test_oracle_step_validation():
    with pytest.raises(GameDomainError):
        equilibrium_oracle_grid(EntangledState(0.5), BOS, step=0.0)
    with pytest.raises(GameDomainError):
        equilibrium_oracle_grid(EntangledState(0.5), BOS, step=0.2)
    with pytest.raises(GameDomainError):
        equilibrium_oracle_grid(EntangledState(0.5), BOS, step=0.03)


def test_oracle_agreement_random_instances():
    rng = np.random.default_rng(31337)
    for _ in range(10):
        gamma = float(rng.uniform(-3, 3))
        beta = gamma + float(rng.uniform(0.2, 4))
        alpha = beta + float(rng.uniform(0.2, 4))
        state = EntangledState(float(rng.random()))
        pm = PayoffMatrix(alpha, beta, gamma)
        report = equilibrium_oracle_grid(state, pm, step=0.01)
        assert report.matched, (alpha, beta, gamma, state.a_sq)
        assert len(report.equilibria) == 3  # two pure corners and one mixed


def test_oracle_report_serializes():
    report = equilibrium_oracle_grid(EntangledState(1.0), BOS, step=0.05)
    blob = json.dumps(report.to_json_dict())
    parsed = json.loads(blob)
    assert parsed["step"] == 0.05
    assert parsed["matched"] is True
    assert {"p": 1.0, "q": 1.0} in parsed["mutual_cells"]
