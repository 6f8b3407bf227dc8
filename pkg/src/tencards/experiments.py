"""Monte Carlo verification harness, parameter sweeps and a grid oracle.

``run_experiment`` plays many seeded rounds through a chosen measurement
backend and compares empirical payoffs against the closed forms;
``sweep`` repeats that along one axis with per-row sub-seeding; and
``equilibrium_oracle_grid`` hunts equilibria by brute force on a (p, q)
grid, independently of the best-response algebra.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    EntangledState,
    Equilibrium,
    GameDomainError,
    Outcome,
    PayoffMatrix,
    StrategyProfile,
    expected_payoffs,
    nash_equilibria,
)
from .simulator import (
    RandomSource,
    card_game_branch_flags,
    machine_game_branch_flags,
)

__all__ = [
    "BACKENDS",
    "EquilibriumGridReport",
    "ExperimentConfig",
    "ExperimentReport",
    "equilibrium_oracle_grid",
    "equilibrium_to_dict",
    "payoff_grids",
    "run_experiment",
    "sweep",
]

BACKENDS = ("machine", "cards")

#: Payoff differences at or below this are treated as ties by the grid oracle.
GRID_FLAT_TOL = 1e-9

#: Outcomes in fixed reporting order.
OUTCOME_ORDER = (Outcome.OO, Outcome.OT, Outcome.TO, Outcome.TT)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one Monte Carlo run exactly."""

    payoffs: PayoffMatrix
    a_sq: float
    p: float
    q: float
    trials: int
    seed: int
    backend: str = "machine"

    def __post_init__(self) -> None:
        if self.backend not in BACKENDS:
            raise GameDomainError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.trials < 1:
            raise GameDomainError(f"trials must be at least 1, got {self.trials}")
        # range checks are delegated to the domain constructors
        EntangledState(self.a_sq)
        StrategyProfile(self.p, self.q)

    @property
    def state(self) -> EntangledState:
        return EntangledState(self.a_sq)

    @property
    def profile(self) -> StrategyProfile:
        return StrategyProfile(self.p, self.q)


@dataclass(frozen=True)
class ExperimentReport:
    """Outcome tallies and payoff statistics for one finished run.

    ``standard_errors`` are sample standard deviations (ddof=1, taken as 0
    for a single trial) divided by the square root of the trial count.
    """

    config: ExperimentConfig
    counts: dict[Outcome, int]
    empirical_payoffs: tuple[float, float]
    analytic_payoffs: tuple[float, float]
    standard_errors: tuple[float, float]
    mean_draws: float
    tie_breaks: int

    @property
    def abs_errors(self) -> tuple[float, float]:
        return (
            abs(self.empirical_payoffs[0] - self.analytic_payoffs[0]),
            abs(self.empirical_payoffs[1] - self.analytic_payoffs[1]),
        )

    def within_tolerance(self, band: float = 4.0) -> bool:
        """Whether both empirical payoffs sit inside ``band`` standard errors."""
        err_a, err_b = self.abs_errors
        return err_a <= band * self.standard_errors[0] and err_b <= band * self.standard_errors[1]

    def to_json_dict(self) -> dict:
        cfg = self.config
        return {
            "config": {
                "alpha": cfg.payoffs.alpha,
                "beta": cfg.payoffs.beta,
                "gamma": cfg.payoffs.gamma,
                "a_sq": cfg.a_sq,
                "p": cfg.p,
                "q": cfg.q,
                "trials": cfg.trials,
                "seed": cfg.seed,
                "backend": cfg.backend,
            },
            "counts": {o.value: self.counts[o] for o in OUTCOME_ORDER},
            "empirical": {"alice": self.empirical_payoffs[0], "bob": self.empirical_payoffs[1]},
            "analytic": {"alice": self.analytic_payoffs[0], "bob": self.analytic_payoffs[1]},
            "abs_errors": {"alice": self.abs_errors[0], "bob": self.abs_errors[1]},
            "standard_errors": {
                "alice": self.standard_errors[0],
                "bob": self.standard_errors[1],
            },
            "mean_draws": self.mean_draws,
            "tie_breaks": self.tie_breaks,
        }


def _mean_and_se(counts: np.ndarray, values: np.ndarray, trials: int) -> tuple[float, float]:
    mean = float(np.dot(counts, values)) / trials
    spread = float(np.dot(counts, (values - mean) ** 2))
    variance = spread / max(trials - 1, 1)
    return mean, math.sqrt(variance / trials)


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Play ``config.trials`` seeded rounds and tally outcomes and payoffs.

    Each trial samples Alice's flip (probability 1-p) and Bob's flip
    (probability 1-q) from the real stream, then resolves the branch on the
    configured backend.  Draw order is fixed: all Alice flips, all Bob
    flips, then the measurement draws, so runs are reproducible byte for
    byte from the seed.
    """
    rng = RandomSource(config.seed)
    n = config.trials
    state = config.state
    flips_a = rng.uniform_batch(n) >= config.p
    flips_b = rng.uniform_batch(n) >= config.q
    if config.backend == "machine":
        branch_a = machine_game_branch_flags(state, n, rng)
        mean_draws = 1.0
        tie_breaks = 0
    else:
        branch_a, draws, ties = card_game_branch_flags(state, n, rng)
        mean_draws = float(draws.mean())
        tie_breaks = int(ties.sum())

    # branch A puts O on both sides; each flip exchanges one side's letter
    alice_o = branch_a ^ flips_a
    bob_o = branch_a ^ flips_b
    codes = (~alice_o).astype(np.int64) * 2 + (~bob_o).astype(np.int64)
    tallies = np.bincount(codes, minlength=4)

    pm = config.payoffs
    pay_a = np.array([pm.alpha, pm.gamma, pm.gamma, pm.beta])
    pay_b = np.array([pm.beta, pm.gamma, pm.gamma, pm.alpha])
    mean_a, se_a = _mean_and_se(tallies, pay_a, n)
    mean_b, se_b = _mean_and_se(tallies, pay_b, n)

    counts = {o: int(tallies[i]) for i, o in enumerate(OUTCOME_ORDER)}
    return ExperimentReport(
        config=config,
        counts=counts,
        empirical_payoffs=(mean_a, mean_b),
        analytic_payoffs=expected_payoffs(config.profile, state, pm),
        standard_errors=(se_a, se_b),
        mean_draws=mean_draws,
        tie_breaks=tie_breaks,
    )


SWEEP_AXES = ("a_sq", "p", "q")


def sweep(base: ExperimentConfig, axis: str, values: list[float]) -> list[ExperimentReport]:
    """One report per value along ``axis``, row ``i`` seeded with ``seed XOR i``."""
    if axis not in SWEEP_AXES:
        raise GameDomainError(f"axis must be one of {SWEEP_AXES}, got {axis!r}")
    if not values:
        raise GameDomainError("sweep needs at least one value")
    reports = []
    for i, value in enumerate(values):
        config = dataclasses.replace(base, **{axis: float(value)}, seed=base.seed ^ i)
        reports.append(run_experiment(config))
    return reports


# ---------------------------------------------------------------------------
# Grid equilibrium oracle
# ---------------------------------------------------------------------------


def payoff_grids(
    p_values: np.ndarray, q_values: np.ndarray, state: EntangledState, payoffs: PayoffMatrix
) -> tuple[np.ndarray, np.ndarray]:
    """Expected payoffs on the full (p, q) product grid, vectorised.

    Row index walks ``p_values`` (Alice), column index walks ``q_values``.
    """
    slope_scale = payoffs.alpha + payoffs.beta - 2.0 * payoffs.gamma
    k_alice = payoffs.gamma - payoffs.alpha * state.b_sq - payoffs.beta * state.a_sq
    k_bob = payoffs.gamma - payoffs.alpha * state.a_sq - payoffs.beta * state.b_sq
    base_alice = payoffs.alpha * state.b_sq + payoffs.beta * state.a_sq
    base_bob = payoffs.alpha * state.a_sq + payoffs.beta * state.b_sq
    cross = np.outer(p_values, q_values)
    sums = p_values[:, None] + q_values[None, :]
    return (
        slope_scale * cross + k_alice * sums + base_alice,
        slope_scale * cross + k_bob * sums + base_bob,
    )


@dataclass(frozen=True)
class EquilibriumGridReport:
    """Brute-force equilibrium cells and their match against the closed forms.

    ``mutual_cells`` are grid points where neither player can gain more
    than the flatness tolerance by any grid deviation.  ``crossing_cells``
    are centres of grid cells across whose edges both players' preferred
    directions reverse sign, which brackets an interior indifference point
    even when it falls between grid lines.
    """

    step: float
    mutual_cells: tuple[tuple[float, float], ...]
    crossing_cells: tuple[tuple[float, float], ...]
    equilibria: tuple[Equilibrium, ...]
    unmatched_equilibria: tuple[tuple[float, float], ...]
    unmatched_cells: tuple[tuple[float, float], ...]

    @property
    def cells(self) -> tuple[tuple[float, float], ...]:
        return self.mutual_cells + self.crossing_cells

    @property
    def matched(self) -> bool:
        """True when cells and closed forms agree within one grid step, both ways."""
        return not self.unmatched_equilibria and not self.unmatched_cells

    def to_json_dict(self) -> dict:
        def points(items):
            return [{"p": p, "q": q} for p, q in items]

        return {
            "step": self.step,
            "mutual_cells": points(self.mutual_cells),
            "crossing_cells": points(self.crossing_cells),
            "equilibria": [equilibrium_to_dict(eq) for eq in self.equilibria],
            "unmatched_equilibria": points(self.unmatched_equilibria),
            "unmatched_cells": points(self.unmatched_cells),
            "matched": self.matched,
        }


def equilibrium_to_dict(eq: Equilibrium) -> dict:
    """JSON-ready form of one equilibrium, shared by reports and the CLI."""
    return {
        "kind": eq.kind,
        "p": eq.profile.p,
        "q": eq.profile.q,
        "payoff_alice": eq.payoffs[0],
        "payoff_bob": eq.payoffs[1],
        "p_range": list(eq.p_range) if eq.p_range else None,
        "q_range": list(eq.q_range) if eq.q_range else None,
    }


def _direction_field(diff: np.ndarray) -> np.ndarray:
    """Sign of an endpoint payoff difference, zero within the flat tolerance."""
    signs = np.zeros(diff.shape, dtype=np.int64)
    signs[diff > GRID_FLAT_TOL] = 1
    signs[diff < -GRID_FLAT_TOL] = -1
    return signs


def _near(point: tuple[float, float], target: tuple[float, float], within: float) -> bool:
    return abs(point[0] - target[0]) <= within and abs(point[1] - target[1]) <= within


def _inside_component(point: tuple[float, float], eq: Equilibrium, within: float) -> bool:
    (p_lo, p_hi) = eq.p_range or (eq.profile.p, eq.profile.p)
    (q_lo, q_hi) = eq.q_range or (eq.profile.q, eq.profile.q)
    return (
        p_lo - within <= point[0] <= p_hi + within
        and q_lo - within <= point[1] <= q_hi + within
    )


def equilibrium_oracle_grid(
    state: EntangledState, payoffs: PayoffMatrix, step: float
) -> EquilibriumGridReport:
    """Brute-force equilibrium search on the (p, q) grid with spacing ``step``.

    Two independent detectors run over the exhaustively evaluated payoff
    grids: grid points no player can improve on by more than 1e-9 through
    any grid deviation, and grid cells whose edges flip both players'
    preferred endpoint (bracketing an off-grid indifference point; a point
    check alone cannot see those, since the available gain next to an
    interior equilibrium scales with the step).  The report also matches
    every detection against ``nash_equilibria`` within one grid step.
    """
    if not 0.0 < step <= 0.1:
        raise GameDomainError(f"step must lie in (0, 0.1], got {step}")
    cells_across = round(1.0 / step)
    if abs(cells_across * step - 1.0) > 1e-9:
        raise GameDomainError(f"step must divide the unit interval, got {step}")

    values = np.linspace(0.0, 1.0, cells_across + 1)
    grid_alice, grid_bob = payoff_grids(values, values, state, payoffs)

    col_max_alice = grid_alice.max(axis=0)
    row_max_bob = grid_bob.max(axis=1)
    mutual_mask = (grid_alice >= col_max_alice[None, :] - GRID_FLAT_TOL) & (
        grid_bob >= row_max_bob[:, None] - GRID_FLAT_TOL
    )
    mutual_cells = tuple(
        (float(values[i]), float(values[j])) for i, j in zip(*np.nonzero(mutual_mask))
    )

    # preferred endpoint per column for Alice and per row for Bob
    dir_alice = _direction_field(grid_alice[-1, :] - grid_alice[0, :])
    dir_bob = _direction_field(grid_bob[:, -1] - grid_bob[:, 0])
    flip_cols = np.nonzero(dir_alice[:-1] * dir_alice[1:] == -1)[0]
    flip_rows = np.nonzero(dir_bob[:-1] * dir_bob[1:] == -1)[0]
    crossing_cells = tuple(
        (float((values[i] + values[i + 1]) / 2), float((values[j] + values[j + 1]) / 2))
        for i in flip_rows
        for j in flip_cols
    )

    equilibria = tuple(nash_equilibria(state, payoffs))
    within = step + 1e-9
    all_cells = mutual_cells + crossing_cells

    unmatched_equilibria = tuple(
        (eq.profile.p, eq.profile.q)
        for eq in equilibria
        if eq.kind != "component"
        and not any(_near(cell, (eq.profile.p, eq.profile.q), within) for cell in all_cells)
    )
    unmatched_cells = tuple(
        cell
        for cell in all_cells
        if not any(
            _inside_component(cell, eq, within)
            if eq.kind == "component"
            else _near(cell, (eq.profile.p, eq.profile.q), within)
            for eq in equilibria
        )
    )

    return EquilibriumGridReport(
        step=step,
        mutual_cells=mutual_cells,
        crossing_cells=crossing_cells,
        equilibria=equilibria,
        unmatched_equilibria=unmatched_equilibria,
        unmatched_cells=unmatched_cells,
    )
