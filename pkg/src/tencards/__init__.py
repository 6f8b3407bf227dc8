"""Restricted two-player quantum games, playable with a pack of ten cards.

Layers:

- :mod:`tencards.core` — exact payoff math, best responses, equilibria.
- :mod:`tencards.simulator` — the stochastic measurement backends (charged
  spheres and digit cards) with a deterministic seeded randomness source.
- :mod:`tencards.experiments` — Monte Carlo verification, sweeps, and the
  brute-force equilibrium oracle.
- :mod:`tencards.server` — session service for live two-player matches.
"""

from tencards.core import (
    BestResponse,
    EntangledState,
    Equilibrium,
    GameDomainError,
    Outcome,
    OutcomeDistribution,
    PayoffMatrix,
    StrategyProfile,
    best_response_alice,
    best_response_bob,
    expected_payoffs,
    expected_payoffs_nonentangled,
    nash_equilibria,
    outcome_distribution,
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
from tencards.simulator import (
    BlochPoint,
    Branch,
    CardNarrowing,
    MeasurementTranscript,
    RandomSource,
    SpinOutcome,
    UnsupportedStateError,
    angle_between,
    bloch_to_density,
    card_game_branch_flags,
    card_game_measurement,
    card_measurement,
    machine_game_branch_flags,
    machine_game_measurement,
    spin_measurement,
    spin_measurement_batch,
    transcript_from_json,
    transcript_to_json,
)

__version__ = "0.1.0"

__all__ = [
    "BestResponse",
    "BlochPoint",
    "Branch",
    "CardNarrowing",
    "EntangledState",
    "Equilibrium",
    "EquilibriumGridReport",
    "ExperimentConfig",
    "ExperimentReport",
    "GameDomainError",
    "MeasurementTranscript",
    "Outcome",
    "OutcomeDistribution",
    "PayoffMatrix",
    "RandomSource",
    "SpinOutcome",
    "StrategyProfile",
    "UnsupportedStateError",
    "angle_between",
    "best_response_alice",
    "best_response_bob",
    "bloch_to_density",
    "card_game_branch_flags",
    "card_game_measurement",
    "card_measurement",
    "equilibrium_oracle_grid",
    "expected_payoffs",
    "expected_payoffs_nonentangled",
    "machine_game_branch_flags",
    "machine_game_measurement",
    "nash_equilibria",
    "outcome_distribution",
    "payoff_grids",
    "run_experiment",
    "spin_measurement",
    "spin_measurement_batch",
    "sweep",
    "transcript_from_json",
    "transcript_to_json",
    "__version__",
]
