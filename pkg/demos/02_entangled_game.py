"""
One entangled round, then a million
===================================

Both players share a two-branch state: with weight a_sq the board reads
(O, O), otherwise (T, T).  Each player may swap the letters on their own
side.  A single charge draw resolves the branch; flips relabel it.  Over
many rounds the mean payoffs land on the closed forms.
"""

from tencards import (
    EntangledState,
    ExperimentConfig,
    PayoffMatrix,
    RandomSource,
    StrategyProfile,
    expected_payoffs,
    machine_game_measurement,
    run_experiment,
    transcript_to_json,
)

bos = PayoffMatrix(alpha=5.0, beta=3.0, gamma=1.0)
state = EntangledState(a_sq=0.7)

# A single round, with Bob flipping: the branch comes from one charge
# draw, then Bob's T becomes O and vice versa.
transcript = machine_game_measurement(state, flip_alice=False, flip_bob=True, rng=RandomSource(7))
print("one round, Bob flips:")
print(" ", transcript_to_json(transcript))
print("  payoffs:", bos.payoff_for(transcript.outcome))

# Now Monte Carlo: both players mix, and the empirical means are compared
# against the closed-form payoffs.
profile = StrategyProfile(p=0.6, q=0.25)
analytic = expected_payoffs(profile, state, bos)
report = run_experiment(
    ExperimentConfig(
        payoffs=bos, a_sq=state.a_sq, p=profile.p, q=profile.q,
        trials=1_000_000, seed=42, backend="machine",
    )
)
print(f"\n{report.config.trials:,} rounds at p={profile.p}, q={profile.q}, a_sq={state.a_sq}")
print(f"  outcome counts: {{{', '.join(f'{o.value}: {c:,}' for o, c in report.counts.items())}}}")
print(f"  empirical payoffs: ({report.empirical_payoffs[0]:.4f}, {report.empirical_payoffs[1]:.4f})")
print(f"  analytic payoffs:  ({analytic[0]:.4f}, {analytic[1]:.4f})")
print(f"  abs errors:        ({report.abs_errors[0]:.2e}, {report.abs_errors[1]:.2e})")
print(f"  within 4 standard errors: {report.within_tolerance(4.0)}")
