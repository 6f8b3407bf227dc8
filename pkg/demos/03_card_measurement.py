"""
Resolving the branch with ten digit cards
=========================================

A uniform number in [0, 1) can be drawn one decimal digit at a time from
a shuffled pack of cards 0..9 (drawn with replacement).  The branch is
known as soon as the digits drawn so far pin the number to one side of
the branch weight a_sq, so most rounds stop after a draw or two.
"""

from tencards import (
    Branch,
    CardNarrowing,
    EntangledState,
    RandomSource,
    card_game_branch_flags,
    card_game_measurement,
    transcript_to_json,
)

# Walk the narrowing by hand at a_sq = 0.55.  After a 5 the number lies
# in [0.5, 0.6), which straddles 0.55, so a second digit is needed.
narrowing = CardNarrowing(EntangledState(0.55))
for digit in (5, 5):
    decision = narrowing.feed(digit)
    lo, hi = narrowing.interval_strings()
    verdict = "undecided" if decision is None else f"branch {decision.value}"
    print(f"drew {digit}: number in [{lo}, {hi}) -> {verdict}")

# Two fives pin the number to [0.55, 0.56), which clears the threshold
# from above: branch B, no third card needed.
assert decision is Branch.B

# A full round transcript records the digits alongside the outcome.
transcript = card_game_measurement(
    EntangledState(0.55), flip_alice=True, flip_bob=False, rng=RandomSource(3)
)
print("\none flipped round:", transcript_to_json(transcript))

# Draw statistics: at two-decimal weights every round stops within two
# draws, and at a_sq = 0.5 a single card always settles it.
for a_sq in (0.5, 0.55, 0.37):
    _, draws, ties = card_game_branch_flags(EntangledState(a_sq), 100_000, RandomSource(11))
    top = draws.max()
    print(f"a_sq={a_sq}: mean draws {draws.mean():.3f}, max {top}, tie-breaks {int(ties.sum())}")
