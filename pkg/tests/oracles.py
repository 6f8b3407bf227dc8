"""Brute-force oracles shared across the test suite.

These deliberately avoid the collected closed forms in the package: they
know only the branch probabilities, the per-player label-exchange rule and
the bimatrix, and compute everything by enumeration or grid search.
"""

from __future__ import annotations

from tencards.core import PayoffMatrix


def flip_labels(pair: str, flip_alice: bool, flip_bob: bool) -> str:
    swap = {"O": "T", "T": "O"}
    a, b = pair[0], pair[1]
    if flip_alice:
        a = swap[a]
    if flip_bob:
        b = swap[b]
    return a + b


def payoff_pair(pair: str, pm: PayoffMatrix) -> tuple[float, float]:
    table = {
        "OO": (pm.alpha, pm.beta),
        "OT": (pm.gamma, pm.gamma),
        "TO": (pm.gamma, pm.gamma),
        "TT": (pm.beta, pm.alpha),
    }
    return table[pair]


def payoffs_by_enumeration(
    p: float, q: float, a_sq: float, pm: PayoffMatrix
) -> tuple[float, float]:
    """Expectation over the four flip configurations and two raw branches."""
    total_a = 0.0
    total_b = 0.0
    for flip_a, w_a in ((False, p), (True, 1.0 - p)):
        for flip_b, w_b in ((False, q), (True, 1.0 - q)):
            for raw, w_r in (("OO", a_sq), ("TT", 1.0 - a_sq)):
                pair = flip_labels(raw, flip_a, flip_b)
                pay_a, pay_b = payoff_pair(pair, pm)
                total_a += w_a * w_b * w_r * pay_a
                total_b += w_a * w_b * w_r * pay_b
    return total_a, total_b


def distribution_by_enumeration(p: float, q: float, a_sq: float) -> dict[str, float]:
    probs = {"OO": 0.0, "OT": 0.0, "TO": 0.0, "TT": 0.0}
    for flip_a, w_a in ((False, p), (True, 1.0 - p)):
        for flip_b, w_b in ((False, q), (True, 1.0 - q)):
            for raw, w_r in (("OO", a_sq), ("TT", 1.0 - a_sq)):
                probs[flip_labels(raw, flip_a, flip_b)] += w_a * w_b * w_r
    return probs


def grid_argmax_alice(q: float, a_sq: float, pm: PayoffMatrix, n: int = 1000):
    """Return (flat, best_p) from maximizing the enumeration payoff over p."""
    grid = [i / n for i in range(n + 1)]
    vals = [payoffs_by_enumeration(p, q, a_sq, pm)[0] for p in grid]
    hi, lo = max(vals), min(vals)
    if hi - lo <= 1e-9 * max(1.0, abs(hi)):
        return True, None
    return False, grid[vals.index(hi)]


def grid_argmax_bob(p: float, a_sq: float, pm: PayoffMatrix, n: int = 1000):
    grid = [i / n for i in range(n + 1)]
    vals = [payoffs_by_enumeration(p, q, a_sq, pm)[1] for q in grid]
    hi, lo = max(vals), min(vals)
    if hi - lo <= 1e-9 * max(1.0, abs(hi)):
        return True, None
    return False, grid[vals.index(hi)]
