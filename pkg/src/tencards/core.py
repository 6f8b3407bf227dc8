"""Exact mathematics of the restricted two-player, two-strategy quantum game.

The game board is a pair of qubits prepared in a weighted superposition of
|OO> and |TT>; only the squared modulus of the |OO> amplitude (``a_sq``)
enters any observable quantity, so that single real number is all the state
we keep.  Each player either leaves their qubit alone (identity, played with
probability ``p`` for Alice and ``q`` for Bob) or exchanges the labels O and
T (spin-flip).  Payoffs follow the Battle-of-the-Sexes bimatrix

    (O,O) -> (alpha, beta)    (O,T) -> (gamma, gamma)
    (T,O) -> (gamma, gamma)   (T,T) -> (beta, alpha)

which is the classic BoS when alpha > beta > gamma, though every operation
here accepts arbitrary finite values.

Everything in this module is a pure function of its inputs and safe to call
concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

__all__ = [
    "TIE_TOL",
    "GameDomainError",
    "Outcome",
    "PayoffMatrix",
    "EntangledState",
    "StrategyProfile",
    "OutcomeDistribution",
    "BestResponse",
    "Equilibrium",
    "outcome_distribution",
    "expected_payoffs",
    "expected_payoffs_nonentangled",
    "alice_payoff_slope",
    "bob_payoff_slope",
    "best_response_alice",
    "best_response_bob",
    "nash_equilibria",
]

#: Tolerance on the affine payoff slope below which a player counts as
#: indifferent.  Ties return the whole interval [0, 1], never an arbitrary
#: point, so flat-payoff degeneracy stays visible.
TIE_TOL = 1e-12


class GameDomainError(ValueError):
    """An input lies outside its documented domain."""


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise GameDomainError(f"{name} must be finite, got {value!r}")
    return value


def _require_unit(name: str, value: float) -> float:
    value = _require_finite(name, value)
    if not 0.0 <= value <= 1.0:
        raise GameDomainError(f"{name} must lie in [0, 1], got {value!r}")
    return value


class Outcome(Enum):
    """Joint measurement result; first letter is Alice's, second is Bob's."""

    OO = "OO"
    OT = "OT"
    TO = "TO"
    TT = "TT"

    def flipped(self, flip_alice: bool, flip_bob: bool) -> "Outcome":
        """Exchange O and T for each player whose flag is set."""
        swap = {"O": "T", "T": "O"}
        a, b = self.value[0], self.value[1]
        if flip_alice:
            a = swap[a]
        if flip_bob:
            b = swap[b]
        return Outcome(a + b)


@dataclass(frozen=True)
class PayoffMatrix:
    """The three-parameter bimatrix: matches pay (alpha, beta) or (beta,
    alpha) depending on who got their preferred match, mismatches pay
    (gamma, gamma) to both."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma"):
            object.__setattr__(self, name, _require_finite(name, getattr(self, name)))

    @property
    def is_bos(self) -> bool:
        """True when the values have the Battle-of-the-Sexes ordering."""
        return self.alpha > self.beta > self.gamma

    def payoff_for(self, outcome: Outcome) -> tuple[float, float]:
        """(Alice, Bob) payoff for one joint outcome."""
        if outcome is Outcome.OO:
            return self.alpha, self.beta
        if outcome is Outcome.TT:
            return self.beta, self.alpha
        return self.gamma, self.gamma


@dataclass(frozen=True)
class EntangledState:
    """Initial board state, reduced to the squared modulus of the |OO>
    amplitude.  The |TT> weight is always the exact complement."""

    a_sq: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "a_sq", _require_unit("a_sq", self.a_sq))

    @property
    def b_sq(self) -> float:
        return 1.0 - self.a_sq


@dataclass(frozen=True)
class StrategyProfile:
    """Each player's probability of applying the identity (not flipping)."""

    p: float
    q: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", _require_unit("p", self.p))
        object.__setattr__(self, "q", _require_unit("q", self.q))


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities of the four joint outcomes; sums to 1 within 1e-12."""

    p_oo: float
    p_ot: float
    p_to: float
    p_tt: float

    def __post_init__(self) -> None:
        total = self.p_oo + self.p_ot + self.p_to + self.p_tt
        for name in ("p_oo", "p_ot", "p_to", "p_tt"):
            v = getattr(self, name)
            if not -1e-12 <= v <= 1.0 + 1e-12:
                raise GameDomainError(f"{name}={v!r} is not a probability")
        if abs(total - 1.0) > 1e-12:
            raise GameDomainError(f"outcome probabilities sum to {total!r}, not 1")

    def __getitem__(self, outcome: Outcome) -> float:
        return {
            Outcome.OO: self.p_oo,
            Outcome.OT: self.p_ot,
            Outcome.TO: self.p_to,
            Outcome.TT: self.p_tt,
        }[outcome]

    def items(self) -> Iterator[tuple[Outcome, float]]:
        for o in Outcome:
            yield o, self[o]


@dataclass(frozen=True)
class BestResponse:
    """Set of optimal identity probabilities: {0}, {1}, or all of [0, 1]."""

    lo: float
    hi: float

    @classmethod
    def only(cls, value: float) -> "BestResponse":
        return cls(value, value)

    @classmethod
    def any(cls) -> "BestResponse":
        return cls(0.0, 1.0)

    @property
    def is_interval(self) -> bool:
        return self.lo != self.hi

    def contains(self, value: float, atol: float = 1e-12) -> bool:
        return self.lo - atol <= value <= self.hi + atol


@dataclass(frozen=True)
class Equilibrium:
    """A mutual-best-response profile.

    ``kind`` is "pure" for corner profiles, "mixed" for the interior
    indifference point, and "component" for a degenerate region of
    equilibria, in which case ``p_range``/``q_range`` give its extent and
    ``profile`` a representative interior point.
    """

    profile: StrategyProfile
    payoffs: tuple[float, float]
    kind: str
    p_range: tuple[float, float] | None = None
    q_range: tuple[float, float] | None = None


# ---------------------------------------------------------------------------
# Outcome distribution and expected payoffs
# ---------------------------------------------------------------------------

def outcome_distribution(
    profile: StrategyProfile, state: EntangledState
) -> OutcomeDistribution:
    """Joint outcome probabilities under independent flip choices.

    The unflipped configuration occurs with probability p*q and yields
    (O,O) with the |OO> weight and (T,T) with the |TT> weight; the other
    three flip configurations relabel those two branches per player.
    """
    p, q = profile.p, profile.q
    a2, b2 = state.a_sq, state.b_sq
    return OutcomeDistribution(
        p_oo=p * q * a2 + (1 - p) * (1 - q) * b2,
        p_ot=p * (1 - q) * a2 + (1 - p) * q * b2,
        p_to=(1 - p) * q * a2 + p * (1 - q) * b2,
        p_tt=p * q * b2 + (1 - p) * (1 - q) * a2,
    )


def expected_payoffs(
    profile: StrategyProfile, state: EntangledState, payoffs: PayoffMatrix
) -> tuple[float, float]:
    """Expected (Alice, Bob) payoff in collected affine form.

    Alice's payoff is affine in p with slope ``alice_payoff_slope(q, ...)``:

        pay_A = p*[q*(alpha+beta-2*gamma) - alpha*b_sq - beta*a_sq + gamma]
                + q*(-alpha*b_sq - beta*a_sq + gamma) + alpha*b_sq + beta*a_sq

    and Bob's is the mirror image with a_sq and b_sq exchanged.  Both equal
    the bimatrix-weighted ``outcome_distribution`` (a tested identity).
    """
    p, q = profile.p, profile.q
    a2, b2 = state.a_sq, state.b_sq
    al, be, ga = payoffs.alpha, payoffs.beta, payoffs.gamma
    s = al + be - 2 * ga
    k_a = ga - al * b2 - be * a2
    k_b = ga - al * a2 - be * b2
    pay_a = p * (q * s + k_a) + q * k_a + (al * b2 + be * a2)
    pay_b = q * (p * s + k_b) + p * k_b + (al * a2 + be * b2)
    return pay_a, pay_b


def expected_payoffs_nonentangled(
    profile: StrategyProfile, payoffs: PayoffMatrix
) -> tuple[float, float]:
    """Expected payoffs when the board starts in the bare |OO> state.

    Implemented as the a_sq = 1 limit of :func:`expected_payoffs`, which for
    Bob reads q*[p*(alpha+beta-2*gamma) - alpha + gamma] + p*(gamma - alpha)
    + alpha.  (Published closed forms for this limit sometimes carry a
    p*(gamma - beta) term for Bob instead; that is inconsistent with the
    general formula's limit and with direct enumeration, so the limit is
    used here.)
    """
    return expected_payoffs(profile, EntangledState(1.0), payoffs)


# ---------------------------------------------------------------------------
# Best responses and equilibria
# ---------------------------------------------------------------------------

def alice_payoff_slope(
    q: float, state: EntangledState, payoffs: PayoffMatrix
) -> float:
    """d(pay_A)/dp given Bob's identity probability q."""
    q = _require_unit("q", q)
    al, be, ga = payoffs.alpha, payoffs.beta, payoffs.gamma
    return q * (al + be - 2 * ga) - al * state.b_sq - be * state.a_sq + ga


def bob_payoff_slope(
    p: float, state: EntangledState, payoffs: PayoffMatrix
) -> float:
    """d(pay_B)/dq given Alice's identity probability p."""
    p = _require_unit("p", p)
    al, be, ga = payoffs.alpha, payoffs.beta, payoffs.gamma
    return p * (al + be - 2 * ga) - al * state.a_sq - be * state.b_sq + ga


def _response_from_slope(slope: float) -> BestResponse:
    if slope > TIE_TOL:
        return BestResponse.only(1.0)
    if slope < -TIE_TOL:
        return BestResponse.only(0.0)
    return BestResponse.any()


def best_response_alice(
    q: float, state: EntangledState, payoffs: PayoffMatrix
) -> BestResponse:
    """Alice's optimal identity probabilities against Bob playing q."""
    return _response_from_slope(alice_payoff_slope(q, state, payoffs))


def best_response_bob(
    p: float, state: EntangledState, payoffs: PayoffMatrix
) -> BestResponse:
    """Bob's optimal identity probabilities against Alice playing p."""
    return _response_from_slope(bob_payoff_slope(p, state, payoffs))


def _component_confirmed(
    state: EntangledState, payoffs: PayoffMatrix, n: int = 10
) -> bool:
    """Check mutual best-response membership on a coarse grid before
    reporting a full-square component."""
    grid = [i / n for i in range(n + 1)]
    return all(
        best_response_alice(q, state, payoffs).contains(p)
        and best_response_bob(p, state, payoffs).contains(q)
        for p in grid
        for q in grid
    )


def nash_equilibria(
    state: EntangledState, payoffs: PayoffMatrix
) -> list[Equilibrium]:
    """All mutual-best-response profiles of the bilinear game.

    Returns the corner profiles that survive best-response filtering, the
    interior indifference point

        p* = (alpha*a_sq + beta*b_sq - gamma) / (alpha + beta - 2*gamma)
        q* = (alpha*b_sq + beta*a_sq - gamma) / (alpha + beta - 2*gamma)

    when the slope structure is nondegenerate and both coordinates land in
    [0, 1], and a single kind="component" entry covering the whole square
    when both players are indifferent everywhere (then payoffs are constant
    and the interior formula is skipped).
    """
    al, be, ga = payoffs.alpha, payoffs.beta, payoffs.gamma
    a2, b2 = state.a_sq, state.b_sq
    s = al + be - 2 * ga
    k_a = ga - al * b2 - be * a2
    k_b = ga - al * a2 - be * b2

    if abs(s) <= TIE_TOL and abs(k_a) <= TIE_TOL and abs(k_b) <= TIE_TOL:
        if _component_confirmed(state, payoffs):
            center = StrategyProfile(0.5, 0.5)
            return [
                Equilibrium(
                    profile=center,
                    payoffs=expected_payoffs(center, state, payoffs),
                    kind="component",
                    p_range=(0.0, 1.0),
                    q_range=(0.0, 1.0),
                )
            ]

    found: list[Equilibrium] = []
    for p in (0.0, 1.0):
        for q in (0.0, 1.0):
            if best_response_alice(q, state, payoffs).contains(p) and best_response_bob(
                p, state, payoffs
            ).contains(q):
                profile = StrategyProfile(p, q)
                found.append(
                    Equilibrium(profile, expected_payoffs(profile, state, payoffs), "pure")
                )

    if abs(s) > TIE_TOL:
        p_star = (al * a2 + be * b2 - ga) / s
        q_star = (al * b2 + be * a2 - ga) / s
        if 0.0 <= p_star <= 1.0 and 0.0 <= q_star <= 1.0:
            coincides = any(
                abs(e.profile.p - p_star) <= TIE_TOL and abs(e.profile.q - q_star) <= TIE_TOL
                for e in found
            )
            if not coincides:
                profile = StrategyProfile(p_star, q_star)
                found.append(
                    Equilibrium(profile, expected_payoffs(profile, state, payoffs), "mixed")
                )
    return found
