"""Macroscopic measurement backends for single spins and entangled pairs.

Two interchangeable samplers realise the Born probabilities:

* a charged-sphere machine whose charge fraction, a uniform draw on [0, 1),
  is compared against a fixed threshold, and
* a card procedure that draws decimal digits one at a time, narrowing a
  base-ten interval until it falls entirely on one side of the threshold.

Every run is summarised in a :class:`MeasurementTranscript` that can be
serialised to JSON and replayed byte for byte from the same seed.
"""

from __future__ import annotations

import json
import math
import secrets
from dataclasses import dataclass
from decimal import Decimal
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from .core import EntangledState, GameDomainError, Outcome

__all__ = [
    "BlochPoint",
    "Branch",
    "CardNarrowing",
    "MeasurementTranscript",
    "RandomSource",
    "SpinOutcome",
    "UnsupportedStateError",
    "angle_between",
    "bloch_to_density",
    "card_game_branch_flags",
    "card_game_measurement",
    "card_measurement",
    "machine_game_branch_flags",
    "machine_game_measurement",
    "spin_measurement",
    "spin_measurement_batch",
    "transcript_from_json",
    "transcript_to_json",
]

#: Unit-vector and surface-state checks tolerate this much numerical drift.
UNIT_TOL = 1e-9

#: Largest digit budget for the card procedure; keeps integer prefixes in int64.
MAX_DIGIT_BUDGET = 18


class UnsupportedStateError(GameDomainError):
    """Raised when a backend cannot realise the requested quantum state."""


class SpinOutcome(Enum):
    """Result of measuring a single spin along a chosen axis."""

    UP = "up"
    DOWN = "down"


class Branch(Enum):
    """Which component of the entangled superposition a measurement lands on."""

    A = "A"
    B = "B"


@dataclass(frozen=True)
class BlochPoint:
    """A qubit state as a point in the unit ball, spherical coordinates.

    ``r`` is the radial coordinate (1 on the surface, 0 at the maximally
    mixed centre), ``theta`` the polar angle from the +z axis and ``phi``
    the azimuthal angle.
    """

    r: float
    theta: float
    phi: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.r <= 1.0:
            raise GameDomainError(f"radius must lie in [0, 1], got {self.r}")
        if not 0.0 <= self.theta <= math.pi:
            raise GameDomainError(f"polar angle must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi <= 2.0 * math.pi:
            raise GameDomainError(f"azimuth must lie in [0, 2*pi], got {self.phi}")

    def unit_vector(self) -> np.ndarray:
        """Cartesian direction of the point, ignoring the radius."""
        st = math.sin(self.theta)
        return np.array(
            [st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)]
        )


def bloch_to_density(point: BlochPoint) -> np.ndarray:
    """Density matrix of the qubit state at ``point``, a 2x2 complex array."""
    r, theta, phi = point.r, point.theta, point.phi
    ct, st = math.cos(theta), math.sin(theta)
    off = r * st * complex(math.cos(phi), -math.sin(phi))
    return 0.5 * np.array(
        [[1.0 + r * ct, off], [off.conjugate(), 1.0 - r * ct]], dtype=complex
    )


def angle_between(point: BlochPoint, direction: Sequence[float]) -> float:
    """Angle between a surface state and a unit measurement axis, in [0, pi]."""
    if abs(point.r - 1.0) > UNIT_TOL:
        raise GameDomainError("angle is defined for surface states (r = 1) only")
    u = np.asarray(direction, dtype=float)
    if u.shape != (3,):
        raise GameDomainError("direction must be a 3-vector")
    norm = float(np.linalg.norm(u))
    if abs(norm - 1.0) > UNIT_TOL:
        raise GameDomainError(f"direction must be a unit vector, |u| = {norm}")
    dot = float(np.dot(point.unit_vector(), u))
    return math.acos(max(-1.0, min(1.0, dot)))


# ---------------------------------------------------------------------------
# Randomness
# ---------------------------------------------------------------------------


class RandomSource:
    """Seeded source of uniform reals and decimal digits on separate streams.

    Backed by two counter-based Philox4x64-10 generators keyed with
    ``(seed, 0)`` for reals and ``(seed, 1)`` for digits, so drawing from one
    stream never perturbs the other.  Reals are 53-bit doubles in [0, 1);
    digits are uniform on {0, ..., 9}.  Batch draws consume the stream in the
    same order as repeated single draws.  Seeds are reduced modulo 2**64.
    A source is not safe for concurrent use.
    """

    def __init__(self, seed: int | None = None) -> None:
        if seed is None:
            seed = secrets.randbits(64)
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._reals = np.random.Generator(
            np.random.Philox(key=np.array([self.seed, 0], dtype=np.uint64))
        )
        self._digits = np.random.Generator(
            np.random.Philox(key=np.array([self.seed, 1], dtype=np.uint64))
        )
        self.reals_drawn = 0
        self.digits_drawn = 0

    def uniform(self) -> float:
        """One uniform real in [0, 1)."""
        self.reals_drawn += 1
        return float(self._reals.random())

    def uniform_batch(self, n: int) -> np.ndarray:
        """``n`` uniform reals, identical to ``n`` successive single draws."""
        self.reals_drawn += n
        return self._reals.random(n)

    def digit(self) -> int:
        """One uniform digit in {0, ..., 9}."""
        self.digits_drawn += 1
        return int(self._digits.integers(0, 10))

    def digit_batch(self, n: int) -> np.ndarray:
        """``n`` uniform digits, identical to ``n`` successive single draws."""
        self.digits_drawn += n
        return self._digits.integers(0, 10, size=n, dtype=np.int64)

    def digits(self) -> Iterator[int]:
        """Endless iterator over the digit stream."""
        while True:
            yield self.digit()


# ---------------------------------------------------------------------------
# Transcripts
# ---------------------------------------------------------------------------

TranscriptOutcome = Union[Outcome, SpinOutcome, Branch]

_BACKENDS = ("machine", "cards")


@dataclass(frozen=True)
class MeasurementTranscript:
    """Full record of one measurement: what happened and what was consumed.

    ``charge_fraction`` is present exactly when the machine backend ran;
    ``digits`` is present exactly when the card backend ran, and then
    ``draws_used`` equals the number of digits drawn.
    """

    outcome: TranscriptOutcome
    backend: str
    charge_fraction: float | None
    digits: tuple[int, ...] | None
    draws_used: int
    tie_break: bool = False

    def __post_init__(self) -> None:
        if self.backend not in _BACKENDS:
            raise GameDomainError(f"unknown backend {self.backend!r}")
        if self.backend == "machine":
            if self.charge_fraction is None or self.digits is not None:
                raise GameDomainError("machine transcripts carry a charge fraction and no digits")
            if self.draws_used != 1:
                raise GameDomainError("the machine resolves in exactly one draw")
            if self.tie_break:
                raise GameDomainError("tie-breaks can only occur on the card backend")
        else:
            if self.digits is None or self.charge_fraction is not None:
                raise GameDomainError("card transcripts carry digits and no charge fraction")
            if self.draws_used != len(self.digits) or self.draws_used < 1:
                raise GameDomainError("draws_used must count the digits drawn, at least one")


def transcript_to_json(transcript: MeasurementTranscript) -> str:
    """Serialise a transcript to a stable, compact JSON string."""
    payload = {
        "backend": transcript.backend,
        "outcome": transcript.outcome.value,
        "charge_fraction": transcript.charge_fraction,
        "digits": None if transcript.digits is None else list(transcript.digits),
        "draws_used": transcript.draws_used,
        "tie_break": transcript.tie_break,
    }
    return json.dumps(payload, separators=(",", ":"))


def _parse_outcome_token(token: str) -> TranscriptOutcome:
    for enum_type in (Outcome, SpinOutcome, Branch):
        try:
            return enum_type(token)
        except ValueError:
            continue
    raise GameDomainError(f"unknown outcome token {token!r}")


def transcript_from_json(blob: str) -> MeasurementTranscript:
    """Inverse of :func:`transcript_to_json`."""
    raw = json.loads(blob)
    return MeasurementTranscript(
        outcome=_parse_outcome_token(raw["outcome"]),
        backend=raw["backend"],
        charge_fraction=raw["charge_fraction"],
        digits=None if raw["digits"] is None else tuple(raw["digits"]),
        draws_used=raw["draws_used"],
        tie_break=raw["tie_break"],
    )


# ---------------------------------------------------------------------------
# Charged-sphere machine
# ---------------------------------------------------------------------------


def spin_measurement(
    state: BlochPoint, direction: Sequence[float], rng: RandomSource
) -> MeasurementTranscript:
    """Measure a surface state along ``direction`` with one charge draw.

    The draw ``u`` is the machine's charge fraction; the outcome is up
    exactly when ``u`` exceeds ``sin(theta/2)**2`` for the angle ``theta``
    between state and axis, which happens with probability
    ``cos(theta/2)**2``.  Interior states (r < 1) are not supported.
    """
    if abs(state.r - 1.0) > UNIT_TOL:
        raise UnsupportedStateError("the sphere machine only realises surface states (r = 1)")
    theta = angle_between(state, direction)
    threshold = math.sin(theta / 2.0) ** 2
    u = rng.uniform()
    outcome = SpinOutcome.UP if u > threshold else SpinOutcome.DOWN
    return MeasurementTranscript(
        outcome=outcome, backend="machine", charge_fraction=u, digits=None, draws_used=1
    )


def spin_measurement_batch(
    state: BlochPoint, direction: Sequence[float], n: int, rng: RandomSource
) -> np.ndarray:
    """Boolean up-flags for ``n`` spin measurements, one vectorised pass."""
    if abs(state.r - 1.0) > UNIT_TOL:
        raise UnsupportedStateError("the sphere machine only realises surface states (r = 1)")
    theta = angle_between(state, direction)
    threshold = math.sin(theta / 2.0) ** 2
    return rng.uniform_batch(n) > threshold


def machine_game_measurement(
    state: EntangledState, flip_alice: bool, flip_bob: bool, rng: RandomSource
) -> MeasurementTranscript:
    """Resolve one entangled round on the sphere machine.

    A single charge draw picks the double-O branch with probability
    ``a_sq`` (branch A) and the double-T branch otherwise; each player's
    flip then exchanges the letters on their own side only.
    """
    u = rng.uniform()
    raw = Outcome.OO if u > state.b_sq else Outcome.TT
    return MeasurementTranscript(
        outcome=raw.flipped(flip_alice, flip_bob),
        backend="machine",
        charge_fraction=u,
        digits=None,
        draws_used=1,
    )


def machine_game_branch_flags(
    state: EntangledState, n: int, rng: RandomSource
) -> np.ndarray:
    """Boolean branch-A flags for ``n`` machine rounds, one vectorised pass."""
    return rng.uniform_batch(n) > state.b_sq


# ---------------------------------------------------------------------------
# Card procedure
# ---------------------------------------------------------------------------


def _decimal_threshold(a_sq: float) -> Fraction:
    """The branch threshold as the exact shortest decimal for ``a_sq``.

    Card comparisons are carried out in exact rational arithmetic against
    the shortest decimal literal that round-trips to the stored float, so a
    state entered as ``0.55`` behaves as the written number 55/100 and any
    finitely-written threshold terminates once the drawn prefix clears it.
    """
    return Fraction(Decimal(repr(a_sq)))


class CardNarrowing:
    """Incremental base-ten interval narrowing against a fixed threshold.

    Feeding digit ``d`` shrinks the current interval to its ``d``-th tenth.
    After ``k`` digits the interval is ``[X/10**k, (X+1)/10**k)`` for the
    integer prefix ``X``; it resolves to branch A once it sits at or below
    the threshold and to branch B once it sits at or above it.  If the
    digit budget runs out while the interval still straddles the threshold,
    the round is resolved as branch B and flagged as a tie-break.
    """

    def __init__(self, state: EntangledState, max_digits: int = 16) -> None:
        if not 1 <= max_digits <= MAX_DIGIT_BUDGET:
            raise GameDomainError(
                f"max_digits must lie in [1, {MAX_DIGIT_BUDGET}], got {max_digits}"
            )
        self.threshold = _decimal_threshold(state.a_sq)
        self.max_digits = max_digits
        self.digits: list[int] = []
        self.prefix = 0
        self.decided: Branch | None = None
        self.tie_break = False

    @property
    def lo(self) -> Fraction:
        return Fraction(self.prefix, 10 ** len(self.digits))

    @property
    def hi(self) -> Fraction:
        return Fraction(self.prefix + 1, 10 ** len(self.digits))

    def interval_strings(self) -> tuple[str, str]:
        """The current interval endpoints as plain decimal strings."""
        k = len(self.digits)
        if k == 0:
            return "0", "1"
        lo = f"0.{self.prefix:0{k}d}"
        hi = "1" if self.prefix + 1 == 10**k else f"0.{self.prefix + 1:0{k}d}"
        return lo, hi

    def feed(self, digit: int) -> Branch | None:
        """Consume one digit; returns the branch once decided, else None."""
        if self.decided is not None:
            raise GameDomainError("measurement already resolved")
        digit = int(digit)
        if not 0 <= digit <= 9:
            raise GameDomainError(f"digits must lie in 0..9, got {digit}")
        self.digits.append(digit)
        self.prefix = self.prefix * 10 + digit
        k = len(self.digits)
        num, den = self.threshold.numerator, self.threshold.denominator
        scaled = num * 10**k
        floor_k = scaled // den
        ceil_k = -((-scaled) // den)
        if self.prefix + 1 <= floor_k:
            self.decided = Branch.A
        elif self.prefix >= ceil_k:
            self.decided = Branch.B
        elif k >= self.max_digits:
            self.decided = Branch.B
            self.tie_break = True
        return self.decided


def card_measurement(
    state: EntangledState, digits: Iterable[int], max_digits: int = 16
) -> MeasurementTranscript:
    """Run the card procedure against a supplied digit source.

    Digits are consumed one at a time until the interval resolves or the
    budget is exhausted (tie-break, resolved as branch B).  The source must
    supply enough digits to reach a decision.
    """
    narrowing = CardNarrowing(state, max_digits)
    stream = iter(digits)
    while narrowing.decided is None:
        try:
            d = next(stream)
        except StopIteration:
            raise GameDomainError(
                "digit source exhausted before the interval resolved"
            ) from None
        narrowing.feed(d)
    return MeasurementTranscript(
        outcome=narrowing.decided,
        backend="cards",
        charge_fraction=None,
        digits=tuple(narrowing.digits),
        draws_used=len(narrowing.digits),
        tie_break=narrowing.tie_break,
    )


def card_game_measurement(
    state: EntangledState,
    flip_alice: bool,
    flip_bob: bool,
    rng: RandomSource,
    max_digits: int = 16,
) -> MeasurementTranscript:
    """Resolve one entangled round by drawing digits from ``rng``.

    Branch A maps to the double-O outcome and branch B to double-T before
    the players' flips relabel their own letters.
    """
    base = card_measurement(state, rng.digits(), max_digits)
    raw = Outcome.OO if base.outcome is Branch.A else Outcome.TT
    return MeasurementTranscript(
        outcome=raw.flipped(flip_alice, flip_bob),
        backend="cards",
        charge_fraction=None,
        digits=base.digits,
        draws_used=base.draws_used,
        tie_break=base.tie_break,
    )


def card_game_branch_flags(
    state: EntangledState, n: int, rng: RandomSource, max_digits: int = 16
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised card rounds: branch-A flags, draws used, tie-break flags.

    Trials advance in waves: every still-undecided trial draws its next
    digit in trial order, so the digit stream is consumed wave by wave
    rather than trial by trial.  For a single trial this coincides with the
    sequential order.
    """
    if not 1 <= max_digits <= MAX_DIGIT_BUDGET:
        raise GameDomainError(
            f"max_digits must lie in [1, {MAX_DIGIT_BUDGET}], got {max_digits}"
        )
    threshold = _decimal_threshold(state.a_sq)
    num, den = threshold.numerator, threshold.denominator
    branch_a = np.zeros(n, dtype=bool)
    draws = np.zeros(n, dtype=np.int64)
    ties = np.zeros(n, dtype=bool)
    prefixes = np.zeros(n, dtype=np.int64)
    active = np.arange(n)
    for k in range(1, max_digits + 1):
        if active.size == 0:
            break
        new_digits = rng.digit_batch(active.size)
        prefixes[active] = prefixes[active] * 10 + new_digits
        scaled = num * 10**k
        floor_k = scaled // den
        ceil_k = -((-scaled) // den)
        current = prefixes[active]
        is_a = current + 1 <= floor_k
        is_b = current >= ceil_k
        decided = is_a | is_b
        settled = active[decided]
        branch_a[settled] = is_a[decided]
        draws[settled] = k
        active = active[~decided]
    if active.size:
        draws[active] = max_digits
        ties[active] = True
    return branch_a, draws, ties
