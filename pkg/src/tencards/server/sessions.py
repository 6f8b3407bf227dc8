"""Pure session logic for live two-player matches.

A :class:`SessionStore` holds every active session and handles protocol
messages one at a time, returning exactly one reply plus any state pushes
for connected seats.  No I/O happens here beyond the optional append-only
session log, which makes the whole protocol replayable and testable
without a network stack.

Protocol envelope (version 1): requests are
``{"protocol_version": 1, "kind": <kind>, "payload": {...}}``; every
request gets one reply of kind ``reply`` (payload per request kind) or
``error`` (payload ``{"code", "message"}``).  State changes additionally
fan out ``state_push`` messages carrying seat-scoped snapshots, safe to
apply idempotently.  Payoff-valued fields are serialized as decimal
strings so logs replay byte for byte; seeds travel as strings because
64-bit integers do not survive JavaScript number parsing.
"""

from __future__ import annotations

import hashlib
import json
import secrets
from dataclasses import dataclass
from pathlib import Path

from ..core import (
    EntangledState,
    GameDomainError,
    Outcome,
    PayoffMatrix,
    StrategyProfile,
    best_response_alice,
    best_response_bob,
    expected_payoffs,
)
from ..simulator import Branch, CardNarrowing, MeasurementTranscript, RandomSource

__all__ = ["PROTOCOL_VERSION", "Push", "SessionStore"]

PROTOCOL_VERSION = 1

REQUEST_KINDS = (
    "create",
    "join",
    "configure",
    "commit_move",
    "draw_card",
    "get_state",
    "what_if",
)

PHASE_LOBBY = "lobby"
PHASE_COMMITTING = "committing"
PHASE_MEASURING = "measuring"
PHASE_REVEALED = "revealed"

SEATS = ("alice", "bob")

MOVE_KINDS = ("identity", "flip", "mixed")


class ProtocolError(Exception):
    """A request that cannot be honored; carries a stable error code."""

    def __init__(self, code: str, message: str) -> None:
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class Push:
    """A state_push message addressed to one seat of one session."""

    session_id: str
    seat: str
    message: dict


def _dec(x: float) -> str:
    """Decimal-string form of a payoff value, stable across serializations."""
    return repr(float(x))


def _labels(flipped: bool) -> list[str]:
    return ["T", "O"] if flipped else ["O", "T"]


@dataclass(frozen=True)
class Move:
    kind: str
    prob_identity: float | None = None

    @classmethod
    def from_payload(cls, raw: object) -> "Move":
        if not isinstance(raw, dict) or raw.get("kind") not in MOVE_KINDS:
            raise ProtocolError("bad_request", f"move must be one of {MOVE_KINDS}")
        kind = raw["kind"]
        if kind != "mixed":
            return cls(kind)
        prob = raw.get("prob_identity")
        if not isinstance(prob, (int, float)) or isinstance(prob, bool):
            raise ProtocolError("bad_request", "mixed moves need a numeric prob_identity")
        if not 0.0 <= prob <= 1.0:
            raise ProtocolError("range", f"prob_identity must lie in [0, 1], got {prob}")
        return cls(kind, float(prob))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "prob_identity": self.prob_identity}

    def sample_flip(self, rng: RandomSource) -> bool:
        """Resolve to a concrete flip; only mixed moves consume randomness."""
        if self.kind == "identity":
            return False
        if self.kind == "flip":
            return True
        return rng.uniform() >= self.prob_identity


class Session:
    """One live match: board config, seats, committed moves, rounds played."""

    def __init__(self, session_id: str, seed: int, tokens: dict[str, str], bot: bool) -> None:
        self.session_id = session_id
        self.seed = seed
        self.rng = RandomSource(seed)
        self.tokens = tokens
        self.bot = bot
        self.phase = PHASE_LOBBY
        self.payoffs: PayoffMatrix | None = None
        self.state: EntangledState | None = None
        self.auto_draw = False
        self.committed: dict[str, Move | None] = {"alice": None, "bob": None}
        self.sampled_flips: dict[str, bool] | None = None
        self.narrowing: CardNarrowing | None = None
        self.transcript: MeasurementTranscript | None = None
        self.history: list[dict] = []
        self.cumulative = (0.0, 0.0)

    # -- seats ------------------------------------------------------------

    @property
    def bob_present(self) -> bool:
        return self.tokens.get("bob") is not None

    @property
    def human_seats(self) -> list[str]:
        seats = ["alice"]
        if self.bob_present and not self.bot:
            seats.append("bob")
        return seats

    def seat_for(self, token: object) -> str:
        for seat in SEATS:
            if self.tokens.get(seat) == token and token is not None:
                return seat
        raise ProtocolError("bad_token", "no seat matches this token")

    # -- operations -------------------------------------------------------

    def join(self) -> str:
        if self.phase != PHASE_LOBBY or self.bob_present:
            raise ProtocolError("seat_taken", "the second seat is already occupied")
        token = _derive_token(self.session_id, "bob-join")
        self.tokens["bob"] = token
        return token

    def configure(
        self, alpha: float, beta: float, gamma: float, a_sq: float, auto_draw: bool
    ) -> None:
        if self.phase == PHASE_LOBBY and not self.bob_present:
            raise ProtocolError("wrong_phase", "both seats must be filled before configuring")
        if self.phase in (PHASE_COMMITTING, PHASE_MEASURING):
            raise ProtocolError("wrong_phase", "cannot reconfigure during a round")
        try:
            self.payoffs = PayoffMatrix(alpha, beta, gamma)
            self.state = EntangledState(a_sq)
        except GameDomainError as exc:
            raise ProtocolError("range", str(exc)) from None
        self.auto_draw = auto_draw
        self.committed = {"alice": None, "bob": None}
        self.sampled_flips = None
        self.narrowing = None
        self.transcript = None
        self.phase = PHASE_COMMITTING
        if self.bot:
            self.committed["bob"] = _bot_move(self.state, self.payoffs)

    def commit(self, seat: str, move: Move) -> None:
        if self.phase != PHASE_COMMITTING:
            raise ProtocolError("wrong_phase", "moves can only be committed while committing")
        if self.committed[seat] is not None:
            raise ProtocolError("double_commit", "this seat already committed a move")
        self.committed[seat] = move
        if all(self.committed[s] is not None for s in SEATS):
            # mixed moves are resolved here, in fixed seat order, so the
            # sampled pure action becomes part of the auditable history
            self.sampled_flips = {
                seat_name: self.committed[seat_name].sample_flip(self.rng)
                for seat_name in SEATS
            }
            self.narrowing = CardNarrowing(self.state)
            self.phase = PHASE_MEASURING

    def draw(self) -> dict:
        if self.phase != PHASE_MEASURING:
            raise ProtocolError("wrong_phase", "cards can only be drawn while measuring")
        self.narrowing.feed(self.rng.digit())
        while self.auto_draw and self.narrowing.decided is None:
            self.narrowing.feed(self.rng.digit())
        last = self.narrowing.digits[-1]
        lo, hi = self.narrowing.interval_strings()
        payload = {
            "digit": last,
            "digits": list(self.narrowing.digits),
            "interval": {"lo": lo, "hi": hi},
            "decided": None if self.narrowing.decided is None else self.narrowing.decided.value,
            "tie_break": self.narrowing.tie_break,
        }
        if self.narrowing.decided is not None:
            record = self._finish_round()
            payload["outcome"] = record["outcome"]
            payload["round"] = record
        return payload

    def _finish_round(self) -> dict:
        raw = Outcome.OO if self.narrowing.decided is Branch.A else Outcome.TT
        outcome = raw.flipped(self.sampled_flips["alice"], self.sampled_flips["bob"])
        pay = self.payoffs.payoff_for(outcome)
        self.transcript = MeasurementTranscript(
            outcome=outcome,
            backend="cards",
            charge_fraction=None,
            digits=tuple(self.narrowing.digits),
            draws_used=len(self.narrowing.digits),
            tie_break=self.narrowing.tie_break,
        )
        record = {
            "round_index": len(self.history),
            "config": self._config_dict(),
            "moves": {seat: self.committed[seat].to_dict() for seat in SEATS},
            "sampled_flips": dict(self.sampled_flips),
            "outcome": outcome.value,
            "digits": list(self.narrowing.digits),
            "tie_break": self.narrowing.tie_break,
            "payoffs": {"alice": _dec(pay[0]), "bob": _dec(pay[1])},
        }
        self.history.append(record)
        self.cumulative = (self.cumulative[0] + pay[0], self.cumulative[1] + pay[1])
        self.phase = PHASE_REVEALED
        return record

    def what_if(self, seat: str, own: float, assumed: float) -> dict:
        if self.payoffs is None:
            raise ProtocolError("wrong_phase", "the board has not been configured yet")
        try:
            if seat == "alice":
                profile = StrategyProfile(own, assumed)
                response = best_response_alice(assumed, self.state, self.payoffs)
            else:
                profile = StrategyProfile(assumed, own)
                response = best_response_bob(assumed, self.state, self.payoffs)
        except GameDomainError as exc:
            raise ProtocolError("range", str(exc)) from None
        pay = expected_payoffs(profile, self.state, self.payoffs)
        return {
            "payoffs": {"alice": _dec(pay[0]), "bob": _dec(pay[1])},
            "best_response": {"lo": response.lo, "hi": response.hi},
        }

    # -- views ------------------------------------------------------------

    def _config_dict(self) -> dict | None:
        if self.payoffs is None:
            return None
        return {
            "alpha": _dec(self.payoffs.alpha),
            "beta": _dec(self.payoffs.beta),
            "gamma": _dec(self.payoffs.gamma),
            "a_sq": self.state.a_sq,
            "is_bos": self.payoffs.is_bos,
            "auto_draw": self.auto_draw,
        }

    def _own_flip_state(self, seat: str) -> bool:
        """The flip currently showing on this seat's side of the board."""
        if self.phase in (PHASE_MEASURING, PHASE_REVEALED) and self.sampled_flips:
            return self.sampled_flips[seat]
        move = self.committed[seat]
        if move is not None and move.kind == "flip":
            return True
        return False

    def view(self, seat: str) -> dict:
        """Everything this seat may see; never the opponent's live move."""
        opponent = "bob" if seat == "alice" else "alice"
        own_move = self.committed[seat]
        hidden = self.phase in (PHASE_COMMITTING, PHASE_MEASURING)
        measurement = None
        if self.narrowing is not None:
            lo, hi = self.narrowing.interval_strings()
            measurement = {
                "digits": list(self.narrowing.digits),
                "interval": {"lo": lo, "hi": hi},
                "decided": None
                if self.narrowing.decided is None
                else self.narrowing.decided.value,
                "tie_break": self.narrowing.tie_break,
            }
        return {
            "session_id": self.session_id,
            "seat": seat,
            "phase": self.phase,
            "seed": str(self.seed),
            "round_index": len(self.history),
            "seats": {"alice": True, "bob": self.bob_present},
            "bot": self.bot,
            "config": self._config_dict(),
            "you_committed": own_move is not None,
            "opponent_committed": self.committed[opponent] is not None,
            "your_move": None if own_move is None else own_move.to_dict(),
            "your_labels": _labels(self._own_flip_state(seat)),
            "opponent_labels": None if hidden else _labels(self._own_flip_state(opponent)),
            "measurement": measurement,
            "last_round": self.history[-1] if self.history else None,
            "history": list(self.history),
            "cumulative": {"alice": _dec(self.cumulative[0]), "bob": _dec(self.cumulative[1])},
        }


def _bot_move(state: EntangledState, payoffs: PayoffMatrix) -> Move:
    """Bob's best response to a uniform prior over Alice's probability."""
    response = best_response_bob(0.5, state, payoffs)
    if response.is_interval:
        return Move("mixed", 0.5)
    return Move("identity" if response.lo == 1.0 else "flip")


def _derive_token(*parts: object) -> str:
    text = ":".join(str(p) for p in parts)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


class SessionStore:
    """In-memory session registry with single-threaded message dispatch.

    ``log_dir``, when given, receives one append-only JSONL file per
    session recording every request, reply and push in order; with a fixed
    seed the file replays byte for byte.
    """

    def __init__(self, log_dir: str | None = None) -> None:
        self.sessions: dict[str, Session] = {}
        self.created = 0
        self.log_path = Path(log_dir) if log_dir else None
        if self.log_path:
            self.log_path.mkdir(parents=True, exist_ok=True)

    # -- logging ----------------------------------------------------------

    def _log(self, session_id: str, entry: dict) -> None:
        if self.log_path is None:
            return
        with (self.log_path / f"{session_id}.jsonl").open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry, separators=(",", ":")) + "\n")

    # -- dispatch ---------------------------------------------------------

    def dispatch(self, message: object) -> tuple[dict, list[Push]]:
        """Handle one request; returns (reply, pushes for connected seats)."""
        kind = message.get("kind") if isinstance(message, dict) else None
        try:
            payload = self._validate_envelope(message)
            handler = getattr(self, f"_handle_{kind}")
            reply_payload, session = handler(payload)
            reply = {
                "protocol_version": PROTOCOL_VERSION,
                "kind": "reply",
                "to": kind,
                "payload": reply_payload,
            }
        except ProtocolError as exc:
            reply = {
                "protocol_version": PROTOCOL_VERSION,
                "kind": "error",
                "to": kind,
                "payload": {"code": exc.code, "message": str(exc)},
            }
            session = None

        pushes: list[Push] = []
        if session is not None and kind in ("join", "configure", "commit_move", "draw_card"):
            for seat in session.human_seats:
                pushes.append(
                    Push(
                        session_id=session.session_id,
                        seat=seat,
                        message={
                            "protocol_version": PROTOCOL_VERSION,
                            "kind": "state_push",
                            "payload": session.view(seat),
                        },
                    )
                )
        if session is not None:
            self._log(session.session_id, {"type": "request", "message": message})
            self._log(session.session_id, {"type": "reply", "message": reply})
            for push in pushes:
                self._log(
                    session.session_id,
                    {"type": "push", "seat": push.seat, "message": push.message},
                )
        return reply, pushes

    def _validate_envelope(self, message: object) -> dict:
        if not isinstance(message, dict):
            raise ProtocolError("bad_request", "message must be a JSON object")
        if message.get("protocol_version") != PROTOCOL_VERSION:
            raise ProtocolError(
                "bad_request", f"this server speaks protocol_version {PROTOCOL_VERSION}"
            )
        if message.get("kind") not in REQUEST_KINDS:
            raise ProtocolError("bad_request", f"kind must be one of {REQUEST_KINDS}")
        payload = message.get("payload")
        if not isinstance(payload, dict):
            raise ProtocolError("bad_request", "payload must be a JSON object")
        return payload

    def _session(self, payload: dict) -> Session:
        session = self.sessions.get(payload.get("session_id"))
        if session is None:
            raise ProtocolError("unknown_session", "no session with this id")
        return session

    @staticmethod
    def _number(payload: dict, key: str) -> float:
        value = payload.get(key)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ProtocolError("bad_request", f"{key} must be a number")
        return float(value)

    # -- handlers (each returns (reply_payload, session-for-pushes)) ------

    def _handle_create(self, payload: dict) -> tuple[dict, Session | None]:
        raw_seed = payload.get("seed")
        if raw_seed is None:
            seed = secrets.randbits(64)
        else:
            try:
                seed = int(raw_seed)
            except (TypeError, ValueError):
                raise ProtocolError("bad_request", "seed must be an integer") from None
        bot = bool(payload.get("bot", False))
        session_id = _derive_token("session", self.created, seed)[:12]
        alice_token = _derive_token(session_id, "alice")
        tokens = {"alice": alice_token, "bob": None}
        if bot:
            tokens["bob"] = _derive_token(session_id, "bot")
        session = Session(session_id, seed, tokens, bot)
        self.sessions[session_id] = session
        self.created += 1
        reply = {
            "session_id": session_id,
            "seat": "alice",
            "token": alice_token,
            "seed": str(seed),
        }
        return reply, session

    def _handle_join(self, payload: dict) -> tuple[dict, Session]:
        session = self._session(payload)
        token = session.join()
        return {"session_id": session.session_id, "seat": "bob", "token": token}, session

    def _handle_configure(self, payload: dict) -> tuple[dict, Session]:
        session = self._session(payload)
        session.configure(
            alpha=self._number(payload, "alpha"),
            beta=self._number(payload, "beta"),
            gamma=self._number(payload, "gamma"),
            a_sq=self._number(payload, "a_sq"),
            auto_draw=bool(payload.get("auto_draw", False)),
        )
        return {"phase": session.phase, "config": session._config_dict()}, session

    def _handle_commit_move(self, payload: dict) -> tuple[dict, Session]:
        session = self._session(payload)
        if session.phase != PHASE_COMMITTING:
            raise ProtocolError("wrong_phase", "moves can only be committed while committing")
        seat = session.seat_for(payload.get("token"))
        move = Move.from_payload(payload.get("move"))
        session.commit(seat, move)
        return {"committed": True, "phase": session.phase}, session

    def _handle_draw_card(self, payload: dict) -> tuple[dict, Session]:
        session = self._session(payload)
        if session.phase != PHASE_MEASURING:
            raise ProtocolError("wrong_phase", "cards can only be drawn while measuring")
        session.seat_for(payload.get("token"))
        return session.draw(), session

    def _handle_get_state(self, payload: dict) -> tuple[dict, Session]:
        session = self._session(payload)
        seat = session.seat_for(payload.get("token"))
        return session.view(seat), session

    def _handle_what_if(self, payload: dict) -> tuple[dict, Session]:
        session = self._session(payload)
        if session.payoffs is None:
            raise ProtocolError("wrong_phase", "the board has not been configured yet")
        seat = session.seat_for(payload.get("token"))
        own = self._number(payload, "own")
        assumed = self._number(payload, "assumed")
        return session.what_if(seat, own, assumed), session
