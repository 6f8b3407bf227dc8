"""Tests for the session store: protocol dispatch, phases, hiding, replay."""

from __future__ import annotations

import json

import pytest

from tencards.server.sessions import PROTOCOL_VERSION, SessionStore


def msg(kind: str, **payload) -> dict:
    return {"protocol_version": PROTOCOL_VERSION, "kind": kind, "payload": payload}


def ok(store: SessionStore, kind: str, **payload) -> dict:
    reply, _ = store.dispatch(msg(kind, **payload))
    assert reply["kind"] == "reply", reply
    return reply["payload"]


def fail(store: SessionStore, kind: str, **payload) -> str:
    reply, _ = store.dispatch(msg(kind, **payload))
    assert reply["kind"] == "error", reply
    return reply["payload"]["code"]


def new_pair(store: SessionStore, seed: int | None = 42) -> tuple[str, str, str]:
    created = ok(store, "create", seed=seed)
    sid, alice = created["session_id"], created["token"]
    bob = ok(store, "join", session_id=sid)["token"]
    return sid, alice, bob


def configure_bos(store: SessionStore, sid: str, a_sq: float = 0.5, **extra) -> dict:
    return ok(
        store, "configure", session_id=sid, alpha=5.0, beta=3.0, gamma=1.0, a_sq=a_sq, **extra
    )


def play_round(
    store: SessionStore, sid: str, alice: str, bob: str, move_a: dict, move_b: dict
) -> dict:
    ok(store, "commit_move", session_id=sid, token=alice, move=move_a)
    ok(store, "commit_move", session_id=sid, token=bob, move=move_b)
    while True:
        step = ok(store, "draw_card", session_id=sid, token=alice)
        if step["decided"] is not None:
            return step


IDENTITY = {"kind": "identity"}
FLIP = {"kind": "flip"}


# ---------------------------------------------------------------------------
# create / join
# ---------------------------------------------------------------------------

def test_create_is_deterministic_given_seed():
    a = ok(SessionStore(), "create", seed=42)
    b = ok(SessionStore(), "create", seed=42)
    assert a == b
    assert a["seat"] == "alice"
    assert a["seed"] == "42"


def test_creates_in_one_store_get_distinct_ids():
    store = SessionStore()
    first = ok(store, "create", seed=42)
    second = ok(store, "create", seed=42)
    assert first["session_id"] != second["session_id"]


def test_create_without_seed_records_server_choice():
    store = SessionStore()
    created = ok(store, "create")
    sid, token = created["session_id"], created["token"]
    view = ok(store, "get_state", session_id=sid, token=token)
    assert view["seed"] == created["seed"]
    assert int(created["seed"]) >= 0


def test_join_lifecycle():
    store = SessionStore()
    sid = ok(store, "create", seed=1)["session_id"]
    joined = ok(store, "join", session_id=sid)
    assert joined["seat"] == "bob"
    assert fail(store, "join", session_id=sid) == "seat_taken"
    assert fail(store, "join", session_id="nope") == "unknown_session"


# ---------------------------------------------------------------------------
# configure
# ---------------------------------------------------------------------------

def test_configure_requires_both_seats():
    store = SessionStore()
    sid = ok(store, "create", seed=1)["session_id"]
    assert (
        fail(store, "configure", session_id=sid, alpha=5.0, beta=3.0, gamma=1.0, a_sq=0.5)
        == "wrong_phase"
    )


def test_configure_moves_to_committing():
    store = SessionStore()
    sid, alice, _ = new_pair(store)
    acked = configure_bos(store, sid)
    assert acked["phase"] == "committing"
    assert acked["config"]["is_bos"] is True
    view = ok(store, "get_state", session_id=sid, token=alice)
    assert view["phase"] == "committing"
    assert view["config"]["alpha"] == "5.0"


def test_configure_accepts_non_bos_with_flag():
    store = SessionStore()
    sid, _, _ = new_pair(store)
    acked = ok(store, "configure", session_id=sid, alpha=1.0, beta=3.0, gamma=5.0, a_sq=0.5)
    assert acked["config"]["is_bos"] is False


def test_configure_range_error():
    store = SessionStore()
    sid, _, _ = new_pair(store)
    assert (
        fail(store, "configure", session_id=sid, alpha=5.0, beta=3.0, gamma=1.0, a_sq=1.2)
        == "range"
    )


# ---------------------------------------------------------------------------
# commit_move and draw_card
# ---------------------------------------------------------------------------

def test_full_deterministic_round():
    store = SessionStore()
    sid, alice, bob = new_pair(store)
    configure_bos(store, sid, a_sq=1.0)
    final = play_round(store, sid, alice, bob, IDENTITY, IDENTITY)
    assert final["outcome"] == "OO"
    assert final["round"]["payoffs"] == {"alice": "5.0", "bob": "3.0"}
    assert final["round"]["sampled_flips"] == {"alice": False, "bob": False}
    view = ok(store, "get_state", session_id=sid, token=alice)
    assert view["phase"] == "revealed"
    assert view["cumulative"] == {"alice": "5.0", "bob": "3.0"}


def test_flips_relabel_outcome():
    store = SessionStore()
    sid, alice, bob = new_pair(store)
    configure_bos(store, sid, a_sq=1.0)
    final = play_round(store, sid, alice, bob, FLIP, IDENTITY)
    assert final["outcome"] == "TO"
    assert final["round"]["payoffs"] == {"alice": "1.0", "bob": "1.0"}


def test_half_threshold_resolves_in_one_draw():
    store = SessionStore()
    sid, alice, bob = new_pair(store)
    configure_bos(store, sid, a_sq=0.5)
    final = play_round(store, sid, alice, bob, IDENTITY, IDENTITY)
    assert len(final["digits"]) == 1


def test_commit_guards():
    store = SessionStore()
    sid, alice, bob = new_pair(store)
    assert fail(store, "commit_move", session_id=sid, token=alice, move=IDENTITY) == "wrong_phase"
    configure_bos(store, sid)
    assert fail(store, "commit_move", session_id=sid, token="zzz", move=IDENTITY) == "bad_token"
    ok(store, "commit_move", session_id=sid, token=alice, move=IDENTITY)
    assert (
        fail(store, "commit_move", session_id=sid, token=alice, move=IDENTITY) == "double_commit"
    )
    bad_move = {"kind": "mixed", "prob_identity": 1.5}
    assert fail(store, "commit_move", session_id=sid, token=bob, move=bad_move) == "range"


def test_mixed_move_sampled_and_audited():
    store = SessionStore()
    sid, alice, bob = new_pair(store)
    configure_bos(store, sid, a_sq=1.0)
    mixed = {"kind": "mixed", "prob_identity": 0.5}
    final = play_round(store, sid, alice, bob, mixed, IDENTITY)
    record = final["round"]
    assert record["moves"]["alice"] == {"kind": "mixed", "prob_identity": 0.5}
    assert record["sampled_flips"]["alice"] in (True, False)
    assert record["sampled_flips"]["bob"] is False
    assert final["outcome"] in ("OO", "TO")


def test_draw_card_guards():
    store = SessionStore()
    sid, alice, _ = new_pair(store)
    assert fail(store, "draw_card", session_id=sid, token=alice) == "wrong_phase"
    configure_bos(store, sid)
    assert fail(store, "draw_card", session_id=sid, token=alice) == "wrong_phase"


def test_auto_draw_completes_in_one_call():
    store = SessionStore()
    sid, alice, bob = new_pair(store)
    configure_bos(store, sid, a_sq=0.55, auto_draw=True)
    ok(store, "commit_move", session_id=sid, token=alice, move=IDENTITY)
    ok(store, "commit_move", session_id=sid, token=bob, move=IDENTITY)
    step = ok(store, "draw_card", session_id=sid, token=bob)
    assert step["decided"] is not None
    assert len(step["digits"]) >= 1


def test_next_round_via_configure():
    store = SessionStore()
    sid, alice, bob = new_pair(store)
    configure_bos(store, sid, a_sq=1.0)
    play_round(store, sid, alice, bob, IDENTITY, IDENTITY)
    configure_bos(store, sid, a_sq=1.0)
    final = play_round(store, sid, alice, bob, IDENTITY, FLIP)
    assert final["outcome"] == "OT"
    view = ok(store, "get_state", session_id=sid, token=alice)
    assert view["round_index"] == 2
    assert len(view["history"]) == 2
    assert view["cumulative"] == {"alice": "6.0", "bob": "4.0"}


def test_score_conservation_over_rounds():
    store = SessionStore()
    sid, alice, bob = new_pair(store, seed=7)
    moves = [(IDENTITY, IDENTITY), (FLIP, IDENTITY), ({"kind": "mixed", "prob_identity": 0.3}, FLIP)]
    for move_a, move_b in moves:
        configure_bos(store, sid, a_sq=0.55)
        play_round(store, sid, alice, bob, move_a, move_b)
    view = ok(store, "get_state", session_id=sid, token=alice)
    total_a = sum(float(r["payoffs"]["alice"]) for r in view["history"])
    total_b = sum(float(r["payoffs"]["bob"]) for r in view["history"])
    assert float(view["cumulative"]["alice"]) == total_a
    assert float(view["cumulative"]["bob"]) == total_b


# ---------------------------------------------------------------------------
# what_if
# ---------------------------------------------------------------------------

def test_what_if_examples():
    store = SessionStore()
    sid, alice, _ = new_pair(store)
    configure_bos(store, sid, a_sq=1.0)
    reply = ok(store, "what_if", session_id=sid, token=alice, own=1.0, assumed=1.0)
    assert reply["payoffs"] == {"alice": "5.0", "bob": "3.0"}
    assert reply["best_response"] == {"lo": 1.0, "hi": 1.0}
    reply = ok(store, "what_if", session_id=sid, token=alice, own=1.0, assumed=1 / 3)
    assert reply["best_response"] == {"lo": 0.0, "hi": 1.0}


def test_what_if_center_point():
    store = SessionStore()
    sid, _, bob = new_pair(store)
    configure_bos(store, sid, a_sq=0.5)
    reply = ok(store, "what_if", session_id=sid, token=bob, own=0.5, assumed=0.5)
    assert reply["payoffs"] == {"alice": "2.5", "bob": "2.5"}


def test_what_if_is_seat_sided():
    # Bob's own probability is q: against an assumed Alice p=1 at a_sq=1,
    # identity is his best response and the payoff pair is ordered (Alice, Bob).
    store = SessionStore()
    sid, _, bob = new_pair(store)
    configure_bos(store, sid, a_sq=1.0)
    reply = ok(store, "what_if", session_id=sid, token=bob, own=0.0, assumed=1.0)
    assert reply["payoffs"] == {"alice": "1.0", "bob": "1.0"}
    assert reply["best_response"] == {"lo": 1.0, "hi": 1.0}


def test_what_if_guards():
    store = SessionStore()
    sid, alice, _ = new_pair(store)
    assert fail(store, "what_if", session_id=sid, token=alice, own=0.5, assumed=0.5) == "wrong_phase"
    configure_bos(store, sid)
    assert fail(store, "what_if", session_id=sid, token="zzz", own=0.5, assumed=0.5) == "bad_token"
    assert fail(store, "what_if", session_id=sid, token=alice, own=1.5, assumed=0.5) == "range"


def test_what_if_does_not_change_state():
    store = SessionStore()
    sid, alice, bob = new_pair(store)
    configure_bos(store, sid)
    before = json.dumps(ok(store, "get_state", session_id=sid, token=alice), sort_keys=True)
    ok(store, "what_if", session_id=sid, token=alice, own=0.3, assumed=0.9)
    after = json.dumps(ok(store, "get_state", session_id=sid, token=alice), sort_keys=True)
    assert before == after


# ---------------------------------------------------------------------------
# hiding
# ---------------------------------------------------------------------------

def run_until_measuring(move_b: dict) -> tuple[SessionStore, str, str, str]:
    store = SessionStore()
    sid, alice, bob = new_pair(store)
    configure_bos(store, sid, a_sq=0.55)
    ok(store, "commit_move", session_id=sid, token=bob, move=move_b)
    return store, sid, alice, bob


def alice_view_bytes(store: SessionStore, sid: str, alice: str) -> str:
    return json.dumps(ok(store, "get_state", session_id=sid, token=alice), sort_keys=True)


def test_opponent_move_is_hidden_until_reveal():
    views_committing = []
    views_measuring = []
    for move_b in (IDENTITY, FLIP, {"kind": "mixed", "prob_identity": 0.25}):
        store, sid, alice, _ = run_until_measuring(move_b)
        views_committing.append(alice_view_bytes(store, sid, alice))
        ok(store, "commit_move", session_id=sid, token=alice, move=IDENTITY)
        views_measuring.append(alice_view_bytes(store, sid, alice))
    assert len(set(views_committing)) == 1
    assert len(set(views_measuring)) == 1


def test_pushes_are_seat_scoped_and_hide_moves():
    pushed = {}
    for move_b in (IDENTITY, FLIP):
        store = SessionStore()
        sid, alice, bob = new_pair(store)
        configure_bos(store, sid)
        reply, pushes = store.dispatch(
            msg("commit_move", session_id=sid, token=bob, move=move_b)
        )
        assert reply["kind"] == "reply"
        alice_pushes = [p for p in pushes if p.seat == "alice"]
        assert alice_pushes, "both seats receive a push on state change"
        assert all(p.message["kind"] == "state_push" for p in pushes)
        pushed[move_b["kind"]] = json.dumps(
            [p.message for p in alice_pushes], sort_keys=True
        )
    assert pushed["identity"] == pushed["flip"]


def test_revealed_view_shows_both_moves():
    store = SessionStore()
    sid, alice, bob = new_pair(store)
    configure_bos(store, sid, a_sq=1.0)
    play_round(store, sid, alice, bob, IDENTITY, FLIP)
    view = ok(store, "get_state", session_id=sid, token=alice)
    assert view["history"][0]["moves"]["bob"] == {"kind": "flip", "prob_identity": None}
    assert view["opponent_labels"] is not None


# ---------------------------------------------------------------------------
# phase machine, exhaustively
# ---------------------------------------------------------------------------

def drive_to(phase: str) -> tuple[SessionStore, str, str, str]:
    store = SessionStore()
    sid, alice, bob = new_pair(store)
    if phase == "lobby":
        return store, sid, alice, bob
    configure_bos(store, sid, a_sq=0.55)
    if phase == "committing":
        return store, sid, alice, bob
    ok(store, "commit_move", session_id=sid, token=alice, move=IDENTITY)
    ok(store, "commit_move", session_id=sid, token=bob, move=IDENTITY)
    if phase == "measuring":
        return store, sid, alice, bob
    while ok(store, "draw_card", session_id=sid, token=alice)["decided"] is None:
        pass
    return store, sid, alice, bob


# drive_to("lobby") leaves both seats filled, so configure is legal there
ALLOWED = {
    "lobby": {"configure", "get_state"},
    "committing": {"commit_move", "get_state", "what_if"},
    "measuring": {"draw_card", "get_state", "what_if"},
    "revealed": {"configure", "get_state", "what_if"},
}

PROBES = {
    "configure": dict(alpha=5.0, beta=3.0, gamma=1.0, a_sq=0.5),
    "commit_move": dict(move=IDENTITY),
    "draw_card": dict(),
    "get_state": dict(),
    "what_if": dict(own=0.5, assumed=0.5),
}


@pytest.mark.parametrize("phase", sorted(ALLOWED))
def test_phase_machine(phase):
    for kind, extra in PROBES.items():
        store, sid, alice, _ = drive_to(phase)
        payload = dict(session_id=sid, **extra)
        if kind != "configure":
            payload["token"] = alice
        reply, _ = store.dispatch(msg(kind, **payload))
        if kind in ALLOWED[phase]:
            assert reply["kind"] == "reply", (phase, kind, reply)
        else:
            assert reply["kind"] == "error", (phase, kind)
            assert reply["payload"]["code"] == "wrong_phase", (phase, kind, reply)


# ---------------------------------------------------------------------------
# bot seat
# ---------------------------------------------------------------------------

def test_bot_session_plays_best_response_to_uniform_prior():
    store = SessionStore()
    created = ok(store, "create", seed=42, bot=True)
    sid, alice = created["session_id"], created["token"]
    assert fail(store, "join", session_id=sid) == "seat_taken"
    configure_bos(store, sid, a_sq=1.0)
    ok(store, "commit_move", session_id=sid, token=alice, move=IDENTITY)
    view = ok(store, "get_state", session_id=sid, token=alice)
    assert view["phase"] == "measuring"  # the bot had already committed
    while ok(store, "draw_card", session_id=sid, token=alice)["decided"] is None:
        pass
    view = ok(store, "get_state", session_id=sid, token=alice)
    # at a_sq=1 Bob's payoff slope against uniform p=1/2 is negative: flip
    assert view["history"][0]["moves"]["bob"] == {"kind": "flip", "prob_identity": None}


# ---------------------------------------------------------------------------
# protocol envelope and replay
# ---------------------------------------------------------------------------

def test_envelope_validation():
    store = SessionStore()
    reply, _ = store.dispatch({"protocol_version": 2, "kind": "create", "payload": {}})
    assert reply["kind"] == "error" and reply["payload"]["code"] == "bad_request"
    reply, _ = store.dispatch({"protocol_version": 1, "kind": "shuffle", "payload": {}})
    assert reply["kind"] == "error" and reply["payload"]["code"] == "bad_request"
    reply, _ = store.dispatch({"protocol_version": 1, "kind": "create", "payload": []})
    assert reply["kind"] == "error" and reply["payload"]["code"] == "bad_request"


def script_lines(tmpdir: str) -> list[str]:
    store = SessionStore(log_dir=tmpdir)
    sid, alice, bob = new_pair(store, seed=42)
    configure_bos(store, sid, a_sq=0.55)
    ok(store, "commit_move", session_id=sid, token=alice, move={"kind": "mixed", "prob_identity": 0.5})
    ok(store, "commit_move", session_id=sid, token=bob, move=FLIP)
    while ok(store, "draw_card", session_id=sid, token=alice)["decided"] is None:
        pass
    from pathlib import Path

    (log_file,) = sorted(Path(tmpdir).glob("*.jsonl"))
    return log_file.read_text().splitlines()


def test_scripted_replay_produces_identical_logs(tmp_path):
    first = script_lines(str(tmp_path / "run1"))
    second = script_lines(str(tmp_path / "run2"))
    assert first == second
    assert all(json.loads(line) for line in first)
