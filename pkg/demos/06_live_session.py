"""
A live match, driven through the session protocol
=================================================

The server logic is plain Python: a SessionStore that takes one request
envelope at a time and answers with a reply plus state pushes for the
connected seats.  This script plays two rounds in process, exactly the
traffic a websocket client would produce, and prints what each side is
allowed to see while moves are still hidden.
"""

import json
import tempfile
from pathlib import Path

from tencards.server import PROTOCOL_VERSION, SessionStore

log_dir = tempfile.mkdtemp(prefix="tencards-demo-")
store = SessionStore(log_dir=log_dir)


def call(kind: str, **payload) -> dict:
    reply, _ = store.dispatch(
        {"protocol_version": PROTOCOL_VERSION, "kind": kind, "payload": payload}
    )
    if reply["kind"] == "error":
        raise RuntimeError(reply["payload"])
    return reply["payload"]


created = call("create", seed=42)
sid, alice = created["session_id"], created["token"]
bob = call("join", session_id=sid)["token"]
print(f"session {sid}, seed {created['seed']}")

call("configure", session_id=sid, alpha=5.0, beta=3.0, gamma=1.0, a_sq=0.55)

# What-if: before committing, Alice asks what a mutual opera night pays
# and what her best response to q = 1/3 would be.
probe = call("what_if", session_id=sid, token=alice, own=1.0, assumed=1.0)
print(f"alice what-if (1, 1): payoffs {probe['payoffs']}, best response {probe['best_response']}")

call("commit_move", session_id=sid, token=alice, move={"kind": "mixed", "prob_identity": 0.5})

# Bob has committed nothing yet, so Alice's view hides his seat state.
view = call("get_state", session_id=sid, token=alice)
print(f"alice sees phase={view['phase']}, opponent committed={view['opponent_committed']}")

call("commit_move", session_id=sid, token=bob, move={"kind": "flip"})

# Both moves are in; the branch is now resolved by drawing cards.
while True:
    step = call("draw_card", session_id=sid, token=alice)
    span = step["interval"]
    print(f"  card {step['digit']}: number in [{span['lo']}, {span['hi']})", end="")
    if step["decided"] is not None:
        print(f" -> decided, outcome {step['round']['outcome']}")
        break
    print()

view = call("get_state", session_id=sid, token=bob)
print(f"round payoffs: {view['last_round']['payoffs']}, cumulative {view['cumulative']}")

# A second round reuses the session: configure starts the next round.
call("configure", session_id=sid, alpha=5.0, beta=3.0, gamma=1.0, a_sq=0.55)
call("commit_move", session_id=sid, token=alice, move={"kind": "identity"})
call("commit_move", session_id=sid, token=bob, move={"kind": "identity"})
while call("draw_card", session_id=sid, token=bob)["decided"] is None:
    pass
view = call("get_state", session_id=sid, token=alice)
print(f"after round {view['round_index']}: cumulative {view['cumulative']}")

# Every request, reply, and push was appended to a JSONL log; replaying
# the same script against a fresh store reproduces it byte for byte.
(log_file,) = sorted(Path(log_dir).glob("*.jsonl"))
lines = log_file.read_text().splitlines()
kinds = [json.loads(line)["type"] for line in lines]
print(f"\nsession log {log_file.name}: {len(lines)} entries "
      f"({kinds.count('request')} requests, {kinds.count('push')} pushes)")
