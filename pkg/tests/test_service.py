"""Play service tests: one scripted client session over a real socket."""

import json
import socket
import threading
import time

import pytest

from baserace.game import BoardConfig, Color, GameState, legal_moves, format_move
from baserace.experiment import BatchSpec, ExperimentPlan, NetInit
from baserace.records import read_log, replay_record
from baserace.service import NoInteractiveStagesError, PlayService
from baserace.training import TDParams


def interactive_plan(stages=1, cc=1, hc=1):
    return ExperimentPlan(
        board=BoardConfig(6, 1, 3),
        seed=3,
        move_cap=200,
        td=TDParams(),
        batches=(
            BatchSpec(
                id="live", kind="HC1", stages=stages, cc_games_per_stage=cc,
                hc_games_per_stage=hc, human_agent="Interactive",
                white_init=NetInit(tabula_rasa=1), black_init=NetInit(tabula_rasa=2),
            ),
        ),
    )


class Client:
    """Minimal line-JSON client used by the tests."""

    def __init__(self, address, timeout=20.0):
        self.sock = socket.create_connection(address, timeout=timeout)
        self.reader = self.sock.makefile("r", encoding="utf-8")
        self.beta = None

    def send(self, message):
        self.sock.sendall((json.dumps(message) + "\n").encode())

    def next_message(self, *, timeout=20.0):
        line = self.reader.readline()
        if line == "":
            raise ConnectionError("server closed")
        return json.loads(line)

    def wait_for(self, kind, *, allow=("progress", "state", "hello")):
        while True:
            message = self.next_message()
            if message["type"] == kind:
                return message
            if message["type"] not in allow:
                raise AssertionError(f"unexpected {message['type']} while waiting for {kind}: {message}")

    def close(self):
        # Both must go: the reader file object keeps the descriptor alive,
        # so closing only the socket would never send the FIN.
        for target in (self.reader, self.sock):
            try:
                target.close()
            except OSError:
                pass


def state_from_message(message, beta):
    return GameState(
        config=BoardConfig(message["board"]["n"], message["board"]["a"], beta),
        occupancy={(e["x"], e["y"]): Color(e["color"]) for e in message["occupancy"]},
        white_reserve=message["whiteReserve"],
        black_reserve=message["blackReserve"],
        side_to_move=Color(message["sideToMove"]),
        move_count=message["moveCount"],
    )


@pytest.fixture
def service(tmp_path):
    service = PlayService(interactive_plan(), tmp_path, ("127.0.0.1", 0))
    report_box = {}
    thread = threading.Thread(target=lambda: report_box.update(report=service.run()), daemon=True)
    thread.start()
    yield service, report_box, tmp_path
    service.close()
    thread.join(timeout=30)


def play_full_game(client, beta, *, misplay_first=False):
    """Drive one HC game to the end; returns the gameOver message."""
    last_state = None
    misplayed = False
    while True:
        message = client.next_message()
        kind = message["type"]
        if kind == "state":
            last_state = state_from_message(message, beta)
        elif kind == "yourTurn":
            assert last_state is not None and last_state.side_to_move is Color.WHITE
            moves = legal_moves(last_state)
            if misplay_first and not misplayed:
                misplayed = True
                client.send({"type": "move", "move": "a5-a4"})  # nothing there
                result = client.wait_for("moveResult")
                assert result["accepted"] is False
                assert result["rule"] in ("no-pawn", "out-of-bounds", "distance")
            client.send({"type": "move", "move": format_move(moves[0])})
            result = client.wait_for("moveResult", allow=("state", "progress"))
            assert result["accepted"] is True
        elif kind == "gameOver":
            return message
        elif kind in ("progress", "hello", "moveResult"):
            continue
        elif kind == "error":
            raise AssertionError(f"server error: {message}")
        elif kind == "done":
            raise AssertionError("plan finished before the game ended")


def test_full_interactive_session(service):
    play_service, report_box, out_dir = service
    client = Client(play_service.address)
    hello = client.wait_for("hello", allow=())
    assert hello["protocol"] == 1
    beta = hello["board"]["beta"]
    game_over = play_full_game(client, beta, misplay_first=True)
    assert game_over["winner"] in ("White", "Black", "Draw")
    # wait for the plan (one CC game after the HC game) to finish
    deadline = time.time() + 60
    while "report" not in report_box and time.time() < deadline:
        time.sleep(0.1)
    assert report_box["report"].ok
    header, records = read_log(out_dir / "live" / "games.jsonl")
    completed = [r for r in records if not r.aborted]
    assert len(completed) == 2  # 1 HC + 1 CC
    assert completed[0].game_kind == "HC"
    for record in completed:
        replay_record(record, header.board)
    client.close()


def test_second_client_conflicts(service):
    play_service, _report_box, _out = service
    first = Client(play_service.address)
    first.wait_for("hello", allow=())
    second = Client(play_service.address)
    message = second.next_message()
    assert message["type"] == "error"
    assert message["code"] == "SessionConflict"
    first.close()
    second.close()


def test_disconnect_aborts_and_reoffers(service):
    play_service, report_box, out_dir = service
    client = Client(play_service.address)
    hello = client.wait_for("hello", allow=())
    beta = hello["board"]["beta"]
    # enter the game, then vanish mid-game
    client.wait_for("yourTurn", allow=("progress", "state", "hello"))
    client.close()
    time.sleep(0.3)
    replacement = Client(play_service.address)
    replacement.wait_for("hello", allow=())
    game_over = play_full_game(replacement, beta)
    assert game_over["winner"] in ("White", "Black", "Draw")
    deadline = time.time() + 60
    while "report" not in report_box and time.time() < deadline:
        time.sleep(0.1)
    _header, records = read_log(out_dir / "live" / "games.jsonl")
    aborted = [r for r in records if r.aborted]
    completed = [r for r in records if not r.aborted]
    assert len(aborted) >= 1
    assert aborted[0].outcome is None
    assert len(completed) == 2
    replacement.close()


def test_plain_plan_refused(tmp_path):
    plan = ExperimentPlan(
        board=BoardConfig(6, 1, 3), seed=1, move_cap=100, td=TDParams(),
        batches=(
            BatchSpec(id="cc", kind="CC", stages=1, cc_games_per_stage=1,
                      white_init=NetInit(tabula_rasa=1), black_init=NetInit(tabula_rasa=2)),
        ),
    )
    with pytest.raises(NoInteractiveStagesError):
        PlayService(plan, tmp_path, ("127.0.0.1", 0))


def test_wrong_phase_and_malformed(service):
    play_service, _report_box, _out = service
    client = Client(play_service.address)
    client.wait_for("hello", allow=())
    client.wait_for("yourTurn", allow=("progress", "state"))
    client.send({"type": "move", "move": "garbage !!"})
    error = client.wait_for("error", allow=("state",))
    assert error["code"] == "MalformedMove"
    client.send({"type": "ping"})
    error = client.wait_for("error", allow=("state",))
    assert error["code"] == "WrongPhase"
    client.close()
