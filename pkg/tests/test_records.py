"""Game log round trips and replay verification."""

import json

import pytest

from baserace.game import Color
from baserace.agents import LearnerAgent
from baserace.net import init_network
from baserace.records import (
    GameRecord,
    LogHeader,
    ReplayDivergenceError,
    append_record,
    read_log,
    replay_record,
    write_header,
)
from baserace.training import play_training_game


@pytest.fixture
def played_record(small_board):
    white = init_network(small_board, Color.WHITE, seed=1)
    black = init_network(small_board, Color.BLACK, seed=2)
    result = play_training_game(
        small_board, LearnerAgent(white, 0.9, True), LearnerAgent(black, 0.9, True),
        seed=12, meta={"game_id": "t-0", "batch_id": "t", "game_kind": "CC"},
    )
    return result


def test_log_round_trip(tmp_path, small_board, played_record):
    path = tmp_path / "games.jsonl"
    header = LogHeader("t", small_board, 3000)
    with open(path, "w", encoding="utf-8") as fp:
        write_header(fp, header)
        append_record(fp, played_record.record)
    loaded_header, records = read_log(path)
    assert loaded_header == header
    assert records == [played_record.record]


def test_replay_reproduces_outcome(small_board, played_record):
    assert replay_record(played_record.record, small_board) == played_record.outcome


def test_tampered_move_diverges(small_board, played_record):
    from dataclasses import replace

    record = played_record.record
    moves = list(record.moves)
    moves[len(moves) // 2] = "a3-a4"
    with pytest.raises(ReplayDivergenceError):
        replay_record(replace(record, moves=tuple(moves)), small_board)


def test_tampered_outcome_diverges(small_board, played_record):
    from dataclasses import replace

    from baserace.game import GameOutcome

    record = played_record.record
    flipped = GameOutcome(
        record.outcome.winner.opponent if record.outcome.winner else Color.WHITE,
        record.outcome.reason,
        record.outcome.final_move_count,
    )
    with pytest.raises(ReplayDivergenceError):
        replay_record(replace(record, outcome=flipped), small_board)


def test_tampered_captures_diverge(small_board, played_record):
    from dataclasses import replace

    record = played_record.record
    captures = list(record.captures)
    captures[0] = (captures[0][0] + 1, captures[0][1])
    with pytest.raises(ReplayDivergenceError):
        replay_record(replace(record, captures=tuple(captures)), small_board)


def test_record_json_round_trip(played_record):
    doc = played_record.record.to_json()
    assert GameRecord.from_json(json.loads(json.dumps(doc))) == played_record.record
