"""Game records: JSON-lines persistence and deterministic replay.

A log file holds one JSON document per line. The first line is a header
carrying the board configuration and move cap; every following line is one
game. Replaying a record's move list through the rules engine must
reproduce its captures, outcome, and move count exactly; any difference is
a first-class failure (engine drift or log corruption).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from typing import IO, Iterator

from .game import (
    BoardConfig,
    GameOutcome,
    IllegalMoveError,
    OutcomeReason,
    apply_move,
    initial_state,
    parse_move,
)

LOG_VERSION = 1


class RecordError(Exception):
    pass


class ReplayDivergenceError(RecordError):
    """Replaying a record did not reproduce what the record claims."""


@dataclass(frozen=True)
class GameRecord:
    game_id: str
    batch_id: str
    stage_index: int
    game_kind: str  # "CC" or "HC"
    seed: int
    moves: tuple[str, ...]
    captures: tuple[tuple[int, int], ...]  # (white lost, black lost) per move
    outcome: GameOutcome | None
    move_count: int
    aborted: bool = False

    def to_json(self) -> dict:
        return {
            "v": LOG_VERSION,
            "kind": "game",
            "gameId": self.game_id,
            "batchId": self.batch_id,
            "stageIndex": self.stage_index,
            "gameKind": self.game_kind,
            "seed": self.seed,
            "moves": list(self.moves),
            "captures": [list(c) for c in self.captures],
            "outcome": self.outcome.to_json() if self.outcome is not None else None,
            "moveCount": self.move_count,
            "aborted": self.aborted,
        }

    @classmethod
    def from_json(cls, data: dict) -> "GameRecord":
        if data.get("v") != LOG_VERSION or data.get("kind") != "game":
            raise RecordError(f"unsupported game record: {data.get('v')!r}/{data.get('kind')!r}")
        outcome = data.get("outcome")
        return cls(
            game_id=data["gameId"],
            batch_id=data["batchId"],
            stage_index=int(data["stageIndex"]),
            game_kind=data["gameKind"],
            seed=int(data["seed"]),
            moves=tuple(data["moves"]),
            captures=tuple((int(a), int(b)) for a, b in data["captures"]),
            outcome=GameOutcome.from_json(outcome) if outcome is not None else None,
            move_count=int(data["moveCount"]),
            aborted=bool(data.get("aborted", False)),
        )


@dataclass(frozen=True)
class LogHeader:
    batch_id: str
    board: BoardConfig
    move_cap: int

    def to_json(self) -> dict:
        return {
            "v": LOG_VERSION,
            "kind": "header",
            "batchId": self.batch_id,
            "board": {"n": self.board.n, "a": self.board.a, "beta": self.board.beta},
            "moveCap": self.move_cap,
        }

    @classmethod
    def from_json(cls, data: dict) -> "LogHeader":
        if data.get("v") != LOG_VERSION or data.get("kind") != "header":
            raise RecordError("missing or unsupported log header")
        b = data["board"]
        return cls(data["batchId"], BoardConfig(int(b["n"]), int(b["a"]), int(b["beta"])),
                   int(data["moveCap"]))


def _dump_line(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def write_header(fp: IO[str], header: LogHeader) -> None:
    fp.write(_dump_line(header.to_json()))


def append_record(fp: IO[str], record: GameRecord) -> None:
    fp.write(_dump_line(record.to_json()))


def read_log(path: str | os.PathLike) -> tuple[LogHeader, list[GameRecord]]:
    with open(path, "r", encoding="utf-8") as fp:
        lines = [line for line in fp if line.strip()]
    if not lines:
        raise RecordError(f"{path}: empty log")
    header = LogHeader.from_json(json.loads(lines[0]))
    records = [GameRecord.from_json(json.loads(line)) for line in lines[1:]]
    return header, records


def iter_log(path: str | os.PathLike) -> Iterator[GameRecord]:
    header, records = read_log(path)
    return iter(records)


def replay_record(record: GameRecord, board: BoardConfig) -> GameOutcome | None:
    """Re-execute a record through the rules engine and verify it.

    Returns the replayed outcome (None for aborted records, whose move
    prefix is still checked for legality and capture consistency).
    Raises ReplayDivergenceError on any mismatch.
    """
    if len(record.moves) != len(record.captures):
        raise ReplayDivergenceError(f"{record.game_id}: {len(record.moves)} moves "
                                    f"but {len(record.captures)} capture entries")
    state = initial_state(board)
    terminal: GameOutcome | None = None
    for i, move_text in enumerate(record.moves):
        if terminal is not None:
            raise ReplayDivergenceError(f"{record.game_id}: move {i} played after the game ended")
        try:
            move = parse_move(move_text)
        except ValueError as exc:
            raise ReplayDivergenceError(f"{record.game_id}: move {i}: {exc}") from None
        try:
            result = apply_move(state, move)
        except IllegalMoveError as exc:
            raise ReplayDivergenceError(
                f"{record.game_id}: move {i} ({move_text}) illegal on replay: {exc.rule}"
            ) from None
        if (result.white_lost, result.black_lost) != record.captures[i]:
            raise ReplayDivergenceError(
                f"{record.game_id}: move {i} captures {(result.white_lost, result.black_lost)} "
                f"!= recorded {record.captures[i]}"
            )
        state = result.next_state
        terminal = result.terminal
    if record.aborted:
        return None
    if record.outcome is None:
        raise ReplayDivergenceError(f"{record.game_id}: completed record without an outcome")
    if terminal is None:
        # Truncated game: the record must claim a move-cap draw of exactly
        # this length.
        if record.outcome.reason is not OutcomeReason.MOVE_CAP_REACHED:
            raise ReplayDivergenceError(
                f"{record.game_id}: moves end without a terminal position but the "
                f"recorded reason is {record.outcome.reason.value}"
            )
        terminal = GameOutcome(None, OutcomeReason.MOVE_CAP_REACHED, state.move_count)
    if terminal != record.outcome:
        raise ReplayDivergenceError(
            f"{record.game_id}: replayed outcome {terminal} != recorded {record.outcome}"
        )
    if state.move_count != record.move_count:
        raise ReplayDivergenceError(
            f"{record.game_id}: replayed {state.move_count} plies, record claims {record.move_count}"
        )
    return terminal


def with_identity(record: GameRecord, game_id: str) -> GameRecord:
    return replace(record, game_id=game_id)
