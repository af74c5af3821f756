"""Pairwise batch comparisons: two color-swapped rounds of frozen games.

A comparison between batches X and Y plays one round with X's white model
against Y's black model and a second round with the colors' owners
swapped. Games use frozen networks with the usual epsilon-greedy move
choice (a fully greedy pair would repeat one game a thousand times); the
two rounds share per-game seeds, so comparing a batch against itself
yields two identical rounds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .agents import LearnerAgent
from .game import BoardConfig, Color
from .net import load_checkpoint
from .seeds import child_seed
from .training import DEFAULT_MOVE_CAP, play_evaluation_game


class MissingCheckpointError(Exception):
    pass


@dataclass(frozen=True)
class RoundStats:
    white_wins: int
    black_wins: int
    draws: int
    avg_moves: float  # mean plies per game over ALL games of the round
    avg_moves_white_wins: float | None
    avg_moves_black_wins: float | None

    @property
    def games(self) -> int:
        return self.white_wins + self.black_wins + self.draws

    def to_json(self) -> dict:
        return {
            "whiteWins": self.white_wins,
            "blackWins": self.black_wins,
            "draws": self.draws,
            "avgMoves": self.avg_moves,
            "avgMovesWhiteWinGames": self.avg_moves_white_wins,
            "avgMovesBlackWinGames": self.avg_moves_black_wins,
        }

    @classmethod
    def from_json(cls, data: dict) -> "RoundStats":
        return cls(
            white_wins=int(data["whiteWins"]),
            black_wins=int(data["blackWins"]),
            draws=int(data["draws"]),
            avg_moves=float(data["avgMoves"]),
            avg_moves_white_wins=data.get("avgMovesWhiteWinGames"),
            avg_moves_black_wins=data.get("avgMovesBlackWinGames"),
        )


@dataclass(frozen=True)
class ComparisonResult:
    batch_x: str
    batch_y: str
    games_per_round: int
    seed: int
    round1: RoundStats  # X's white vs Y's black
    round2: RoundStats  # Y's white vs X's black

    def to_json(self) -> dict:
        return {
            "formatVersion": 1,
            "batchX": self.batch_x,
            "batchY": self.batch_y,
            "gamesPerRound": self.games_per_round,
            "seed": self.seed,
            "round1": self.round1.to_json(),
            "round2": self.round2.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ComparisonResult":
        return cls(
            batch_x=data["batchX"],
            batch_y=data["batchY"],
            games_per_round=int(data["gamesPerRound"]),
            seed=int(data["seed"]),
            round1=RoundStats.from_json(data["round1"]),
            round2=RoundStats.from_json(data["round2"]),
        )


def load_comparison(path: str | Path) -> ComparisonResult:
    with open(path, "r", encoding="utf-8") as fp:
        return ComparisonResult.from_json(json.load(fp))


def save_comparison(result: ComparisonResult, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        json.dump(result.to_json(), fp, sort_keys=True, indent=2)
        fp.write("\n")


def _final_checkpoint(batch_dir: Path, color: Color, board: BoardConfig | None):
    name = "white.vnet.json" if color is Color.WHITE else "black.vnet.json"
    path = Path(batch_dir) / name
    if not path.exists():
        raise MissingCheckpointError(f"no final checkpoint at {path}")
    return load_checkpoint(path, expected_config=board)


def _play_round(white_net, black_net, games: int, seed: int,
                epsilon: float, move_cap: int) -> RoundStats:
    white_wins = black_wins = draws = 0
    total_moves = 0
    white_win_moves: list[int] = []
    black_win_moves: list[int] = []
    config = white_net.board_config
    for g in range(games):
        result = play_evaluation_game(
            config,
            LearnerAgent(white_net, epsilon, learning=False),
            LearnerAgent(black_net, epsilon, learning=False),
            seed=child_seed(seed, "game", g),
            move_cap=move_cap,
        )
        outcome = result.outcome
        total_moves += outcome.final_move_count
        if outcome.winner is Color.WHITE:
            white_wins += 1
            white_win_moves.append(outcome.final_move_count)
        elif outcome.winner is Color.BLACK:
            black_wins += 1
            black_win_moves.append(outcome.final_move_count)
        else:
            draws += 1
    return RoundStats(
        white_wins=white_wins,
        black_wins=black_wins,
        draws=draws,
        avg_moves=total_moves / games,
        avg_moves_white_wins=(sum(white_win_moves) / len(white_win_moves)) if white_win_moves else None,
        avg_moves_black_wins=(sum(black_win_moves) / len(black_win_moves)) if black_win_moves else None,
    )


def run_comparison(
    batch_x_dir: str | Path,
    batch_y_dir: str | Path,
    *,
    games_per_round: int = 1000,
    seed: int = 0,
    epsilon: float = 0.9,
    move_cap: int = DEFAULT_MOVE_CAP,
) -> ComparisonResult:
    """Two frozen rounds between the final checkpoints of two batch dirs."""
    batch_x_dir = Path(batch_x_dir)
    batch_y_dir = Path(batch_y_dir)
    white_x = _final_checkpoint(batch_x_dir, Color.WHITE, None)
    board = white_x.board_config
    black_y = _final_checkpoint(batch_y_dir, Color.BLACK, board)
    white_y = _final_checkpoint(batch_y_dir, Color.WHITE, board)
    black_x = _final_checkpoint(batch_x_dir, Color.BLACK, board)
    round1 = _play_round(white_x, black_y, games_per_round, seed, epsilon, move_cap)
    round2 = _play_round(white_y, black_x, games_per_round, seed, epsilon, move_cap)
    return ComparisonResult(
        batch_x=batch_x_dir.name,
        batch_y=batch_y_dir.name,
        games_per_round=games_per_round,
        seed=seed,
        round1=round1,
        round2=round2,
    )
