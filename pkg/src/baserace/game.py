"""Rules engine for the two-base race game.

The game is played on an n-by-n board by two players. Two a-by-a bases sit
on opposite corners: white's at the lower-left, black's at the upper-right.
Each player starts with ``beta`` pawns inside its base; pawns inside a base
are an anonymous reserve (the base acts as one big square).

Rules:

- A reserve pawn may exit to any free square at Chebyshev distance 1 from
  its base region (2a+1 squares for a corner base).
- A pawn on the board steps to an empty, orthogonally adjacent square,
  provided its Chebyshev distance from its own base does not decrease:
  backward moves are forbidden, sideways moves are fine.
- Moving a pawn onto any square of the opponent base wins immediately.
- After every non-winning move, pawns of BOTH sides that are left without
  a single legal step are removed simultaneously (several pawns can be
  lost in one round); afterwards, a base whose every adjacent square is
  occupied loses its entire reserve. A player with no pawns left loses.
- Games may be truncated at a ply cap and scored as draws; the cap is
  enforced by the game loop, not by this module.

All types are immutable values; ``apply_move`` returns a fresh state.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache


class GameError(Exception):
    """Base class for rule violations and invalid game inputs."""


class InvalidConfigError(GameError):
    pass


class TerminalStateError(GameError):
    """Raised when moves are requested in a finished position."""


class IllegalMoveError(GameError):
    """A move failed validation. ``rule`` names the violated rule."""

    def __init__(self, rule: str, message: str):
        super().__init__(message)
        self.rule = rule


class Color(str, Enum):
    WHITE = "White"
    BLACK = "Black"

    @property
    def opponent(self) -> "Color":
        return Color.BLACK if self is Color.WHITE else Color.WHITE


class MoveKind(str, Enum):
    BASE_EXIT = "BaseExit"
    STEP = "Step"


class OutcomeReason(str, Enum):
    ENTERED_BASE = "EnteredBase"
    OPPONENT_OUT_OF_PAWNS = "OpponentOutOfPawns"
    MOVE_CAP_REACHED = "MoveCapReached"


Cell = tuple[int, int]

# Step directions: north, east, south, west.
ORTHOGONAL: tuple[Cell, ...] = ((0, 1), (1, 0), (0, -1), (-1, 0))


@dataclass(frozen=True)
class BoardConfig:
    """Board geometry and starting material.

    ``n``: board side length, ``a``: base side length, ``beta``: pawns per
    player at kick-off. Bases must not meet across the board (2a < n).
    """

    n: int
    a: int
    beta: int

    def validate(self) -> None:
        if not isinstance(self.n, int) or self.n < 4:
            raise InvalidConfigError(f"board side must be an integer >= 4, got {self.n!r}")
        if not isinstance(self.a, int) or self.a < 1:
            raise InvalidConfigError(f"base side must be an integer >= 1, got {self.a!r}")
        if 2 * self.a >= self.n:
            raise InvalidConfigError(
                f"bases must sit apart on opposite corners: need 2a < n, got a={self.a}, n={self.n}"
            )
        if not isinstance(self.beta, int) or self.beta < 1:
            raise InvalidConfigError(f"pawn count must be an integer >= 1, got {self.beta!r}")
        if self.beta > self.n * self.n - 2 * self.a * self.a:
            raise InvalidConfigError(
                f"pawn count {self.beta} exceeds the {self.n * self.n - 2 * self.a * self.a} playable squares"
            )


@dataclass(frozen=True)
class GameOutcome:
    winner: Color | None  # None means draw
    reason: OutcomeReason
    final_move_count: int

    @property
    def winner_name(self) -> str:
        return self.winner.value if self.winner is not None else "Draw"

    def to_json(self) -> dict:
        return {
            "winner": self.winner_name,
            "reason": self.reason.value,
            "finalMoveCount": self.final_move_count,
        }

    @classmethod
    def from_json(cls, data: dict) -> "GameOutcome":
        winner = None if data["winner"] == "Draw" else Color(data["winner"])
        return cls(winner, OutcomeReason(data["reason"]), int(data["finalMoveCount"]))


@dataclass(frozen=True)
class Move:
    kind: MoveKind
    to_cell: Cell
    from_cell: Cell | None = None

    def sort_key(self) -> tuple:
        origin = self.from_cell if self.from_cell is not None else (-1, -1)
        return (0 if self.kind is MoveKind.BASE_EXIT else 1, origin, self.to_cell)


@dataclass(frozen=True)
class GameState:
    config: BoardConfig
    occupancy: dict[Cell, Color]  # non-base cells only (terminal win states keep the entering pawn)
    white_reserve: int
    black_reserve: int
    side_to_move: Color
    move_count: int

    def reserve(self, color: Color) -> int:
        return self.white_reserve if color is Color.WHITE else self.black_reserve

    def pawns_on_board(self, color: Color) -> int:
        return sum(1 for c in self.occupancy.values() if c is color)

    def total_pawns(self, color: Color) -> int:
        return self.reserve(color) + self.pawns_on_board(color)


@dataclass(frozen=True)
class MoveOutcome:
    next_state: GameState
    white_lost: int
    black_lost: int
    terminal: GameOutcome | None


def in_base(cell: Cell, color: Color, config: BoardConfig) -> bool:
    x, y = cell
    if color is Color.WHITE:
        return x < config.a and y < config.a
    return x >= config.n - config.a and y >= config.n - config.a


def in_bounds(cell: Cell, config: BoardConfig) -> bool:
    x, y = cell
    return 0 <= x < config.n and 0 <= y < config.n


def base_distance(cell: Cell, color: Color, config: BoardConfig) -> int:
    """Chebyshev distance from ``cell`` to the nearest square of ``color``'s base.

    Zero iff the cell lies inside that base.
    """
    x, y = cell
    a, n = config.a, config.n
    if color is Color.WHITE:
        dx = x - (a - 1) if x >= a else 0
        dy = y - (a - 1) if y >= a else 0
    else:
        dx = (n - a) - x if x < n - a else 0
        dy = (n - a) - y if y < n - a else 0
    return dx if dx >= dy else dy


@lru_cache(maxsize=None)
def base_cells(config: BoardConfig, color: Color) -> tuple[Cell, ...]:
    if color is Color.WHITE:
        return tuple((x, y) for x in range(config.a) for y in range(config.a))
    return tuple(
        (x, y) for x in range(config.n - config.a, config.n) for y in range(config.n - config.a, config.n)
    )


@lru_cache(maxsize=None)
def base_adjacent_cells(config: BoardConfig, color: Color) -> tuple[Cell, ...]:
    """Squares at Chebyshev distance 1 from the base region (the exit ring)."""
    n, a = config.n, config.a
    if color is Color.WHITE:
        ring = [(a, y) for y in range(a + 1)] + [(x, a) for x in range(a)]
    else:
        ring = [(n - 1 - a, y) for y in range(n - 1 - a, n)] + [(x, n - 1 - a) for x in range(n - a, n)]
    return tuple(sorted(ring))


def initial_state(config: BoardConfig) -> GameState:
    config.validate()
    return GameState(
        config=config,
        occupancy={},
        white_reserve=config.beta,
        black_reserve=config.beta,
        side_to_move=Color.WHITE,
        move_count=0,
    )


def state_outcome(state: GameState) -> GameOutcome | None:
    """Terminal verdict for a position, or None while the game is live.

    Move-cap draws are decided by the game loop and never show up here.
    """
    for cell, color in state.occupancy.items():
        if in_base(cell, color.opponent, state.config):
            return GameOutcome(color, OutcomeReason.ENTERED_BASE, state.move_count)
    white_total = state.total_pawns(Color.WHITE)
    black_total = state.total_pawns(Color.BLACK)
    if white_total == 0 and black_total == 0:
        # Mutual annihilation in one trap round: the player who moved wins.
        return GameOutcome(state.side_to_move.opponent, OutcomeReason.OPPONENT_OUT_OF_PAWNS, state.move_count)
    if white_total == 0:
        return GameOutcome(Color.BLACK, OutcomeReason.OPPONENT_OUT_OF_PAWNS, state.move_count)
    if black_total == 0:
        return GameOutcome(Color.WHITE, OutcomeReason.OPPONENT_OUT_OF_PAWNS, state.move_count)
    return None


def _has_step(occupancy: dict[Cell, Color], cell: Cell, color: Color, config: BoardConfig) -> bool:
    x, y = cell
    dist = base_distance(cell, color, config)
    n = config.n
    for dx, dy in ORTHOGONAL:
        to = (x + dx, y + dy)
        if not (0 <= to[0] < n and 0 <= to[1] < n):
            continue
        if to in occupancy:
            continue
        if base_distance(to, color, config) >= dist:
            return True
    return False


def legal_moves(state: GameState) -> list[Move]:
    """All legal moves for the side to move, in deterministic sorted order."""
    if state_outcome(state) is not None:
        raise TerminalStateError("no legal moves in a terminal position")
    config = state.config
    mover = state.side_to_move
    occupancy = state.occupancy
    moves: list[Move] = []
    if state.reserve(mover) > 0:
        for cell in base_adjacent_cells(config, mover):
            if cell not in occupancy:
                moves.append(Move(MoveKind.BASE_EXIT, cell))
    n = config.n
    for cell, color in occupancy.items():
        if color is not mover:
            continue
        dist = base_distance(cell, mover, config)
        x, y = cell
        for dx, dy in ORTHOGONAL:
            to = (x + dx, y + dy)
            if not (0 <= to[0] < n and 0 <= to[1] < n):
                continue
            if to in occupancy:
                continue
            if base_distance(to, mover, config) < dist:
                continue
            moves.append(Move(MoveKind.STEP, to, cell))
    moves.sort(key=Move.sort_key)
    return moves


def validate_move(state: GameState, move: Move) -> str | None:
    """Return the name of the violated rule, or None when the move is legal."""
    if state_outcome(state) is not None:
        return "terminal"
    config = state.config
    mover = state.side_to_move
    if not in_bounds(move.to_cell, config):
        return "out-of-bounds"
    if move.kind is MoveKind.BASE_EXIT:
        if state.reserve(mover) == 0:
            return "reserve-empty"
        if move.to_cell not in base_adjacent_cells(config, mover):
            return "not-base-adjacent"
        if move.to_cell in state.occupancy:
            return "occupied"
        return None
    if move.from_cell is None or not in_bounds(move.from_cell, config):
        return "out-of-bounds"
    occupant = state.occupancy.get(move.from_cell)
    if occupant is None:
        return "no-pawn"
    if occupant is not mover:
        return "wrong-color"
    fx, fy = move.from_cell
    tx, ty = move.to_cell
    if abs(fx - tx) + abs(fy - ty) != 1:
        return "not-adjacent"
    if move.to_cell in state.occupancy:
        return "occupied"
    if base_distance(move.to_cell, mover, config) < base_distance(move.from_cell, mover, config):
        return "distance"
    return None


def apply_move(state: GameState, move: Move) -> MoveOutcome:
    """Apply a legal move, run trap resolution, and report losses and terminality.

    Trap resolution removes the immobile pawns of both players in one
    simultaneous step computed against the post-move board (removals are
    not re-checked), then a base with no free adjacent square loses its
    whole reserve, checked against the post-removal board.
    """
    rule = validate_move(state, move)
    if rule is not None:
        raise IllegalMoveError(rule, f"illegal move {format_move(move)}: {rule}")
    config = state.config
    mover = state.side_to_move
    occupancy = dict(state.occupancy)
    white_reserve = state.white_reserve
    black_reserve = state.black_reserve
    if move.kind is MoveKind.BASE_EXIT:
        if mover is Color.WHITE:
            white_reserve -= 1
        else:
            black_reserve -= 1
    else:
        del occupancy[move.from_cell]
    occupancy[move.to_cell] = mover

    if in_base(move.to_cell, mover.opponent, config):
        # Entering the opponent base ends the game on the spot; no trap round.
        next_state = GameState(config, occupancy, white_reserve, black_reserve,
                               mover.opponent, state.move_count + 1)
        return MoveOutcome(next_state, 0, 0,
                           GameOutcome(mover, OutcomeReason.ENTERED_BASE, next_state.move_count))

    trapped = [cell for cell, color in occupancy.items()
               if not _has_step(occupancy, cell, color, config)]
    white_lost = 0
    black_lost = 0
    for cell in trapped:
        if occupancy.pop(cell) is Color.WHITE:
            white_lost += 1
        else:
            black_lost += 1
    if white_reserve > 0 and all(c in occupancy for c in base_adjacent_cells(config, Color.WHITE)):
        white_lost += white_reserve
        white_reserve = 0
    if black_reserve > 0 and all(c in occupancy for c in base_adjacent_cells(config, Color.BLACK)):
        black_lost += black_reserve
        black_reserve = 0

    next_state = GameState(config, occupancy, white_reserve, black_reserve,
                           mover.opponent, state.move_count + 1)
    terminal = None
    white_total = next_state.total_pawns(Color.WHITE)
    black_total = next_state.total_pawns(Color.BLACK)
    if white_total == 0 or black_total == 0:
        if white_total == 0 and black_total == 0:
            winner = mover
        else:
            winner = Color.BLACK if white_total == 0 else Color.WHITE
        terminal = GameOutcome(winner, OutcomeReason.OPPONENT_OUT_OF_PAWNS, next_state.move_count)
    return MoveOutcome(next_state, white_lost, black_lost, terminal)


# --- move notation -----------------------------------------------------------
#
# Steps read "<from>-<to>" (e.g. "c3-c4"); base exits read "out-<cell>".
# Files are spreadsheet letters (a..z, aa..), ranks are 1-based numbers.

_CELL_RE = re.compile(r"^([a-z]+)([1-9][0-9]*)$")


def _file_letters(x: int) -> str:
    out = ""
    x += 1
    while x > 0:
        x, r = divmod(x - 1, 26)
        out = chr(ord("a") + r) + out
    return out


def cell_name(cell: Cell) -> str:
    return f"{_file_letters(cell[0])}{cell[1] + 1}"


def parse_cell(text: str) -> Cell:
    m = _CELL_RE.match(text)
    if m is None:
        raise ValueError(f"malformed cell {text!r}")
    x = 0
    for ch in m.group(1):
        x = x * 26 + (ord(ch) - ord("a") + 1)
    return (x - 1, int(m.group(2)) - 1)


def format_move(move: Move) -> str:
    if move.kind is MoveKind.BASE_EXIT:
        return f"out-{cell_name(move.to_cell)}"
    return f"{cell_name(move.from_cell)}-{cell_name(move.to_cell)}"


def parse_move(text: str) -> Move:
    text = text.strip()
    if text.startswith("out-"):
        return Move(MoveKind.BASE_EXIT, parse_cell(text[4:]))
    parts = text.split("-")
    if len(parts) != 2:
        raise ValueError(f"malformed move {text!r}: expected 'c3-c4' or 'out-b3'")
    return Move(MoveKind.STEP, parse_cell(parts[1]), parse_cell(parts[0]))


def render_ascii(state: GameState) -> str:
    """Plain-text board for terminal play: W/B pawns, shaded base squares."""
    config = state.config
    n = config.n
    lines = []
    for y in range(n - 1, -1, -1):
        row = []
        for x in range(n):
            cell = (x, y)
            pawn = state.occupancy.get(cell)
            if pawn is not None:
                row.append("W" if pawn is Color.WHITE else "B")
            elif in_base(cell, Color.WHITE, config):
                row.append("w")
            elif in_base(cell, Color.BLACK, config):
                row.append("b")
            else:
                row.append(".")
        lines.append(f"{y + 1:>3} " + " ".join(row))
    lines.append("    " + " ".join(_file_letters(x) for x in range(n)))
    lines.append(
        f"reserves: white {state.white_reserve}, black {state.black_reserve}"
        f" | to move: {state.side_to_move.value} | ply {state.move_count}"
    )
    return "\n".join(lines)
