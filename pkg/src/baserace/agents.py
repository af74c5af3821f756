"""Move-selection policies.

- ``LearnerAgent``: picks the best-valued afterstate with probability
  ``epsilon_greedy`` and a uniformly random legal move otherwise.
- ``ScriptedPolicyOne`` / ``ScriptedPolicyTwo``: deterministic white-player
  trainers that walk fixed routes toward the black base (policy two runs
  ten route variants per stage and may release a second pawn when blocked).
- ``StdinHuman``: interactive white player over a terminal.

Every agent returns a move that is legal for the given state; scripted
policies fall back through forward / lateral / any-legal alternatives when
their scripted square is taken.
"""

from __future__ import annotations

import sys
from typing import TextIO

import numpy as np

from .game import (
    Cell,
    Color,
    GameState,
    Move,
    MoveKind,
    apply_move,
    base_distance,
    format_move,
    legal_moves,
    parse_move,
    render_ascii,
    validate_move,
)
from .net import ValueNetwork, encode_afterstate, forward_many


class ChannelClosedError(Exception):
    """The interactive input channel went away mid-game."""


class NoLegalMoveError(Exception):
    pass


class LearnerAgent:
    """Afterstate-greedy selector over a value network.

    Terminal afterstates are valued at their known outcome (1 for an own
    win, 0 for an own loss) rather than through the network: final
    positions have known values from the start, everything else is
    approximated. Ties on the greedy branch break uniformly at random.
    """

    kind = "Learner"

    def __init__(self, net: ValueNetwork, epsilon_greedy: float = 0.9, learning: bool = False):
        if not 0.0 <= epsilon_greedy <= 1.0:
            raise ValueError(f"epsilon_greedy must be in [0,1], got {epsilon_greedy}")
        self.net = net
        self.epsilon_greedy = epsilon_greedy
        self.learning = learning

    def select_move(self, state: GameState, rng: np.random.Generator) -> Move:
        moves = legal_moves(state)
        if rng.random() >= self.epsilon_greedy:
            return moves[int(rng.integers(len(moves)))]
        owner = self.net.owner
        values = np.empty(len(moves))
        pending_rows = []
        pending_idx = []
        for i, move in enumerate(moves):
            outcome = apply_move(state, move)
            if outcome.terminal is not None:
                values[i] = 1.0 if outcome.terminal.winner is owner else 0.0
            else:
                pending_rows.append(encode_afterstate(outcome.next_state, owner))
                pending_idx.append(i)
        if pending_idx:
            values[pending_idx] = forward_many(self.net, np.asarray(pending_rows))
        ties = np.flatnonzero(values == values.max())
        return moves[int(ties[int(rng.integers(len(ties)))])]


def _require_white(state: GameState, who: str) -> None:
    if state.side_to_move is not Color.WHITE:
        raise NoLegalMoveError(f"{who} plays the white side only")


def _own_cells(state: GameState, color: Color) -> list[Cell]:
    return sorted(cell for cell, c in state.occupancy.items() if c is color)


def _classify_step(state: GameState, cell: Cell, to: Cell) -> str | None:
    """'forward' / 'lateral' for a legal step of the white pawn at ``cell``."""
    move = Move(MoveKind.STEP, to, cell)
    if validate_move(state, move) is not None:
        return None
    before = base_distance(cell, Color.WHITE, state.config)
    after = base_distance(to, Color.WHITE, state.config)
    return "forward" if after > before else "lateral"


# Direction deltas in fallback preference order: north, east, west, south.
_N, _E, _W, _S = (0, 1), (1, 0), (-1, 0), (0, -1)
_FALLBACK_ORDER = (_N, _E, _W, _S)


def _step_with_fallback(state: GameState, cell: Cell, preferred: tuple[int, int]) -> Move | None:
    """Scripted step at ``cell``: preferred target, else another forward step,
    else a lateral step; None when the pawn cannot step at all."""
    x, y = cell
    classes = {}
    for d in _FALLBACK_ORDER:
        to = (x + d[0], y + d[1])
        cls = _classify_step(state, cell, to)
        if cls is not None:
            classes[d] = (cls, to)
    if preferred in classes:
        return Move(MoveKind.STEP, classes[preferred][1], cell)
    for d in (_N, _E):
        if d != preferred and d in classes and classes[d][0] == "forward":
            return Move(MoveKind.STEP, classes[d][1], cell)
    for d in _FALLBACK_ORDER:
        if d in classes and classes[d][0] == "lateral":
            return Move(MoveKind.STEP, classes[d][1], cell)
    return None


def _goal_distance(state: GameState, cell: Cell) -> int:
    return base_distance(cell, Color.BLACK, state.config)


def _any_legal(state: GameState) -> Move:
    moves = legal_moves(state)
    if not moves:
        raise NoLegalMoveError("white has no legal move")
    return moves[0]


def _free_exits(state: GameState) -> list[Cell]:
    from .game import base_adjacent_cells

    return [c for c in base_adjacent_cells(state.config, Color.WHITE) if c not in state.occupancy]


class ScriptedPolicyOne:
    """White trainer: straight north on the leftmost file, then east into the
    black base through its west edge."""

    kind = "ScriptedPolicy1"
    learning = False

    def select_move(self, state: GameState, rng: np.random.Generator) -> Move:
        _require_white(state, "policy 1")
        config = state.config
        pawns = _own_cells(state, Color.WHITE)
        if not pawns:
            target = (0, config.a)
            if state.white_reserve > 0 and target not in state.occupancy:
                return Move(MoveKind.BASE_EXIT, target)
            exits = _free_exits(state)
            if state.white_reserve > 0 and exits:
                return Move(MoveKind.BASE_EXIT, exits[0])
            return _any_legal(state)
        pawn = min(pawns, key=lambda c: (_goal_distance(state, c), c))
        preferred = _N if pawn[1] < config.n - config.a else _E
        move = _step_with_fallback(state, pawn, preferred)
        if move is not None:
            return move
        return _any_legal(state)


class ScriptedPolicyTwo:
    """White trainer with ten route variants per stage.

    Routes 0-7 head north along spread-out target files (jointly touching
    every file of the board) and enter the black base from its west edge;
    a second pawn is released only after the lead pawn has had no forward
    or lateral step for three consecutive turns. Routes 8-9 bring two pawns
    out immediately and walk the central band of the board at random with a
    forward bias.

    ``target_file`` overrides the generated route column, so custom route
    sets can be supplied instead of the built-in spread.
    """

    kind = "ScriptedPolicy2"
    learning = False
    STALL_LIMIT = 3

    def __init__(self, route_index: int, target_file: int | None = None):
        if not 0 <= route_index <= 9:
            raise ValueError(f"route index must be 0..9, got {route_index}")
        self.route_index = route_index
        self.target_file = target_file
        self._stall = 0

    def _target_file(self, config) -> int:
        if self.target_file is not None:
            return max(0, min(config.n - 1, self.target_file))
        return round(self.route_index * (config.n - 1) / 7)

    def _exit_move(self, state: GameState, near_file: int) -> Move | None:
        if state.white_reserve == 0:
            return None
        exits = _free_exits(state)
        if not exits:
            return None
        exits.sort(key=lambda c: (abs(c[0] - near_file), -c[1], c[0]))
        return Move(MoveKind.BASE_EXIT, exits[0])

    def _central_select(self, state: GameState, rng: np.random.Generator) -> Move:
        config = state.config
        pawns = _own_cells(state, Color.WHITE)
        if len(pawns) < 2:
            center = (config.n - 1) / 2
            exit_move = self._exit_move(state, round(center))
            if exit_move is not None:
                return exit_move
        if not pawns:
            return _any_legal(state)
        lo, hi = config.n // 4, (3 * config.n) // 4

        def in_band(cell: Cell) -> bool:
            return lo <= cell[0] < hi and lo <= cell[1] < hi

        order = list(rng.permutation(len(pawns)))
        for i in order:
            pawn = pawns[i]
            x, y = pawn
            classified: dict[str, list[Cell]] = {"fb": [], "lb": [], "f": [], "l": []}
            for d in _FALLBACK_ORDER:
                to = (x + d[0], y + d[1])
                cls = _classify_step(state, pawn, to)
                if cls is None:
                    continue
                key = ("f" if cls == "forward" else "l") + ("b" if in_band(to) else "")
                classified[key].append(to)
            for key in ("fb", "lb", "f", "l"):
                targets = classified[key]
                if targets:
                    to = targets[int(rng.integers(len(targets)))]
                    return Move(MoveKind.STEP, to, pawn)
        return _any_legal(state)

    def select_move(self, state: GameState, rng: np.random.Generator) -> Move:
        _require_white(state, "policy 2")
        config = state.config
        if self.route_index >= 8:
            return self._central_select(state, rng)
        pawns = _own_cells(state, Color.WHITE)
        target_file = self._target_file(config)
        if not pawns:
            exit_move = self._exit_move(state, target_file)
            return exit_move if exit_move is not None else _any_legal(state)
        lead = min(pawns, key=lambda c: (_goal_distance(state, c), c))
        lead_mobile = any(
            _classify_step(state, lead, (lead[0] + d[0], lead[1] + d[1])) is not None
            for d in _FALLBACK_ORDER
        )
        self._stall = 0 if lead_mobile else self._stall + 1
        if self._stall >= self.STALL_LIMIT and len(pawns) == 1:
            exit_move = self._exit_move(state, target_file)
            if exit_move is not None:
                self._stall = 0
                return exit_move
        active = min(
            pawns,
            key=lambda c: (
                0 if any(
                    _classify_step(state, c, (c[0] + d[0], c[1] + d[1])) is not None
                    for d in _FALLBACK_ORDER
                ) else 1,
                _goal_distance(state, c),
                c,
            ),
        )
        x, y = active
        if x < target_file:
            preferred = _E
        elif y < config.n - config.a:
            preferred = _N
        else:
            preferred = _E
        move = _step_with_fallback(state, active, preferred)
        if move is not None:
            return move
        return _any_legal(state)


class StdinHuman:
    """Interactive white player reading moves from a terminal.

    Illegal submissions are rejected with the violated rule name and
    re-prompted; the agent never substitutes a move for the human.
    """

    kind = "InteractiveStdin"
    learning = False

    def __init__(self, in_stream: TextIO | None = None, out_stream: TextIO | None = None):
        self._in = in_stream if in_stream is not None else sys.stdin
        self._out = out_stream if out_stream is not None else sys.stdout

    def _emit(self, text: str) -> None:
        self._out.write(text + "\n")
        self._out.flush()

    def select_move(self, state: GameState, rng: np.random.Generator) -> Move:
        _require_white(state, "the human")
        self._emit(render_ascii(state))
        while True:
            self._emit("your move (e.g. c3-c4, out-b3): ")
            line = self._in.readline()
            if line == "":
                raise ChannelClosedError("stdin closed")
            line = line.strip()
            if not line:
                continue
            try:
                move = parse_move(line)
            except ValueError as exc:
                self._emit(f"rejected: {exc}")
                continue
            rule = validate_move(state, move)
            if rule is not None:
                self._emit(f"rejected ({rule}): {format_move(move)} violates the {rule} rule")
                continue
            return move
