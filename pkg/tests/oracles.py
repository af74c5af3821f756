"""Independent brute-force oracles used to cross-check the engine.

Everything here is derived straight from the rule text and deliberately
avoids the engine's own helpers: distances are minimized over explicit
base-cell enumerations, candidate moves are scanned over the whole board.
"""

from __future__ import annotations

from baserace.game import (
    BoardConfig,
    Cell,
    Color,
    GameState,
    Move,
    MoveKind,
)

_DIRS = ((0, 1), (1, 0), (0, -1), (-1, 0))


def oracle_base_cells(config: BoardConfig, color: Color) -> list[Cell]:
    n, a = config.n, config.a
    if color is Color.WHITE:
        return [(x, y) for x in range(a) for y in range(a)]
    return [(x, y) for x in range(n - a, n) for y in range(n - a, n)]


def oracle_distance(cell: Cell, color: Color, config: BoardConfig) -> int:
    # "maximum of the horizontal and the vertical distance", minimized over
    # the base squares.
    return min(
        max(abs(cell[0] - bx), abs(cell[1] - by))
        for bx, by in oracle_base_cells(config, color)
    )


def oracle_in_base(cell: Cell, color: Color, config: BoardConfig) -> bool:
    return cell in oracle_base_cells(config, color)


def oracle_legal_moves(state: GameState) -> list[Move]:
    """Every move the rules allow, found by exhaustive scan."""
    config = state.config
    mover = state.side_to_move
    n = config.n
    moves: list[Move] = []
    # Reserve pawns step one square out of the base: any free square at
    # distance 1 from the base region.
    if state.reserve(mover) > 0:
        for x in range(n):
            for y in range(n):
                cell = (x, y)
                if cell in state.occupancy:
                    continue
                if oracle_distance(cell, mover, config) == 1:
                    moves.append(Move(MoveKind.BASE_EXIT, cell))
    # Board pawns step to an empty, orthogonally adjacent square without
    # decreasing their distance from their own base; they may not re-enter
    # their own base but may enter the opponent's.
    for cell, color in state.occupancy.items():
        if color is not mover:
            continue
        for dx, dy in _DIRS:
            to = (cell[0] + dx, cell[1] + dy)
            if not (0 <= to[0] < n and 0 <= to[1] < n):
                continue
            if to in state.occupancy:
                continue
            if oracle_in_base(to, mover, config):
                continue
            if oracle_distance(to, mover, config) < oracle_distance(cell, mover, config):
                continue
            moves.append(Move(MoveKind.STEP, to, cell))
    moves.sort(key=Move.sort_key)
    return moves


def oracle_trapped(occupancy: dict[Cell, Color], cell: Cell, config: BoardConfig) -> bool:
    """A pawn is trapped iff it has no legal step on this board."""
    color = occupancy[cell]
    n = config.n
    for dx, dy in _DIRS:
        to = (cell[0] + dx, cell[1] + dy)
        if not (0 <= to[0] < n and 0 <= to[1] < n):
            continue
        if to in occupancy:
            continue
        if oracle_in_base(to, color, config):
            continue
        if oracle_distance(to, color, config) < oracle_distance(cell, color, config):
            continue
        return False
    return True
