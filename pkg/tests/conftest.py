import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from baserace.game import BoardConfig, apply_move, initial_state, legal_moves, state_outcome


@pytest.fixture
def small_board() -> BoardConfig:
    return BoardConfig(6, 1, 3)


@pytest.fixture
def default_board() -> BoardConfig:
    return BoardConfig(8, 2, 10)


def random_playout(config: BoardConfig, seed: int, max_plies: int = 400):
    """Play uniformly random legal moves; yields (state, move, outcome) steps."""
    rng = np.random.default_rng(seed)
    state = initial_state(config)
    steps = []
    while state.move_count < max_plies and state_outcome(state) is None:
        moves = legal_moves(state)
        move = moves[int(rng.integers(len(moves)))]
        outcome = apply_move(state, move)
        steps.append((state, move, outcome))
        state = outcome.next_state
        if outcome.terminal is not None:
            break
    return steps
