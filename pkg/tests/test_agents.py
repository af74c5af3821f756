"""Agent tests: epsilon-greedy selection, scripted routes, interactive input."""

import io

import numpy as np
import pytest

from baserace.game import (
    Color,
    GameState,
    Move,
    MoveKind,
    apply_move,
    format_move,
    initial_state,
    legal_moves,
)
from baserace.agents import (
    ChannelClosedError,
    LearnerAgent,
    ScriptedPolicyOne,
    ScriptedPolicyTwo,
    StdinHuman,
)
from baserace.net import init_network

from conftest import random_playout


def make_state(config, occupancy, wr, br, side=Color.WHITE, move_count=0):
    return GameState(config, dict(occupancy), wr, br, side, move_count)


class TestLearnerAgent:
    def test_always_greedy_is_deterministic(self, small_board):
        net = init_network(small_board, Color.WHITE, seed=1)
        agent = LearnerAgent(net, epsilon_greedy=1.0)
        state = initial_state(small_board)
        picks = {format_move(agent.select_move(state, np.random.default_rng(s))) for s in range(20)}
        assert len(picks) == 1  # unique maximizer at this seed, always chosen

    def test_epsilon_zero_is_uniform(self, small_board):
        net = init_network(small_board, Color.WHITE, seed=1)
        agent = LearnerAgent(net, epsilon_greedy=0.0)
        state = initial_state(small_board)
        moves = legal_moves(state)
        rng = np.random.default_rng(0)
        counts = {format_move(m): 0 for m in moves}
        draws = 10000
        for _ in range(draws):
            counts[format_move(agent.select_move(state, rng))] += 1
        expected = draws / len(moves)
        chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
        # 2 degrees of freedom at alpha=0.001 -> 13.8
        assert chi2 < 13.8

    def test_takes_immediate_win(self, small_board):
        net = init_network(small_board, Color.WHITE, seed=5)
        agent = LearnerAgent(net, epsilon_greedy=1.0)
        state = make_state(small_board, {(4, 5): Color.WHITE, (0, 3): Color.BLACK}, 0, 2)
        move = agent.select_move(state, np.random.default_rng(0))
        assert move == Move(MoveKind.STEP, (5, 5), (4, 5))

    def test_output_scaling_keeps_argmax(self, small_board):
        """Scaling the output layer by a positive constant never changes the
        greedy move set (values do change)."""
        state = initial_state(small_board)
        state = apply_move(state, legal_moves(state)[2]).next_state  # black to move
        for seed in range(10):
            net = init_network(small_board, Color.BLACK, seed=seed)
            scaled = net.copy()
            scaled.w_out *= 7.5
            for rng_seed in range(5):
                a = LearnerAgent(net, 1.0).select_move(state, np.random.default_rng(rng_seed))
                b = LearnerAgent(scaled, 1.0).select_move(state, np.random.default_rng(rng_seed))
                assert a == b

    def test_moves_always_legal(self, small_board):
        net = init_network(small_board, Color.WHITE, seed=2)
        black_net = init_network(small_board, Color.BLACK, seed=3)
        rng = np.random.default_rng(1)
        checked = 0
        for seed in range(40):
            for state, _move, _res in random_playout(small_board, seed, max_plies=60):
                agent = LearnerAgent(net if state.side_to_move is Color.WHITE else black_net, 0.7)
                assert agent.select_move(state, rng) in legal_moves(state)
                checked += 1
        assert checked > 500


def drive_white(config, agent, plies, occupancy=None, wr=None, rng=None):
    """Run the scripted agent against a passive opponent: apply white's move,
    then hand the turn straight back to white. Returns (terminal, visited)."""
    rng = rng or np.random.default_rng(0)
    state = initial_state(config)
    if occupancy is not None:
        state = make_state(config, occupancy, wr if wr is not None else config.beta, config.beta)
    visited = []
    terminal = None
    for _ in range(plies):
        move = agent.select_move(state, rng)
        result = apply_move(state, move)
        visited.append(move.to_cell)
        if result.terminal is not None:
            terminal = result.terminal
            break
        nxt = result.next_state
        state = GameState(config, nxt.occupancy, nxt.white_reserve, nxt.black_reserve,
                          Color.WHITE, nxt.move_count)
    return terminal, visited


class TestPolicyOne:
    def test_opening_exit_on_file_zero(self, default_board):
        agent = ScriptedPolicyOne()
        move = agent.select_move(initial_state(default_board), np.random.default_rng(0))
        assert move == Move(MoveKind.BASE_EXIT, (0, 2))

    def test_east_leg_at_entry_rank(self, default_board):
        agent = ScriptedPolicyOne()
        state = make_state(default_board, {(0, 6): Color.WHITE}, 9, 10)
        move = agent.select_move(state, np.random.default_rng(0))
        assert move == Move(MoveKind.STEP, (1, 6), (0, 6))

    def test_reaches_base_unopposed(self, default_board):
        terminal, _ = drive_white(default_board, ScriptedPolicyOne(), plies=40)
        assert terminal is not None and terminal.winner is Color.WHITE

    def test_lateral_fallback_when_forward_blocked(self, default_board):
        occupancy = {(3, 3): Color.WHITE, (3, 4): Color.BLACK, (4, 3): Color.BLACK}
        agent = ScriptedPolicyOne()
        state = make_state(default_board, occupancy, 0, 8)
        move = agent.select_move(state, np.random.default_rng(0))
        assert move.from_cell == (3, 3)
        assert move.to_cell in {(2, 3), (3, 2)}  # equal-distance squares

    def test_moves_always_legal_under_pressure(self, small_board):
        rng = np.random.default_rng(9)
        for seed in range(20):
            for state, _move, _res in random_playout(small_board, seed, max_plies=40):
                if state.side_to_move is Color.WHITE:
                    move = ScriptedPolicyOne().select_move(state, rng)
                    assert move in legal_moves(state)


class TestPolicyTwo:
    def test_route_zero_opening(self, default_board):
        agent = ScriptedPolicyTwo(route_index=0)
        move = agent.select_move(initial_state(default_board), np.random.default_rng(0))
        assert move == Move(MoveKind.BASE_EXIT, (0, 2))

    def test_central_routes_release_two_pawns(self, default_board):
        agent = ScriptedPolicyTwo(route_index=8)
        state = initial_state(default_board)
        rng = np.random.default_rng(0)
        first = agent.select_move(state, rng)
        assert first.kind is MoveKind.BASE_EXIT
        result = apply_move(state, first)
        nxt = result.next_state
        state2 = GameState(default_board, nxt.occupancy, nxt.white_reserve, nxt.black_reserve,
                           Color.WHITE, nxt.move_count)
        second = agent.select_move(state2, rng)
        assert second.kind is MoveKind.BASE_EXIT

    def test_stage_covers_all_files(self, small_board):
        """Ten unopposed route games jointly visit every file of the board."""
        files = set()
        for route in range(10):
            agent = ScriptedPolicyTwo(route_index=route)
            _terminal, visited = drive_white(small_board, agent, plies=60)
            files.update(x for x, _y in visited)
        assert files == set(range(small_board.n))

    def test_second_pawn_released_when_blocked(self, default_board):
        # Box the lead pawn at (3,3) completely: no forward or lateral step.
        occupancy = {
            (3, 3): Color.WHITE,
            (3, 4): Color.BLACK, (4, 3): Color.BLACK, (2, 3): Color.BLACK, (3, 2): Color.BLACK,
        }
        agent = ScriptedPolicyTwo(route_index=3)
        rng = np.random.default_rng(0)
        state = make_state(default_board, occupancy, 9, 6)
        moves = []
        for _ in range(agent.STALL_LIMIT):
            moves.append(agent.select_move(state, rng))
        assert any(m.kind is MoveKind.BASE_EXIT for m in moves[-1:])

    def test_rejects_bad_route(self):
        with pytest.raises(ValueError):
            ScriptedPolicyTwo(route_index=10)

    def test_explicit_target_file_overrides_route(self, default_board):
        agent = ScriptedPolicyTwo(route_index=0, target_file=5)
        state = initial_state(default_board)
        move = agent.select_move(state, np.random.default_rng(0))
        # exit picked nearest the requested column, not the route-0 column
        assert move.kind is MoveKind.BASE_EXIT
        assert move.to_cell[0] == default_board.a

    def test_moves_always_legal(self, small_board):
        rng = np.random.default_rng(3)
        for seed in range(15):
            agents = [ScriptedPolicyTwo(route_index=seed % 10)]
            for state, _move, _res in random_playout(small_board, seed, max_plies=40):
                if state.side_to_move is Color.WHITE:
                    move = agents[0].select_move(state, rng)
                    assert move in legal_moves(state)


class TestStdinHuman:
    def test_accepts_legal_move(self, default_board):
        agent = StdinHuman(in_stream=io.StringIO("out-c1\n"), out_stream=io.StringIO())
        move = agent.select_move(initial_state(default_board), np.random.default_rng(0))
        assert move == Move(MoveKind.BASE_EXIT, (2, 0))

    def test_reprompts_on_occupied_square(self, default_board):
        out = io.StringIO()
        agent = StdinHuman(in_stream=io.StringIO("d4-d3\nd4-e4\n"), out_stream=out)
        state = make_state(default_board, {(3, 3): Color.WHITE, (3, 2): Color.BLACK}, 5, 9)
        move = agent.select_move(state, np.random.default_rng(0))
        assert move == Move(MoveKind.STEP, (4, 3), (3, 3))
        assert "occupied" in out.getvalue()

    def test_rejects_backward_with_distance_rule(self, default_board):
        state = make_state(default_board, {(4, 1): Color.WHITE}, 5, 10)
        out = io.StringIO()
        agent = StdinHuman(in_stream=io.StringIO("e2-d2\ne2-f2\n"), out_stream=out)
        move = agent.select_move(state, np.random.default_rng(0))
        assert move == Move(MoveKind.STEP, (5, 1), (4, 1))
        assert "distance" in out.getvalue()

    def test_rejects_exit_with_empty_reserve(self, default_board):
        out = io.StringIO()
        state = make_state(default_board, {(3, 3): Color.WHITE}, 0, 10)
        agent = StdinHuman(in_stream=io.StringIO("out-b3\nd4-d5\n"), out_stream=out)
        move = agent.select_move(state, np.random.default_rng(0))
        assert move == Move(MoveKind.STEP, (3, 4), (3, 3))
        assert "reserve-empty" in out.getvalue()

    def test_channel_closed_on_eof(self, default_board):
        agent = StdinHuman(in_stream=io.StringIO(""), out_stream=io.StringIO())
        with pytest.raises(ChannelClosedError):
            agent.select_move(initial_state(default_board), np.random.default_rng(0))
