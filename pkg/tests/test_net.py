"""Value network tests: encoding, forward pass, init, checkpoint round trips."""

import numpy as np
import pytest

from baserace.game import BoardConfig, Color, apply_move, initial_state, legal_moves
from baserace.net import (
    CheckpointFormatError,
    ConfigMismatchError,
    DimensionMismatchError,
    cell_order,
    encode_afterstate,
    forward,
    forward_many,
    hidden_count,
    init_network,
    input_count,
    load_checkpoint,
    networks_equal,
    save_checkpoint,
    state_value,
    value,
    value_and_gradient,
)

from conftest import random_playout


def test_input_formula():
    assert input_count(BoardConfig(8, 2, 10)) == 66
    assert input_count(BoardConfig(6, 1, 3)) == 44
    assert hidden_count(BoardConfig(8, 2, 10)) == 33
    assert hidden_count(BoardConfig(6, 1, 3)) == 22
    # odd input counts round the hidden layer up
    assert hidden_count(BoardConfig(5, 1, 2)) == 17  # (25 - 2 + 10 + 1) // 2


def test_cell_order_excludes_bases(default_board):
    order = cell_order(default_board)
    assert len(order) == 56
    assert (0, 0) not in order and (7, 7) not in order
    assert (2, 0) in order


class TestEncoding:
    def test_initial_state(self, default_board):
        state = initial_state(default_board)
        features = encode_afterstate(state, Color.WHITE)
        assert features.shape == (66,)
        assert not features[:56].any()
        scalars = features[56:]
        assert scalars[0] == scalars[1] == 1.0  # full reserves
        assert scalars[2] == scalars[3] == 1.0
        assert scalars[4] == scalars[5] == 0.0
        assert scalars[6] == scalars[7] == 1.0  # nobody out
        assert scalars[8] == 1.0  # own side to move
        assert scalars[9] == 1.0

    def test_single_pawn(self, default_board):
        state = initial_state(default_board)
        state = apply_move(state, legal_moves(state)[0]).next_state
        features = encode_afterstate(state, Color.WHITE)
        cells = features[:56]
        assert (cells == 1.0).sum() == 1
        assert (cells == -1.0).sum() == 0
        flipped = encode_afterstate(state, Color.BLACK)
        assert (flipped[:56] == -1.0).sum() == 1

    def test_perspective_symmetry_under_rotation(self, small_board):
        """White's view equals black's view of the 180-degree rotated board:
        cell entries are sign-flipped and index-reversed."""
        for seed in range(10):
            steps = random_playout(small_board, seed)
            if not steps:
                continue
            state = steps[min(7, len(steps) - 1)][0]
            cells = len(cell_order(small_board))
            white_view = encode_afterstate(state, Color.WHITE)
            black_view = encode_afterstate(state, Color.BLACK)
            assert np.array_equal(white_view[:cells], -black_view[:cells][::-1])

    def test_feature_ranges(self, small_board):
        for seed in range(10):
            for state, _move, _res in random_playout(small_board, seed):
                for perspective in Color:
                    features = encode_afterstate(state, perspective)
                    cells = features[: len(cell_order(small_board))]
                    assert set(np.unique(cells)).issubset({-1.0, 0.0, 1.0})
                    assert (np.abs(features) <= 1.0).all()


class TestForward:
    def test_zero_weights_give_half(self, default_board):
        net = init_network(default_board, Color.WHITE, seed=0, init_scale=0.0)
        state = initial_state(default_board)
        assert forward(net, encode_afterstate(state, Color.WHITE)) == 0.5
        assert state_value(net, state) == 0.5

    def test_output_in_open_interval(self, small_board):
        rng = np.random.default_rng(5)
        for trial in range(1000):
            net = init_network(small_board, Color.WHITE, seed=trial, init_scale=2.0)
            features = rng.choice([-1.0, 0.0, 1.0], size=net.input_count)
            p = forward(net, features)
            assert 0.0 < p < 1.0

    def test_deterministic(self, small_board):
        net = init_network(small_board, Color.WHITE, seed=3)
        features = encode_afterstate(initial_state(small_board), Color.WHITE)
        assert forward(net, features) == forward(net, features)

    def test_forward_many_matches_forward(self, small_board):
        net = init_network(small_board, Color.BLACK, seed=4)
        rng = np.random.default_rng(0)
        rows = rng.choice([-1.0, 0.0, 1.0], size=(17, net.input_count))
        batched = forward_many(net, rows)
        for i in range(rows.shape[0]):
            assert batched[i] == pytest.approx(forward(net, rows[i]), abs=1e-15)

    def test_dimension_mismatch(self, small_board):
        net = init_network(small_board, Color.WHITE, seed=1)
        with pytest.raises(DimensionMismatchError):
            forward(net, np.zeros(13))

    def test_config_mismatch(self, small_board, default_board):
        net = init_network(small_board, Color.WHITE, seed=1)
        with pytest.raises(ConfigMismatchError):
            state_value(net, initial_state(default_board))


class TestInit:
    def test_seed_determinism(self, small_board):
        a = init_network(small_board, Color.WHITE, seed=42)
        b = init_network(small_board, Color.WHITE, seed=42)
        assert networks_equal(a, b)
        c = init_network(small_board, Color.WHITE, seed=43)
        assert not networks_equal(a, c)

    def test_default_scale_outputs_near_half(self, default_board):
        """Random positions on a freshly seeded network all value in (0.4, 0.6)."""
        net = init_network(default_board, Color.WHITE, seed=7)
        count = 0
        for seed in range(40):
            for state, _move, _res in random_playout(default_board, seed, max_plies=30):
                p = forward(net, encode_afterstate(state, Color.WHITE))
                assert 0.4 < p < 0.6
                count += 1
                if count >= 1000:
                    return
        assert count > 500


class TestCheckpoints:
    def test_round_trip_identity(self, tmp_path, small_board):
        net = init_network(small_board, Color.BLACK, seed=9)
        path = tmp_path / "black.vnet.json"
        save_checkpoint(net, path)
        loaded = load_checkpoint(path)
        assert networks_equal(net, loaded)
        # re-saving produces the identical byte stream
        path2 = tmp_path / "again.vnet.json"
        save_checkpoint(loaded, path2)
        assert path.read_bytes() == path2.read_bytes()

    def test_round_trip_after_training_noise(self, tmp_path, small_board):
        net = init_network(small_board, Color.WHITE, seed=9)
        rng = np.random.default_rng(1)
        net.w_in += rng.normal(scale=0.3, size=net.w_in.shape)
        net.w_out += rng.normal(scale=0.3, size=net.w_out.shape)
        path = tmp_path / "white.vnet.json"
        save_checkpoint(net, path)
        assert networks_equal(net, load_checkpoint(path))

    def test_wrong_version_rejected(self, tmp_path, small_board):
        net = init_network(small_board, Color.WHITE, seed=9)
        path = tmp_path / "net.vnet.json"
        save_checkpoint(net, path)
        doc = path.read_text().replace('"formatVersion":1', '"formatVersion":99')
        path.write_text(doc)
        with pytest.raises(CheckpointFormatError):
            load_checkpoint(path)

    def test_wrong_board_rejected(self, tmp_path, small_board, default_board):
        net = init_network(default_board, Color.WHITE, seed=9)
        path = tmp_path / "net.vnet.json"
        save_checkpoint(net, path)
        with pytest.raises(ConfigMismatchError):
            load_checkpoint(path, expected_config=small_board)

    def test_garbage_rejected(self, tmp_path):
        path = tmp_path / "net.vnet.json"
        path.write_text("not json at all")
        with pytest.raises(CheckpointFormatError):
            load_checkpoint(path)


class TestGradient:
    def test_matches_finite_differences(self, small_board):
        rng = np.random.default_rng(11)
        h = 1e-6
        for trial in range(20):
            net = init_network(small_board, Color.WHITE, seed=trial, init_scale=0.5)
            features = rng.choice([-1.0, 0.0, 1.0], size=net.input_count)
            v, g_in, g_out = value_and_gradient(net, features)
            assert v == pytest.approx(value(net, features))
            fd_in = np.zeros_like(net.w_in)
            for i in range(net.w_in.shape[0]):
                for j in range(net.w_in.shape[1]):
                    net.w_in[i, j] += h
                    up = value(net, features)
                    net.w_in[i, j] -= 2 * h
                    down = value(net, features)
                    net.w_in[i, j] += h
                    fd_in[i, j] = (up - down) / (2 * h)
            fd_out = np.zeros_like(net.w_out)
            for j in range(net.w_out.shape[0]):
                net.w_out[j] += h
                up = value(net, features)
                net.w_out[j] -= 2 * h
                down = value(net, features)
                net.w_out[j] += h
                fd_out[j] = (up - down) / (2 * h)
            grad = np.concatenate([g_in.ravel(), g_out])
            fd = np.concatenate([fd_in.ravel(), fd_out])
            rel = np.linalg.norm(fd - grad) / np.linalg.norm(grad)
            assert rel < 1e-6
