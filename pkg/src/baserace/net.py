"""Per-player value network: afterstate features, forward pass, checkpoints.

One two-layer perceptron per player color. The input layer holds one entry
per non-base square (+1 own pawn, -1 opponent pawn, 0 empty, relative to
the owning perspective) plus ten scalar summary features; the hidden layer
is half the input size (rounded up); the single sigmoid output reads as the
probability of winning from the encoded afterstate.

The ten scalar features, in order:

  0  own reserve / beta
  1  opponent reserve / beta
  2  own total pawns / beta
  3  opponent total pawns / beta
  4  own pawns on board / beta
  5  opponent pawns on board / beta
  6  min Chebyshev distance of an own pawn to the opponent base / (n-1), 1 if none out
  7  same for the opponent's pawns toward the own base
  8  side-to-move flag: +1 own, -1 opponent
  9  constant 1

Checkpoints are canonical JSON (sorted keys, compact separators, shortest
round-trip decimals) so that save/load round-trips are bit-identical.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .game import BoardConfig, Cell, Color, GameState, base_distance, in_base

CHECKPOINT_VERSION = 1
CHECKPOINT_SUFFIX = ".vnet.json"
DEFAULT_INIT_SCALE = 0.1
SCALAR_FEATURES = 10


class NetError(Exception):
    pass


class ConfigMismatchError(NetError):
    pass


class DimensionMismatchError(NetError):
    pass


class CheckpointFormatError(NetError):
    pass


def input_count(config: BoardConfig) -> int:
    return config.n * config.n - 2 * config.a * config.a + SCALAR_FEATURES


def hidden_count(config: BoardConfig) -> int:
    return -(-input_count(config) // 2)  # ceil for odd input counts


@dataclass(frozen=True)
class NetworkTopology:
    input_count: int
    hidden_count: int
    output_count: int = 1

    @classmethod
    def for_board(cls, config: BoardConfig) -> "NetworkTopology":
        return cls(input_count(config), hidden_count(config))


@lru_cache(maxsize=None)
def cell_order(config: BoardConfig) -> tuple[Cell, ...]:
    """Non-base squares in fixed row-major order (rank outer, file inner)."""
    return tuple(
        (x, y)
        for y in range(config.n)
        for x in range(config.n)
        if not in_base((x, y), Color.WHITE, config) and not in_base((x, y), Color.BLACK, config)
    )


@lru_cache(maxsize=None)
def _cell_index(config: BoardConfig) -> dict[Cell, int]:
    return {cell: i for i, cell in enumerate(cell_order(config))}


def encode_afterstate(state: GameState, perspective: Color) -> np.ndarray:
    """Feature vector for a position as seen by ``perspective``.

    Each perspective reads the board in its own orientation: black's cell
    order is the 180-degree rotation of white's, so position k in the
    layout always means the same square relative to the reader's base.
    """
    config = state.config
    index = _cell_index(config)
    cells = len(index)
    features = np.zeros(cells + SCALAR_FEATURES, dtype=np.float64)
    own = perspective
    flip = perspective is Color.BLACK  # rotation reverses the row-major order
    own_board = 0
    opp_board = 0
    min_own: int | None = None
    min_opp: int | None = None
    for cell, color in state.occupancy.items():
        idx = index.get(cell)
        if idx is not None and flip:
            idx = cells - 1 - idx
        if color is own:
            if idx is not None:
                features[idx] = 1.0
            own_board += 1
            d = base_distance(cell, own.opponent, config)
            if min_own is None or d < min_own:
                min_own = d
        else:
            if idx is not None:
                features[idx] = -1.0
            opp_board += 1
            d = base_distance(cell, own, config)
            if min_opp is None or d < min_opp:
                min_opp = d
    beta = config.beta
    span = config.n - 1
    own_reserve = state.reserve(own)
    opp_reserve = state.reserve(own.opponent)
    features[cells + 0] = own_reserve / beta
    features[cells + 1] = opp_reserve / beta
    features[cells + 2] = (own_reserve + own_board) / beta
    features[cells + 3] = (opp_reserve + opp_board) / beta
    features[cells + 4] = own_board / beta
    features[cells + 5] = opp_board / beta
    features[cells + 6] = 1.0 if min_own is None else min_own / span
    features[cells + 7] = 1.0 if min_opp is None else min_opp / span
    features[cells + 8] = 1.0 if state.side_to_move is own else -1.0
    features[cells + 9] = 1.0
    return features


def _sigmoid(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _sigmoid_scalar(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


@dataclass
class ValueNetwork:
    """Weights for one player color.

    ``w_in`` has shape (hidden, input+1) with the bias in the last column;
    ``w_out`` has shape (hidden+1,) with the bias last.
    """

    owner: Color
    board_config: BoardConfig
    w_in: np.ndarray
    w_out: np.ndarray

    @property
    def topology(self) -> NetworkTopology:
        return NetworkTopology.for_board(self.board_config)

    @property
    def input_count(self) -> int:
        return input_count(self.board_config)

    @property
    def hidden_count(self) -> int:
        return hidden_count(self.board_config)

    def copy(self) -> "ValueNetwork":
        return ValueNetwork(self.owner, self.board_config, self.w_in.copy(), self.w_out.copy())

    def weights_finite(self) -> bool:
        return bool(np.isfinite(self.w_in).all() and np.isfinite(self.w_out).all())


def networks_equal(a: ValueNetwork, b: ValueNetwork) -> bool:
    return (
        a.owner is b.owner
        and a.board_config == b.board_config
        and np.array_equal(a.w_in, b.w_in)
        and np.array_equal(a.w_out, b.w_out)
    )


def init_network(config: BoardConfig, owner: Color, seed: int,
                 init_scale: float = DEFAULT_INIT_SCALE) -> ValueNetwork:
    """Fresh network with weights uniform in [-init_scale, +init_scale].

    With the default scale every position is valued near 0.5; with scale 0
    every position is valued exactly 0.5.
    """
    config.validate()
    inputs = input_count(config)
    hidden = hidden_count(config)
    rng = np.random.default_rng(seed)
    w_in = rng.uniform(-init_scale, init_scale, size=(hidden, inputs + 1))
    w_out = rng.uniform(-init_scale, init_scale, size=hidden + 1)
    return ValueNetwork(owner, config, w_in, w_out)


def forward(net: ValueNetwork, features: np.ndarray) -> float:
    """Win probability in (0,1) for an encoded afterstate."""
    if features.shape != (net.input_count,):
        raise DimensionMismatchError(
            f"expected {net.input_count} features, got shape {features.shape}"
        )
    x1 = np.append(features, 1.0)
    h = _sigmoid(net.w_in @ x1)
    zo = float(net.w_out[:-1] @ h) + float(net.w_out[-1])
    return _sigmoid_scalar(zo)


def forward_many(net: ValueNetwork, features: np.ndarray) -> np.ndarray:
    """Vectorized ``forward`` over rows of a feature matrix."""
    if features.ndim != 2 or features.shape[1] != net.input_count:
        raise DimensionMismatchError(
            f"expected (m, {net.input_count}) features, got shape {features.shape}"
        )
    ones = np.ones((features.shape[0], 1))
    h = _sigmoid(np.hstack([features, ones]) @ net.w_in.T)
    zo = np.hstack([h, ones]) @ net.w_out
    return _sigmoid(zo)


def state_value(net: ValueNetwork, state: GameState, perspective: Color | None = None) -> float:
    if state.config != net.board_config:
        raise ConfigMismatchError(
            f"state for board {state.config} fed to a network built for {net.board_config}"
        )
    return forward(net, encode_afterstate(state, perspective or net.owner))


def value(net: ValueNetwork, features: np.ndarray) -> float:
    """Centered value 2p-1 in (-1,1); the quantity TD updates operate on."""
    return 2.0 * forward(net, features) - 1.0


def value_and_gradient(net: ValueNetwork, features: np.ndarray):
    """Centered value plus its gradient with respect to both weight arrays."""
    if features.shape != (net.input_count,):
        raise DimensionMismatchError(
            f"expected {net.input_count} features, got shape {features.shape}"
        )
    x1 = np.append(features, 1.0)
    h = _sigmoid(net.w_in @ x1)
    h1 = np.append(h, 1.0)
    zo = float(net.w_out @ h1)
    p = _sigmoid_scalar(zo)
    v = 2.0 * p - 1.0
    dzo = 2.0 * p * (1.0 - p)
    g_out = dzo * h1
    dh = dzo * net.w_out[:-1] * h * (1.0 - h)
    g_in = np.outer(dh, x1)
    return v, g_in, g_out


def save_checkpoint(net: ValueNetwork, path: str | os.PathLike) -> None:
    if not net.weights_finite():
        raise NetError("refusing to checkpoint non-finite weights")
    doc = {
        "formatVersion": CHECKPOINT_VERSION,
        "owner": net.owner.value,
        "boardConfig": {"n": net.board_config.n, "a": net.board_config.a, "beta": net.board_config.beta},
        "topology": {"input": net.input_count, "hidden": net.hidden_count},
        "inputToHidden": [float(x) for x in net.w_in.ravel()],
        "hiddenToOutput": [float(x) for x in net.w_out],
    }
    with open(path, "w", encoding="utf-8") as fp:
        fp.write(json.dumps(doc, sort_keys=True, separators=(",", ":")))
        fp.write("\n")


def load_checkpoint(path: str | os.PathLike,
                    expected_config: BoardConfig | None = None) -> ValueNetwork:
    with open(path, "r", encoding="utf-8") as fp:
        raw = fp.read()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CheckpointFormatError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise CheckpointFormatError(f"{path}: expected a JSON object")
    if doc.get("formatVersion") != CHECKPOINT_VERSION:
        raise CheckpointFormatError(
            f"{path}: unsupported format version {doc.get('formatVersion')!r}"
        )
    try:
        owner = Color(doc["owner"])
        bc = doc["boardConfig"]
        config = BoardConfig(int(bc["n"]), int(bc["a"]), int(bc["beta"]))
        topo = doc["topology"]
        w_in_flat = doc["inputToHidden"]
        w_out_flat = doc["hiddenToOutput"]
    except (KeyError, TypeError, ValueError) as exc:
        raise CheckpointFormatError(f"{path}: missing or malformed field: {exc}") from None
    inputs = input_count(config)
    hidden = hidden_count(config)
    if topo != {"input": inputs, "hidden": hidden}:
        raise CheckpointFormatError(
            f"{path}: topology {topo} inconsistent with board {bc}"
        )
    if len(w_in_flat) != hidden * (inputs + 1) or len(w_out_flat) != hidden + 1:
        raise CheckpointFormatError(f"{path}: weight array lengths do not match the topology")
    w_in = np.asarray(w_in_flat, dtype=np.float64).reshape(hidden, inputs + 1)
    w_out = np.asarray(w_out_flat, dtype=np.float64)
    net = ValueNetwork(owner, config, w_in, w_out)
    if not net.weights_finite():
        raise CheckpointFormatError(f"{path}: non-finite weights")
    if expected_config is not None and config != expected_config:
        raise ConfigMismatchError(
            f"{path}: checkpoint for board {config} loaded into a run on {expected_config}"
        )
    return net
