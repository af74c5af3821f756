"""Episode driver with TD(lambda) eligibility-trace learning.

One call plays one full game between two agents. Agents exposing
``learning = True`` and a ``net`` attribute receive online weight updates
at each of their own decision points:

    delta = r + gamma * v(next) - v(prev)
    e    <- gamma * lambda * e + grad_w v(prev)
    w    <- w + alpha * delta * e

where v = 2*p - 1 maps the network's win probability onto (-1, 1). The
evaluation points of a player are the position it faced before its first
move, then the afterstate of each of its moves; the final transition of
the game uses v(next) = 0 and folds in the terminal credit. Rewards are
the win/loss credits scaled to +-1 plus the change in scaled pawn
difference between consecutive evaluation points, so the pawn-difference
shaping telescopes to (final difference - initial difference) / beta over
the episode.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .game import (
    BoardConfig,
    Color,
    GameOutcome,
    GameState,
    IllegalMoveError,
    Move,
    MoveOutcome,
    OutcomeReason,
    apply_move,
    format_move,
    initial_state,
)
from .agents import ChannelClosedError
from .net import ValueNetwork, encode_afterstate, value, value_and_gradient
from .records import GameRecord

DEFAULT_MOVE_CAP = 3000


class TrainingError(Exception):
    pass


class AgentFaultError(TrainingError):
    """An agent produced an illegal move."""


class RewardRangeError(TrainingError):
    pass


@dataclass(frozen=True)
class TDParams:
    """TD(lambda) hyperparameters; defaults follow the training recipe
    (trace decay 0.5, greedy-action probability 0.9)."""

    lambda_: float = 0.5
    alpha: float = 0.1
    gamma: float = 1.0
    epsilon_greedy: float = 0.9
    epsilon_decay: float | None = None  # optional linear per-game decrement

    def validate(self) -> None:
        if not 0.0 <= self.lambda_ <= 1.0:
            raise TrainingError(f"lambda must be in [0,1], got {self.lambda_}")
        if self.alpha <= 0.0:
            raise TrainingError(f"alpha must be > 0, got {self.alpha}")
        if not 0.0 < self.gamma <= 1.0:
            raise TrainingError(f"gamma must be in (0,1], got {self.gamma}")
        if not 0.0 <= self.epsilon_greedy <= 1.0:
            raise TrainingError(f"epsilon_greedy must be in [0,1], got {self.epsilon_greedy}")
        if self.epsilon_decay is not None and self.epsilon_decay < 0.0:
            raise TrainingError(f"epsilon decay must be >= 0, got {self.epsilon_decay}")

    def epsilon_for_game(self, game_index: int) -> float:
        if self.epsilon_decay is None:
            return self.epsilon_greedy
        return max(0.0, self.epsilon_greedy - self.epsilon_decay * game_index)

    @classmethod
    def from_json(cls, data: dict) -> "TDParams":
        params = cls(
            lambda_=float(data.get("lambda", cls.lambda_)),
            alpha=float(data.get("alpha", cls.alpha)),
            gamma=float(data.get("gamma", cls.gamma)),
            epsilon_greedy=float(data.get("epsilonGreedy", cls.epsilon_greedy)),
            epsilon_decay=(
                float(data["epsilonDecay"]) if data.get("epsilonDecay") is not None else None
            ),
        )
        params.validate()
        return params


@dataclass(frozen=True)
class PawnDelta:
    diff: int


@dataclass(frozen=True)
class RewardScheme:
    """Win/loss credits of +-100 plus pawn-difference credits scaled into
    [-100, 100]; internally everything is divided by 100 so rewards live in
    [-1, 1] next to the network's centered value."""

    beta: int
    win_credit: float = 100.0
    loss_credit: float = -100.0

    @property
    def pawn_scale(self) -> float:
        return 100.0 / self.beta

    def terminal_reward(self, color: Color, outcome: GameOutcome) -> float:
        if outcome.winner is None:
            return 0.0
        return 1.0 if outcome.winner is color else -1.0


def normalized_reward(event: PawnDelta | str, beta: int) -> float:
    """Internal-scale credit for one reward event.

    ``event`` is "win", "loss", or a PawnDelta; pawn differences map to
    diff/beta (the +-100 paper scale divided by 100).
    """
    if event == "win":
        return 1.0
    if event == "loss":
        return -1.0
    if isinstance(event, PawnDelta):
        if abs(event.diff) > beta:
            raise RewardRangeError(f"pawn difference {event.diff} out of range for beta={beta}")
        return event.diff / beta
    raise TrainingError(f"unknown reward event {event!r}")


@dataclass(frozen=True)
class TDUpdate:
    """Instrumentation payload passed to an on_update hook after each
    weight update has been applied."""

    color: Color
    reward: float
    v_prev: float
    v_next: float
    delta: float
    prev_features: np.ndarray
    next_features: np.ndarray | None


@dataclass
class EpisodeResult:
    outcome: GameOutcome | None  # None when the game was aborted
    record: GameRecord
    update_counts: dict[Color, int]
    aborted: bool = False


@dataclass
class _LearnerContext:
    net: ValueNetwork
    e_in: np.ndarray
    e_out: np.ndarray
    snapshot_in: np.ndarray
    snapshot_out: np.ndarray
    prev_features: np.ndarray | None = None
    prev_diff: int = 0
    updates: int = 0
    done: bool = False


def _pawn_diff(state: GameState, color: Color) -> int:
    return state.total_pawns(color) - state.total_pawns(color.opponent)


def _td_step(ctx: _LearnerContext, params: TDParams, reward: float,
             next_features: np.ndarray | None,
             on_update: Callable[[TDUpdate], None] | None, color: Color) -> None:
    v_prev, g_in, g_out = value_and_gradient(ctx.net, ctx.prev_features)
    v_next = value(ctx.net, next_features) if next_features is not None else 0.0
    delta = reward + params.gamma * v_next - v_prev
    decay = params.gamma * params.lambda_
    ctx.e_in *= decay
    ctx.e_in += g_in
    ctx.e_out *= decay
    ctx.e_out += g_out
    step = params.alpha * delta
    ctx.net.w_in += step * ctx.e_in
    ctx.net.w_out += step * ctx.e_out
    ctx.updates += 1
    if on_update is not None:
        on_update(TDUpdate(color, reward, v_prev, v_next, delta, ctx.prev_features, next_features))


def _play(
    config: BoardConfig,
    white_agent,
    black_agent,
    *,
    params: TDParams,
    scheme: RewardScheme | None,
    seed: int,
    move_cap: int,
    train: bool,
    meta: dict | None,
    on_ply: Callable[[Move, MoveOutcome], None] | None,
    on_update: Callable[[TDUpdate], None] | None,
) -> EpisodeResult:
    params.validate()
    rng = np.random.default_rng(seed)
    agents = {Color.WHITE: white_agent, Color.BLACK: black_agent}
    contexts: dict[Color, _LearnerContext] = {}
    if train:
        if scheme is None:
            scheme = RewardScheme(config.beta)
        for color, agent in agents.items():
            if getattr(agent, "learning", False):
                net: ValueNetwork = agent.net
                if net.owner is not color:
                    raise TrainingError(f"{color.value} was handed a network owned by {net.owner.value}")
                contexts[color] = _LearnerContext(
                    net=net,
                    e_in=np.zeros_like(net.w_in),
                    e_out=np.zeros_like(net.w_out),
                    snapshot_in=net.w_in.copy(),
                    snapshot_out=net.w_out.copy(),
                )
    beta = config.beta
    state = initial_state(config)
    moves: list[str] = []
    captures: list[tuple[int, int]] = []
    outcome: GameOutcome | None = None
    aborted = False

    while True:
        if state.move_count >= move_cap:
            outcome = GameOutcome(None, OutcomeReason.MOVE_CAP_REACHED, state.move_count)
            break
        color = state.side_to_move
        agent = agents[color]
        ctx = contexts.get(color)
        if ctx is not None and ctx.prev_features is None:
            ctx.prev_features = encode_afterstate(state, color)
            ctx.prev_diff = _pawn_diff(state, color)
        try:
            move = agent.select_move(state, rng)
        except ChannelClosedError:
            aborted = True
            break
        try:
            result = apply_move(state, move)
        except IllegalMoveError as exc:
            raise AgentFaultError(
                f"{getattr(agent, 'kind', type(agent).__name__)} playing {color.value} "
                f"returned illegal move {format_move(move)} ({exc.rule})"
            ) from None
        moves.append(format_move(move))
        captures.append((result.white_lost, result.black_lost))
        if on_ply is not None:
            on_ply(move, result)
        if ctx is not None:
            after = result.next_state
            diff = _pawn_diff(after, color)
            if result.terminal is None:
                next_features = encode_afterstate(after, color)
                reward = (diff - ctx.prev_diff) / beta
                _td_step(ctx, params, reward, next_features, on_update, color)
                ctx.prev_features = next_features
                ctx.prev_diff = diff
            else:
                reward = scheme.terminal_reward(color, result.terminal) + (diff - ctx.prev_diff) / beta
                _td_step(ctx, params, reward, None, on_update, color)
                ctx.done = True
        state = result.next_state
        if result.terminal is not None:
            outcome = result.terminal
            break

    if aborted:
        # Abandoned games leave no trace in the models.
        for ctx in contexts.values():
            ctx.net.w_in[...] = ctx.snapshot_in
            ctx.net.w_out[...] = ctx.snapshot_out
    else:
        for color, ctx in contexts.items():
            if ctx.done or ctx.prev_features is None:
                continue
            reward = scheme.terminal_reward(color, outcome) + (
                _pawn_diff(state, color) - ctx.prev_diff
            ) / beta
            _td_step(ctx, params, reward, None, on_update, color)
        for ctx in contexts.values():
            if not ctx.net.weights_finite():
                raise TrainingError("training produced non-finite weights")

    meta = meta or {}
    record = GameRecord(
        game_id=meta.get("game_id", "game"),
        batch_id=meta.get("batch_id", ""),
        stage_index=int(meta.get("stage_index", 0)),
        game_kind=meta.get("game_kind", "CC"),
        seed=seed,
        moves=tuple(moves),
        captures=tuple(captures),
        outcome=outcome,
        move_count=state.move_count,
        aborted=aborted,
    )
    counts = {color: ctx.updates for color, ctx in contexts.items()}
    return EpisodeResult(outcome=outcome, record=record, update_counts=counts, aborted=aborted)


def play_training_game(
    config: BoardConfig,
    white_agent,
    black_agent,
    *,
    params: TDParams | None = None,
    scheme: RewardScheme | None = None,
    seed: int,
    move_cap: int = DEFAULT_MOVE_CAP,
    meta: dict | None = None,
    on_ply: Callable[[Move, MoveOutcome], None] | None = None,
    on_update: Callable[[TDUpdate], None] | None = None,
) -> EpisodeResult:
    """Play one game, updating the networks of agents flagged learning."""
    return _play(
        config, white_agent, black_agent,
        params=params or TDParams(), scheme=scheme, seed=seed, move_cap=move_cap,
        train=True, meta=meta, on_ply=on_ply, on_update=on_update,
    )


def play_evaluation_game(
    config: BoardConfig,
    white_agent,
    black_agent,
    *,
    seed: int,
    move_cap: int = DEFAULT_MOVE_CAP,
    meta: dict | None = None,
    on_ply: Callable[[Move, MoveOutcome], None] | None = None,
) -> EpisodeResult:
    """Play one frozen game: no weight is touched regardless of agent flags."""
    return _play(
        config, white_agent, black_agent,
        params=TDParams(), scheme=None, seed=seed, move_cap=move_cap,
        train=False, meta=meta, on_ply=on_ply, on_update=None,
    )
