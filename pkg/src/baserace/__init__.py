"""Training laboratory for the two-base race board game.

A rules engine, per-player value networks trained with TD(0.5) eligibility
traces, scripted and interactive white-player trainers, an experiment
orchestrator with model lineage, and tournament metrics (speed and
advantage ratios, round-robin tables) with figure rendering.
"""

__version__ = "0.1.0"

from .game import (
    BoardConfig,
    Color,
    GameOutcome,
    GameState,
    Move,
    MoveKind,
    MoveOutcome,
    OutcomeReason,
    apply_move,
    base_distance,
    initial_state,
    legal_moves,
)
from .net import ValueNetwork, encode_afterstate, forward, init_network, load_checkpoint, save_checkpoint
from .training import RewardScheme, TDParams, play_evaluation_game, play_training_game
from .agents import LearnerAgent, ScriptedPolicyOne, ScriptedPolicyTwo
from .experiment import BatchSpec, ExperimentPlan, plan_from_file, run_batch, run_plan
from .records import GameRecord, replay_record
from .tournament import ComparisonResult, run_comparison
from .metrics import (
    advantage_ratio_v1,
    advantage_ratio_v2,
    build_round_robin,
    speed_ratio,
)

__all__ = [
    "BoardConfig", "Color", "GameOutcome", "GameState", "Move", "MoveKind",
    "MoveOutcome", "OutcomeReason", "apply_move", "base_distance",
    "initial_state", "legal_moves",
    "ValueNetwork", "encode_afterstate", "forward", "init_network",
    "load_checkpoint", "save_checkpoint",
    "RewardScheme", "TDParams", "play_evaluation_game", "play_training_game",
    "LearnerAgent", "ScriptedPolicyOne", "ScriptedPolicyTwo",
    "BatchSpec", "ExperimentPlan", "plan_from_file", "run_batch", "run_plan",
    "GameRecord", "replay_record",
    "ComparisonResult", "run_comparison",
    "advantage_ratio_v1", "advantage_ratio_v2", "build_round_robin", "speed_ratio",
]
