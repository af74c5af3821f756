"""Experiment plans: training batches, model lineage, and persistence.

A plan is a DAG of batches. Each batch runs a fixed number of stages; a
CC batch plays only computer-vs-computer games, while HC and HC1 batches
precede each stage's CC games with a block of human-vs-computer games
(10 per stage for HC, 1 for HC1, both overridable). The human is always
the white player and only the black model learns during HC games; both
models learn during CC games. A batch starts its models either from
scratch (seeded) or from another batch's final checkpoints.

On disk a batch directory holds per-stage checkpoints, final checkpoints,
a JSON-lines game log, and a summary with checksums:

    <out>/<batchId>/
        stage-1/ ... stage-k/   (white.vnet.json, black.vnet.json each)
        white.vnet.json
        black.vnet.json
        games.jsonl
        summary.json
"""

from __future__ import annotations

import hashlib
import json
import shutil
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .agents import LearnerAgent, ScriptedPolicyOne, ScriptedPolicyTwo, StdinHuman
from .game import BoardConfig, Color
from .net import ValueNetwork, init_network, load_checkpoint, save_checkpoint
from .records import GameRecord, LogHeader, append_record, read_log, replay_record, write_header
from .seeds import child_seed
from .training import (
    DEFAULT_MOVE_CAP,
    EpisodeResult,
    RewardScheme,
    TDParams,
    play_training_game,
)

PLAN_VERSION = 1
BATCH_KINDS = ("CC", "HC", "HC1")
HUMAN_AGENTS = ("ScriptedPolicy1", "ScriptedPolicy2", "Interactive")
DEFAULT_HC_GAMES = {"CC": 0, "HC": 10, "HC1": 1}


class PlanError(Exception):
    pass


class CycleError(PlanError):
    pass


class MissingDependencyError(PlanError):
    pass


@dataclass(frozen=True)
class NetInit:
    """Where a batch's model for one color comes from."""

    tabula_rasa: int | None = None  # seed for a fresh network
    from_batch: str | None = None

    def __post_init__(self):
        if (self.tabula_rasa is None) == (self.from_batch is None):
            raise PlanError("network init must be exactly one of tabulaRasa or fromBatch")

    @classmethod
    def from_json(cls, data: dict | None, default_seed: int) -> "NetInit":
        if data is None:
            return cls(tabula_rasa=default_seed)
        if not isinstance(data, dict) or len(data) != 1:
            raise PlanError(f"bad network init {data!r}")
        if "tabulaRasa" in data:
            return cls(tabula_rasa=int(data["tabulaRasa"]))
        if "fromBatch" in data:
            return cls(from_batch=str(data["fromBatch"]))
        raise PlanError(f"bad network init {data!r}")

    def to_json(self) -> dict:
        if self.tabula_rasa is not None:
            return {"tabulaRasa": self.tabula_rasa}
        return {"fromBatch": self.from_batch}


@dataclass(frozen=True)
class BatchSpec:
    id: str
    kind: str
    white_init: NetInit
    black_init: NetInit
    stages: int = 5
    cc_games_per_stage: int = 1000
    hc_games_per_stage: int = 0
    human_agent: str | None = None
    seed: int = 0

    def validate(self) -> None:
        if not self.id:
            raise PlanError("batch id must be non-empty")
        if self.kind not in BATCH_KINDS:
            raise PlanError(f"batch {self.id}: unknown kind {self.kind!r}")
        if self.stages < 1 or self.cc_games_per_stage < 0 or self.hc_games_per_stage < 0:
            raise PlanError(f"batch {self.id}: negative or zero counts")
        if self.kind == "CC":
            if self.hc_games_per_stage != 0:
                raise PlanError(f"batch {self.id}: CC batches play no HC games")
            if self.human_agent is not None:
                raise PlanError(f"batch {self.id}: CC batches take no human agent")
        else:
            if self.hc_games_per_stage < 1:
                raise PlanError(f"batch {self.id}: {self.kind} batches need HC games per stage")
            if self.human_agent not in HUMAN_AGENTS:
                raise PlanError(
                    f"batch {self.id}: humanAgent must be one of {HUMAN_AGENTS}, got {self.human_agent!r}"
                )

    @property
    def total_games(self) -> int:
        return self.stages * (self.cc_games_per_stage + self.hc_games_per_stage)

    @property
    def parents(self) -> tuple[str, ...]:
        refs = []
        for init in (self.white_init, self.black_init):
            if init.from_batch is not None:
                refs.append(init.from_batch)
        return tuple(refs)

    @classmethod
    def from_json(cls, data: dict, plan_seed: int) -> "BatchSpec":
        try:
            batch_id = str(data["id"])
            kind = str(data["kind"])
        except KeyError as exc:
            raise PlanError(f"batch entry missing {exc}") from None
        hc_default = DEFAULT_HC_GAMES.get(kind, 0)
        spec = cls(
            id=batch_id,
            kind=kind,
            stages=int(data.get("stages", 5)),
            cc_games_per_stage=int(data.get("ccGamesPerStage", 1000)),
            hc_games_per_stage=int(data.get("hcGamesPerStage", hc_default)),
            human_agent=data.get("humanAgent"),
            white_init=NetInit.from_json(data.get("whiteInit"), child_seed(plan_seed, batch_id, "white-init")),
            black_init=NetInit.from_json(data.get("blackInit"), child_seed(plan_seed, batch_id, "black-init")),
            seed=int(data.get("seed", 0)),
        )
        spec.validate()
        return spec

    def to_json(self) -> dict:
        doc = {
            "id": self.id,
            "kind": self.kind,
            "stages": self.stages,
            "ccGamesPerStage": self.cc_games_per_stage,
            "hcGamesPerStage": self.hc_games_per_stage,
            "whiteInit": self.white_init.to_json(),
            "blackInit": self.black_init.to_json(),
            "seed": self.seed,
        }
        if self.human_agent is not None:
            doc["humanAgent"] = self.human_agent
        return doc


@dataclass(frozen=True)
class ExperimentPlan:
    board: BoardConfig
    batches: tuple[BatchSpec, ...]
    seed: int = 0
    move_cap: int = DEFAULT_MOVE_CAP
    td: TDParams = field(default_factory=TDParams)
    hc_first: bool = True  # HC games precede the CC games of each stage

    def validate(self) -> None:
        self.board.validate()
        self.td.validate()
        if self.move_cap < 1:
            raise PlanError(f"move cap must be >= 1, got {self.move_cap}")
        ids = [b.id for b in self.batches]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise PlanError(f"duplicate batch ids: {dupes}")
        known = set(ids)
        for batch in self.batches:
            batch.validate()
            for ref in batch.parents:
                if ref not in known:
                    raise MissingDependencyError(f"batch {batch.id} references unknown batch {ref!r}")
        self.execution_order()

    def execution_order(self) -> list[BatchSpec]:
        """Stable topological order (plan order among ready batches)."""
        remaining = list(self.batches)
        done: set[str] = set()
        order: list[BatchSpec] = []
        while remaining:
            ready = [b for b in remaining if all(p in done for p in b.parents)]
            if not ready:
                cyclic = sorted(b.id for b in remaining)
                raise CycleError(f"batch lineage contains a cycle among {cyclic}")
            batch = ready[0]
            remaining.remove(batch)
            done.add(batch.id)
            order.append(batch)
        return order

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentPlan":
        if not isinstance(data, dict):
            raise PlanError("plan must be a JSON object")
        if data.get("formatVersion") != PLAN_VERSION:
            raise PlanError(f"unsupported plan formatVersion {data.get('formatVersion')!r}")
        try:
            b = data["board"]
            board = BoardConfig(int(b["n"]), int(b["a"]), int(b["beta"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise PlanError(f"bad board section: {exc}") from None
        seed = int(data.get("seed", 0))
        try:
            batches = tuple(BatchSpec.from_json(entry, seed) for entry in data.get("batches", []))
        except (TypeError, ValueError) as exc:
            raise PlanError(f"bad batch entry: {exc}") from None
        plan = cls(
            board=board,
            batches=batches,
            seed=seed,
            move_cap=int(data.get("moveCap", DEFAULT_MOVE_CAP)),
            td=TDParams.from_json(data.get("td", {})),
            hc_first=bool(data.get("hcFirst", True)),
        )
        plan.validate()
        return plan

    def to_json(self) -> dict:
        return {
            "formatVersion": PLAN_VERSION,
            "board": {"n": self.board.n, "a": self.board.a, "beta": self.board.beta},
            "seed": self.seed,
            "moveCap": self.move_cap,
            "hcFirst": self.hc_first,
            "td": {
                "lambda": self.td.lambda_,
                "alpha": self.td.alpha,
                "gamma": self.td.gamma,
                "epsilonGreedy": self.td.epsilon_greedy,
                "epsilonDecay": self.td.epsilon_decay,
            },
            "batches": [b.to_json() for b in self.batches],
        }


def plan_from_file(path: str | Path) -> ExperimentPlan:
    try:
        with open(path, "r", encoding="utf-8") as fp:
            data = json.load(fp)
    except OSError as exc:
        raise PlanError(f"cannot read plan {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise PlanError(f"plan {path} is not valid JSON: {exc}") from None
    return ExperimentPlan.from_json(data)


class TrainingHooks:
    """Observation points for live sessions; the defaults do nothing."""

    def on_batch_start(self, spec: BatchSpec) -> None:
        pass

    def on_game_start(self, meta: dict, state) -> None:
        pass

    def on_ply(self, meta: dict, move, result) -> None:
        pass

    def on_game_end(self, meta: dict, record: GameRecord) -> None:
        pass

    def on_batch_end(self, spec: BatchSpec, summary: dict) -> None:
        pass


@dataclass
class BatchResult:
    spec: BatchSpec
    directory: Path
    records: list[GameRecord]
    white: ValueNetwork
    black: ValueNetwork
    summary: dict


@dataclass
class PlanReport:
    entries: list[dict]
    ok: bool

    def to_json(self) -> dict:
        return {"ok": self.ok, "batches": self.entries}


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fp:
        for chunk in iter(lambda: fp.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def materialize_network(
    init: NetInit, owner: Color, plan: ExperimentPlan, out_root: Path
) -> ValueNetwork:
    """Build a batch's starting network for one color.

    Fresh networks are seeded; inherited networks are loaded from the
    parent batch's final checkpoint, bit-for-bit.
    """
    if init.tabula_rasa is not None:
        return init_network(plan.board, owner, init.tabula_rasa)
    name = "white.vnet.json" if owner is Color.WHITE else "black.vnet.json"
    path = out_root / init.from_batch / name
    if not path.exists():
        raise MissingDependencyError(f"parent checkpoint {path} not materialized")
    net = load_checkpoint(path, expected_config=plan.board)
    if net.owner is not owner:
        raise PlanError(f"{path} holds a {net.owner.value} network, expected {owner.value}")
    return net


def _make_human_agent(spec: BatchSpec, stage: int, game: int,
                      interactive_factory: Callable[[], object] | None):
    if spec.human_agent == "ScriptedPolicy1":
        return ScriptedPolicyOne()
    if spec.human_agent == "ScriptedPolicy2":
        route = (stage * spec.hc_games_per_stage + game) % 10
        return ScriptedPolicyTwo(route_index=route)
    if interactive_factory is not None:
        return interactive_factory()
    return StdinHuman()


def run_batch(
    spec: BatchSpec,
    plan: ExperimentPlan,
    out_root: Path,
    *,
    interactive_factory: Callable[[], object] | None = None,
    hooks: TrainingHooks | None = None,
) -> BatchResult:
    """Run one batch to completion and persist all its artifacts."""
    hooks = hooks or TrainingHooks()
    out_root = Path(out_root)
    batch_dir = out_root / spec.id
    batch_dir.mkdir(parents=True, exist_ok=True)
    white = materialize_network(spec.white_init, Color.WHITE, plan, out_root)
    black = materialize_network(spec.black_init, Color.BLACK, plan, out_root)
    scheme = RewardScheme(plan.board.beta)
    hooks.on_batch_start(spec)

    records: list[GameRecord] = []
    stage_summaries: list[dict] = []
    tallies = {"whiteWins": 0, "blackWins": 0, "draws": 0}
    total_moves = 0
    aborted_count = 0
    games_played = 0  # completed games, drives epsilon decay
    log_path = batch_dir / "games.jsonl"

    def run_one(log_fp, stage: int, kind: str, game: int) -> EpisodeResult:
        nonlocal games_played, aborted_count, total_moves
        epsilon = plan.td.epsilon_for_game(games_played)
        black_agent = LearnerAgent(black, epsilon, learning=True)
        interactive = kind == "HC" and spec.human_agent == "Interactive"
        if kind == "HC":
            white_agent = _make_human_agent(spec, stage, game, interactive_factory)
        else:
            white_agent = LearnerAgent(white, epsilon, learning=True)
        seed = child_seed(plan.seed, spec.seed, spec.id, "stage", stage, kind.lower(), game)
        base_id = f"{spec.id}-s{stage}-{kind.lower()}{game}"
        attempt = 0
        while True:
            game_id = base_id if attempt == 0 else f"{base_id}-retry{attempt}"
            meta = {
                "game_id": game_id,
                "batch_id": spec.id,
                "stage_index": stage,
                "game_kind": kind,
                "interactive": interactive,
                "hc_game_index": game,
                "hc_games_total": spec.hc_games_per_stage,
                "stages_total": spec.stages,
            }
            hooks.on_game_start(meta, None)
            result = play_training_game(
                plan.board,
                white_agent,
                black_agent,
                params=plan.td,
                scheme=scheme,
                seed=seed,
                move_cap=plan.move_cap,
                meta=meta,
                on_ply=lambda move, res, _m=meta: hooks.on_ply(_m, move, res),
            )
            records.append(result.record)
            append_record(log_fp, result.record)
            log_fp.flush()
            hooks.on_game_end(meta, result.record)
            if not result.aborted:
                break
            # An interactive game lost its client: record the abort, leave
            # the statistics untouched, and offer the same game again.
            aborted_count += 1
            attempt += 1
        games_played += 1
        outcome = result.outcome
        if outcome.winner is Color.WHITE:
            tallies["whiteWins"] += 1
        elif outcome.winner is Color.BLACK:
            tallies["blackWins"] += 1
        else:
            tallies["draws"] += 1
        total_moves += outcome.final_move_count
        return result

    with open(log_path, "w", encoding="utf-8") as log_fp:
        write_header(log_fp, LogHeader(spec.id, plan.board, plan.move_cap))
        for stage in range(spec.stages):
            stage_games = {"hc": 0, "cc": 0}
            blocks = [("HC", spec.hc_games_per_stage), ("CC", spec.cc_games_per_stage)]
            if not plan.hc_first:
                blocks.reverse()
            for kind, count in blocks:
                for game in range(count):
                    run_one(log_fp, stage, kind, game)
                    stage_games[kind.lower()] += 1
            stage_dir = batch_dir / f"stage-{stage + 1}"
            stage_dir.mkdir(exist_ok=True)
            save_checkpoint(white, stage_dir / "white.vnet.json")
            save_checkpoint(black, stage_dir / "black.vnet.json")
            stage_summaries.append({"stage": stage, **stage_games})

    save_checkpoint(white, batch_dir / "white.vnet.json")
    save_checkpoint(black, batch_dir / "black.vnet.json")

    completed = games_played
    checksum_targets = ["games.jsonl", "white.vnet.json", "black.vnet.json"] + [
        f"stage-{s + 1}/{color}.vnet.json"
        for s in range(spec.stages)
        for color in ("white", "black")
    ]
    summary = {
        "formatVersion": 1,
        "batchId": spec.id,
        "kind": spec.kind,
        "board": {"n": plan.board.n, "a": plan.board.a, "beta": plan.board.beta},
        "stages": spec.stages,
        "games": {
            "total": completed,
            "cc": spec.stages * spec.cc_games_per_stage,
            "hc": spec.stages * spec.hc_games_per_stage,
            "aborted": aborted_count,
        },
        "outcomes": tallies,
        "avgMoves": (total_moves / completed) if completed else 0.0,
        "perStage": stage_summaries,
        "checksums": {rel: _sha256(batch_dir / rel) for rel in checksum_targets},
        "complete": True,
    }
    with open(batch_dir / "summary.json", "w", encoding="utf-8") as fp:
        json.dump(summary, fp, sort_keys=True, indent=2)
        fp.write("\n")
    hooks.on_batch_end(spec, summary)
    return BatchResult(spec, batch_dir, records, white, black, summary)


def batch_is_complete(batch_dir: Path) -> bool:
    """A batch directory counts as done when its summary says so and every
    checksummed artifact still matches."""
    summary_path = batch_dir / "summary.json"
    if not summary_path.exists():
        return False
    try:
        with open(summary_path, "r", encoding="utf-8") as fp:
            summary = json.load(fp)
    except (OSError, json.JSONDecodeError):
        return False
    if not summary.get("complete"):
        return False
    for rel, digest in summary.get("checksums", {}).items():
        target = batch_dir / rel
        if not target.exists() or _sha256(target) != digest:
            return False
    return True


def run_plan(
    plan: ExperimentPlan,
    out_root: str | Path,
    *,
    resume: bool = False,
    interactive_factory: Callable[[], object] | None = None,
    hooks: TrainingHooks | None = None,
) -> PlanReport:
    """Execute a plan's batches in dependency order.

    With ``resume``, batch directories whose summaries and checksums are
    intact are skipped; anything partial is rebuilt from scratch. A batch
    failure stops the run and names the batch in the report.
    """
    plan.validate()
    out_root = Path(out_root)
    out_root.mkdir(parents=True, exist_ok=True)
    entries: list[dict] = []
    ok = True
    order = plan.execution_order()
    for position, spec in enumerate(order):
        batch_dir = out_root / spec.id
        if resume and batch_is_complete(batch_dir):
            entries.append({"id": spec.id, "status": "skipped"})
            continue
        if batch_dir.exists():
            shutil.rmtree(batch_dir)
        try:
            result = run_batch(
                spec, plan, out_root,
                interactive_factory=interactive_factory, hooks=hooks,
            )
        except Exception as exc:  # report the failed batch, do not run dependents
            ok = False
            entries.append({"id": spec.id, "status": "failed", "error": str(exc)})
            for skipped in order[position + 1:]:
                entries.append({"id": skipped.id, "status": "notRun"})
            break
        entries.append({
            "id": spec.id,
            "status": "completed",
            "games": result.summary["games"],
            "outcomes": result.summary["outcomes"],
            "avgMoves": result.summary["avgMoves"],
        })
    report = PlanReport(entries, ok)
    with open(out_root / "plan-report.json", "w", encoding="utf-8") as fp:
        json.dump(report.to_json(), fp, sort_keys=True, indent=2)
        fp.write("\n")
    return report


def verify_log(log_path: str | Path) -> int:
    """Replay every record in a log; returns the number of verified games."""
    header, records = read_log(log_path)
    verified = 0
    for record in records:
        replay_record(record, header.board)
        if not record.aborted:
            verified += 1
    return verified
