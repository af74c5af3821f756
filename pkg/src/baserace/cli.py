"""Command-line interface.

Subcommands:

    train       run an experiment plan (exit 2 on plan errors)
    replay      re-verify a game log (exit 3 on divergence)
    tournament  compare two batch directories over two frozen rounds
    metrics     round-robin tables and ratio reports, CSV plus figures
    serve       run an interactive plan behind the local play service
    play        terminal client for a served plan
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .experiment import PlanError, plan_from_file, run_plan, verify_log
from .metrics import (
    build_ratio_report,
    round_robin_from_comparisons,
    write_ratio_csv,
    write_round_robin_csv,
)
from .records import ReplayDivergenceError
from .tournament import (
    ComparisonResult,
    MissingCheckpointError,
    load_comparison,
    run_comparison,
    save_comparison,
)

EXIT_OK = 0
EXIT_PLAN_ERROR = 2
EXIT_DIVERGENCE = 3


def _cmd_train(args: argparse.Namespace) -> int:
    try:
        plan = plan_from_file(args.plan)
    except PlanError as exc:
        print(f"plan error: {exc}", file=sys.stderr)
        return EXIT_PLAN_ERROR
    report = run_plan(plan, args.out, resume=args.resume)
    for entry in report.entries:
        line = f"{entry['id']}: {entry['status']}"
        if entry["status"] == "completed":
            games = entry["games"]
            line += f" ({games['total']} games, avg {entry['avgMoves']:.1f} moves)"
        elif entry["status"] == "failed":
            line += f" ({entry['error']})"
        print(line)
    return EXIT_OK if report.ok else 1


def _cmd_replay(args: argparse.Namespace) -> int:
    try:
        verified = verify_log(args.log)
    except ReplayDivergenceError as exc:
        print(f"replay divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except OSError as exc:
        print(f"cannot read log: {exc}", file=sys.stderr)
        return EXIT_PLAN_ERROR
    print(f"{verified} games replayed cleanly from {args.log}")
    return EXIT_OK


def _cmd_tournament(args: argparse.Namespace) -> int:
    try:
        result = run_comparison(
            args.white, args.black,
            games_per_round=args.games, seed=args.seed,
            epsilon=args.epsilon, move_cap=args.move_cap,
        )
    except MissingCheckpointError as exc:
        print(f"missing checkpoint: {exc}", file=sys.stderr)
        return EXIT_PLAN_ERROR
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_comparison(result, out_dir / "comparison.json")
    report = build_ratio_report(result)
    print(f"round 1 (white {result.batch_x} vs black {result.batch_y}): "
          f"{result.round1.white_wins}/{result.round1.black_wins}"
          f" +{result.round1.draws} draws, avg {result.round1.avg_moves:.1f} moves")
    print(f"round 2 (white {result.batch_y} vs black {result.batch_x}): "
          f"{result.round2.white_wins}/{result.round2.black_wins}"
          f" +{result.round2.draws} draws, avg {result.round2.avg_moves:.1f} moves")
    print(f"speed ratio {report.speed_ratio:.2f}, advantage v1 {report.advantage_v1:.2f}, "
          f"advantage v2 {report.advantage_v2:.2f}")
    if report.draws:
        print(f"warning: {report.draws} drawn games are counted in no win column")
    return EXIT_OK


def _collect_comparisons(args: argparse.Namespace, batch_dirs: list[str]) -> list[ComparisonResult]:
    results = []
    for i, x in enumerate(batch_dirs):
        for y in batch_dirs[i + 1:]:
            results.append(run_comparison(
                x, y, games_per_round=args.games, seed=args.seed,
                epsilon=args.epsilon, move_cap=args.move_cap,
            ))
    return results


def _cmd_metrics_round_robin(args: argparse.Namespace) -> int:
    batch_dirs = [b for b in args.batches.split(",") if b]
    if len(batch_dirs) < 2:
        print("need at least two batch directories", file=sys.stderr)
        return EXIT_PLAN_ERROR
    try:
        results = _collect_comparisons(args, batch_dirs)
    except MissingCheckpointError as exc:
        print(f"missing checkpoint: {exc}", file=sys.stderr)
        return EXIT_PLAN_ERROR
    table = round_robin_from_comparisons(results)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for result in results:
        save_comparison(result, out_dir / f"comparison-{result.batch_x}-{result.batch_y}.json")
    write_round_robin_csv(table, out_dir / "roundrobin.csv")
    if not args.no_figures:
        from .report import save_round_robin_figure

        save_round_robin_figure(table, out_dir / "roundrobin.png")
    for batch in table.participants:
        print(f"{batch}: total {table.totals[batch]} (rank {table.total_ranks[batch]}), "
              f"avg moves {table.avg_moves_display[batch]} (rank {table.avg_moves_ranks[batch]})")
    if table.draws:
        print(f"warning: {table.draws} drawn games are counted in no win column")
    if table.has_rank_ties:
        print("warning: rank ties broken by batch id")
    return EXIT_OK


def _cmd_metrics_ratios(args: argparse.Namespace) -> int:
    try:
        with open(args.pairs, "r", encoding="utf-8") as fp:
            spec = json.load(fp)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read pairs file: {exc}", file=sys.stderr)
        return EXIT_PLAN_ERROR
    results = []
    try:
        for entry in spec.get("pairs", []):
            if "comparison" in entry:
                results.append(load_comparison(entry["comparison"]))
            else:
                results.append(run_comparison(
                    entry["x"], entry["y"],
                    games_per_round=int(spec.get("gamesPerRound", 1000)),
                    seed=int(spec.get("seed", 0)),
                    epsilon=float(spec.get("epsilon", 0.9)),
                    move_cap=int(spec.get("moveCap", 3000)),
                ))
    except (KeyError, OSError, json.JSONDecodeError, MissingCheckpointError) as exc:
        print(f"bad pairs entry: {exc}", file=sys.stderr)
        return EXIT_PLAN_ERROR
    if not results:
        print("pairs file lists no comparisons", file=sys.stderr)
        return EXIT_PLAN_ERROR
    reports = [build_ratio_report(r) for r in results]
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    ordered = write_ratio_csv(reports, out_dir / "ratios.csv")
    if not args.no_figures:
        from .report import save_ratio_figures

        save_ratio_figures(ordered, out_dir)
    for i, report in enumerate(ordered, start=1):
        print(f"{i}. {report.pair}: speed {report.speed_ratio:.2f}, "
              f"v1 {report.advantage_v1:.2f}, v2 {report.advantage_v2:.2f}")
    drawn = sum(r.draws for r in ordered)
    if drawn:
        print(f"warning: {drawn} drawn games are counted in no win column")
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    from .service import NoInteractiveStagesError, serve

    try:
        plan = plan_from_file(args.plan)
    except PlanError as exc:
        print(f"plan error: {exc}", file=sys.stderr)
        return EXIT_PLAN_ERROR
    host, _, port = args.bind.rpartition(":")
    try:
        report = serve(plan, args.out, (host or "127.0.0.1", int(port)), resume=args.resume)
    except NoInteractiveStagesError as exc:
        print(f"plan error: {exc}", file=sys.stderr)
        return EXIT_PLAN_ERROR
    return EXIT_OK if report.ok else 1


def _cmd_play(args: argparse.Namespace) -> int:
    from .client import play

    return play(args.connect)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="baserace",
        description="TD-learning laboratory for the two-base race board game",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="run an experiment plan")
    p.add_argument("--plan", required=True, help="plan JSON file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--resume", action="store_true", help="skip completed batches")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("replay", help="re-verify a game log")
    p.add_argument("--log", required=True, help="games.jsonl file")
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("tournament", help="compare two batch directories")
    p.add_argument("--white", required=True, help="batch directory for the first side")
    p.add_argument("--black", required=True, help="batch directory for the second side")
    p.add_argument("--games", type=int, default=1000, help="games per round")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=0.9, help="greedy-move probability")
    p.add_argument("--move-cap", type=int, default=3000)
    p.add_argument("--out", required=True, help="output directory for comparison.json")
    p.set_defaults(func=_cmd_tournament)

    metrics = sub.add_parser("metrics", help="tables, ratios, and figures")
    msub = metrics.add_subparsers(dest="metrics_command", required=True)

    p = msub.add_parser("round-robin", help="all-pairs comparison table")
    p.add_argument("--batches", required=True, help="comma-separated batch directories")
    p.add_argument("--games", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=0.9)
    p.add_argument("--move-cap", type=int, default=3000)
    p.add_argument("--out", required=True, help="output directory for tables")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=_cmd_metrics_round_robin)

    p = msub.add_parser("ratios", help="speed and advantage ratios for listed pairs")
    p.add_argument("--pairs", required=True, help="JSON file listing comparisons")
    p.add_argument("--out", default=".", help="output directory (default: current)")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=_cmd_metrics_ratios)

    p = sub.add_parser("serve", help="serve an interactive plan")
    p.add_argument("--plan", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--bind", default="127.0.0.1:7643", help="host:port to listen on")
    p.add_argument("--resume", action="store_true")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("play", help="terminal client for a served plan")
    p.add_argument("--connect", default="127.0.0.1:7643", help="host:port of the service")
    p.set_defaults(func=_cmd_play)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
