"""Figure rendering for metric reports.

Figures are written next to the delimited outputs: two scatter charts of
advantage ratios against comparisons ordered by increasing speed ratio,
and a per-batch summary chart for round-robin tables.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .metrics import RatioReport, RoundRobinTable, sort_reports


def save_ratio_figures(reports: list[RatioReport], out_dir: str | Path) -> list[Path]:
    """Render ratio scatter charts; returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ordered = sort_reports(reports)
    xs = list(range(1, len(ordered) + 1))
    speeds = [r.speed_ratio for r in ordered]
    paths = []
    for suffix, attr, label in (
        ("v1", "advantage_v1", "advantage ratio (win-ratio form)"),
        ("v2", "advantage_v2", "advantage ratio (total-wins form)"),
    ):
        values = [getattr(r, attr) for r in ordered]
        finite = [v if not math.isinf(v) else None for v in values]
        fig, ax = plt.subplots(figsize=(7, 4.2))
        ax.plot(xs, speeds, marker="o", linestyle="-", color="tab:blue", label="speed ratio")
        ax.scatter(
            [x for x, v in zip(xs, finite) if v is not None],
            [v for v in finite if v is not None],
            marker="s", color="tab:red", label=label,
        )
        for x, v in zip(xs, values):
            if math.isinf(v):
                ax.annotate("inf", (x, max(speeds)), ha="center", color="tab:red")
        ax.set_xticks(xs)
        ax.set_xticklabels([r.pair for r in ordered], rotation=45, ha="right", fontsize=8)
        ax.set_xlabel("comparison (by increasing speed ratio)")
        ax.set_ylabel("ratio")
        ax.legend()
        fig.tight_layout()
        path = out_dir / f"ratios_{suffix}.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        paths.append(path)
    return paths


def save_round_robin_figure(table: RoundRobinTable, path: str | Path) -> Path:
    """Per-batch totals: net wins (bars, left axis) and average game length
    (markers, right axis)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    ids = list(table.participants)
    totals = [table.totals[b] for b in ids]
    moves = [table.avg_moves[b] for b in ids]
    fig, ax1 = plt.subplots(figsize=(6.5, 4))
    ax1.bar(ids, totals, color="tab:blue", alpha=0.7)
    ax1.set_ylabel("total net wins", color="tab:blue")
    ax1.axhline(0, color="black", linewidth=0.6)
    ax2 = ax1.twinx()
    ax2.plot(ids, moves, marker="o", color="tab:red")
    ax2.set_ylabel("average moves", color="tab:red")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
