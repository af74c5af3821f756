"""Derived tournament metrics.

- Speed ratio: the normalized (>= 1) ratio of the two rounds' average game
  lengths.
- Advantage ratio, first form: the normalized ratio of the two rounds'
  white/black win ratios.
- Advantage ratio, second form ("compressed"): the normalized ratio of
  each batch's total wins across both rounds.
- Round-robin tables over a set of batches: per-cell net wins and average
  moves, row/column sums and ranks, and the per-batch aggregates (total
  net wins and overall average moves).

Internal arithmetic runs at full precision; display rounding is half-up
(ratios to two decimals, average moves to the nearest integer).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

from .tournament import ComparisonResult


class MetricsError(Exception):
    pass


class DegenerateCountsError(MetricsError):
    """A win count needed as a denominator is zero."""


class IncompleteMatrixError(MetricsError):
    pass


def round_half_up(x: float, digits: int = 0) -> float:
    q = Decimal(1).scaleb(-digits)
    return float(Decimal(repr(x)).quantize(q, rounding=ROUND_HALF_UP))


def speed_ratio(result: ComparisonResult) -> float:
    """max/min of the two rounds' average moves; always >= 1."""
    a, b = result.round1.avg_moves, result.round2.avg_moves
    if a <= 0 or b <= 0:
        raise MetricsError("average moves must be positive")
    return max(a, b) / min(a, b)


def advantage_ratio_v1(result: ComparisonResult) -> float:
    """Normalized ratio of the rounds' white/black win ratios; >= 1."""
    r1, r2 = result.round1, result.round2
    if 0 in (r1.white_wins, r1.black_wins, r2.white_wins, r2.black_wins):
        raise DegenerateCountsError("a zero win count makes the advantage ratio infinite")
    q1 = r1.white_wins / r1.black_wins
    q2 = r2.white_wins / r2.black_wins
    return max(q1 / q2, q2 / q1)


def batch_totals(result: ComparisonResult) -> tuple[int, int]:
    """Wins taken by each batch's players across both rounds (X, Y)."""
    x_total = result.round1.white_wins + result.round2.black_wins
    y_total = result.round2.white_wins + result.round1.black_wins
    return x_total, y_total


def advantage_ratio_v2(result: ComparisonResult) -> float:
    """Normalized ratio of the batches' total wins across both rounds; >= 1."""
    x_total, y_total = batch_totals(result)
    if x_total == 0 or y_total == 0:
        raise DegenerateCountsError("a batch won no game at all")
    return max(x_total / y_total, y_total / x_total)


@dataclass(frozen=True)
class RatioReport:
    pair: str
    batch_x: str
    batch_y: str
    speed_ratio: float
    advantage_v1: float  # math.inf when degenerate
    advantage_v2: float
    draws: int
    # Orientation: which round (1/2) supplied the numerator, and which
    # batch's total sat on top of the second advantage form.
    speed_numerator_round: int
    v1_numerator_round: int
    v2_numerator_batch: str

    @property
    def degenerate(self) -> bool:
        return math.isinf(self.advantage_v1) or math.isinf(self.advantage_v2)


def build_ratio_report(result: ComparisonResult) -> RatioReport:
    r1, r2 = result.round1, result.round2
    speed = speed_ratio(result)
    try:
        v1 = advantage_ratio_v1(result)
        q1 = r1.white_wins / r1.black_wins
        q2 = r2.white_wins / r2.black_wins
        v1_round = 1 if q1 >= q2 else 2
    except DegenerateCountsError:
        v1 = math.inf
        v1_round = 0
    x_total, y_total = batch_totals(result)
    try:
        v2 = advantage_ratio_v2(result)
    except DegenerateCountsError:
        v2 = math.inf
    return RatioReport(
        pair=f"{result.batch_x}-{result.batch_y}",
        batch_x=result.batch_x,
        batch_y=result.batch_y,
        speed_ratio=speed,
        advantage_v1=v1,
        advantage_v2=v2,
        draws=r1.draws + r2.draws,
        speed_numerator_round=1 if r1.avg_moves >= r2.avg_moves else 2,
        v1_numerator_round=v1_round,
        v2_numerator_batch=result.batch_x if x_total >= y_total else result.batch_y,
    )


def sort_reports(reports: list[RatioReport]) -> list[RatioReport]:
    return sorted(reports, key=lambda r: (r.speed_ratio, r.pair))


def write_ratio_csv(reports: list[RatioReport], path: str | Path) -> list[RatioReport]:
    """Write ratios sorted by increasing speed ratio; returns the sorted list.

    Columns: index, pair, speedRatio, advantageV1, advantageV2, draws.
    Degenerate ratios print as inf; any nonzero draw count is flagged in
    the trailing column so it cannot go unnoticed.
    """
    ordered = sort_reports(reports)
    with open(path, "w", encoding="utf-8", newline="") as fp:
        writer = csv.writer(fp)
        writer.writerow(["index", "pair", "speedRatio", "advantageV1", "advantageV2", "draws"])
        for i, report in enumerate(ordered, start=1):
            v1 = "inf" if math.isinf(report.advantage_v1) else f"{round_half_up(report.advantage_v1, 2):.2f}"
            v2 = "inf" if math.isinf(report.advantage_v2) else f"{round_half_up(report.advantage_v2, 2):.2f}"
            writer.writerow([
                i, report.pair, f"{round_half_up(report.speed_ratio, 2):.2f}", v1, v2, report.draws,
            ])
    return ordered


@dataclass(frozen=True)
class PairStats:
    """One ordered round: the first batch's white model against the second
    batch's black model."""

    white_wins: int
    black_wins: int
    draws: int
    avg_moves: float

    @property
    def net_wins(self) -> int:
        return self.white_wins - self.black_wins


def pairs_from_comparison(result: ComparisonResult) -> dict[tuple[str, str], PairStats]:
    r1, r2 = result.round1, result.round2
    return {
        (result.batch_x, result.batch_y): PairStats(r1.white_wins, r1.black_wins, r1.draws, r1.avg_moves),
        (result.batch_y, result.batch_x): PairStats(r2.white_wins, r2.black_wins, r2.draws, r2.avg_moves),
    }


def _rank(ids: list[str], score: dict[str, float], *, descending: bool) -> tuple[dict[str, int], bool]:
    """Dense competition-free 1..k ranking; ties broken by id and flagged."""
    ordered = sorted(ids, key=lambda i: (-score[i] if descending else score[i], i))
    ranks = {batch: pos + 1 for pos, batch in enumerate(ordered)}
    values = sorted(score.values())
    tied = any(a == b for a, b in zip(values, values[1:]))
    return ranks, tied


@dataclass(frozen=True)
class RoundRobinTable:
    participants: tuple[str, ...]
    cells: dict[tuple[str, str], PairStats]
    win_row_sums: dict[str, int]     # per batch as white
    win_col_sums: dict[str, int]     # per batch as black
    win_white_ranks: dict[str, int]  # high net wins rank first
    win_black_ranks: dict[str, int]  # low (very negative) column sums rank first
    moves_row_sums: dict[str, float]
    moves_col_sums: dict[str, float]
    moves_white_ranks: dict[str, int]  # fewer moves rank first
    moves_black_ranks: dict[str, int]
    totals: dict[str, int]             # white sum minus black column sum
    total_ranks: dict[str, int]
    avg_moves: dict[str, float]        # mean over the batch's row and column cells
    avg_moves_display: dict[str, int]  # half-up integers for presentation
    avg_moves_ranks: dict[str, int]
    has_rank_ties: bool
    draws: int

    def net_win_cell(self, white: str, black: str) -> int:
        return self.cells[(white, black)].net_wins

    def avg_moves_cell(self, white: str, black: str) -> float:
        return self.cells[(white, black)].avg_moves


def build_round_robin(
    participants: list[str], cells: dict[tuple[str, str], PairStats]
) -> RoundRobinTable:
    """Aggregate ordered-pair round results into the full tournament table."""
    k = len(participants)
    if k < 2:
        raise IncompleteMatrixError("a round robin needs at least two participants")
    if len(set(participants)) != k:
        raise IncompleteMatrixError("duplicate participants")
    for x in participants:
        for y in participants:
            if x != y and (x, y) not in cells:
                raise IncompleteMatrixError(f"missing result for white {x} vs black {y}")

    win_row = {x: sum(cells[(x, y)].net_wins for y in participants if y != x) for x in participants}
    win_col = {y: sum(cells[(x, y)].net_wins for x in participants if x != y) for y in participants}
    moves_row = {x: sum(cells[(x, y)].avg_moves for y in participants if y != x) for x in participants}
    moves_col = {y: sum(cells[(x, y)].avg_moves for x in participants if x != y) for y in participants}
    totals = {b: win_row[b] - win_col[b] for b in participants}
    avg_moves = {b: (moves_row[b] + moves_col[b]) / (2 * (k - 1)) for b in participants}

    ids = list(participants)
    win_white_ranks, t1 = _rank(ids, win_row, descending=True)
    win_black_ranks, t2 = _rank(ids, win_col, descending=False)
    moves_white_ranks, t3 = _rank(ids, moves_row, descending=False)
    moves_black_ranks, t4 = _rank(ids, moves_col, descending=False)
    total_ranks, t5 = _rank(ids, totals, descending=True)
    avg_moves_ranks, t6 = _rank(ids, avg_moves, descending=False)

    return RoundRobinTable(
        participants=tuple(participants),
        cells=dict(cells),
        win_row_sums=win_row,
        win_col_sums=win_col,
        win_white_ranks=win_white_ranks,
        win_black_ranks=win_black_ranks,
        moves_row_sums=moves_row,
        moves_col_sums=moves_col,
        moves_white_ranks=moves_white_ranks,
        moves_black_ranks=moves_black_ranks,
        totals=totals,
        total_ranks=total_ranks,
        avg_moves=avg_moves,
        avg_moves_display={b: int(round_half_up(avg_moves[b])) for b in participants},
        avg_moves_ranks=avg_moves_ranks,
        has_rank_ties=any((t1, t2, t3, t4, t5, t6)),
        draws=sum(s.draws for s in cells.values()),
    )


def round_robin_from_comparisons(results: list[ComparisonResult]) -> RoundRobinTable:
    participants: list[str] = []
    cells: dict[tuple[str, str], PairStats] = {}
    for result in results:
        for b in (result.batch_x, result.batch_y):
            if b not in participants:
                participants.append(b)
        cells.update(pairs_from_comparison(result))
    return build_round_robin(participants, cells)


def write_round_robin_csv(table: RoundRobinTable, path: str | Path) -> None:
    """One row per batch. Columns, in order: batch, netWins_<id> for every
    participant (blank on the diagonal), whiteWinSum, whiteWinRank,
    blackWinSum, blackWinRank, avgMoves_<id>..., whiteMovesSum,
    whiteMovesRank, blackMovesSum, blackMovesRank, totalNetWins, totalRank,
    avgMoves, avgMovesRank."""
    ids = list(table.participants)
    header = (
        ["batch"]
        + [f"netWins_{y}" for y in ids]
        + ["whiteWinSum", "whiteWinRank", "blackWinSum", "blackWinRank"]
        + [f"avgMoves_{y}" for y in ids]
        + ["whiteMovesSum", "whiteMovesRank", "blackMovesSum", "blackMovesRank"]
        + ["totalNetWins", "totalRank", "avgMoves", "avgMovesRank"]
    )
    with open(path, "w", encoding="utf-8", newline="") as fp:
        writer = csv.writer(fp)
        writer.writerow(header)
        for x in ids:
            row = [x]
            row += [table.net_win_cell(x, y) if y != x else "" for y in ids]
            row += [
                table.win_row_sums[x], table.win_white_ranks[x],
                table.win_col_sums[x], table.win_black_ranks[x],
            ]
            row += [table.avg_moves_cell(x, y) if y != x else "" for y in ids]
            row += [
                table.moves_row_sums[x], table.moves_white_ranks[x],
                table.moves_col_sums[x], table.moves_black_ranks[x],
            ]
            row += [
                table.totals[x], table.total_ranks[x],
                table.avg_moves_display[x], table.avg_moves_ranks[x],
            ]
            writer.writerow(row)
