// Board view model: the rendered position always equals the last state
// message; clicks map to protocol move strings. Move hints are optional
// client-side sugar only; the submission verdict always comes from the
// server's moveResult.

import { BoardInfo, StateMessage, exitMove, stepMove } from './protocol.js';

export type CellKind = 'empty' | 'whiteBase' | 'blackBase';

export interface CellView {
  x: number;
  y: number;
  kind: CellKind;
  pawn: 'White' | 'Black' | null;
  selected: boolean;
  hint: boolean;
}

export interface Selection {
  kind: 'pawn' | 'base';
  x?: number;
  y?: number;
}

function inWhiteBase(x: number, y: number, board: BoardInfo): boolean {
  return x < board.a && y < board.a;
}

function inBlackBase(x: number, y: number, board: BoardInfo): boolean {
  return x >= board.n - board.a && y >= board.n - board.a;
}

// Chebyshev distance from the white base region (0 inside it).
function whiteBaseDistance(x: number, y: number, board: BoardInfo): number {
  const dx = x >= board.a ? x - (board.a - 1) : 0;
  const dy = y >= board.a ? y - (board.a - 1) : 0;
  return Math.max(dx, dy);
}

export class BoardViewModel {
  board: BoardInfo;
  occupancy = new Map<string, 'White' | 'Black'>();
  whiteReserve = 0;
  blackReserve = 0;
  sideToMove: 'White' | 'Black' = 'White';
  moveCount = 0;
  selection: Selection | null = null;

  constructor(board: BoardInfo) {
    this.board = board;
    this.whiteReserve = board.beta;
    this.blackReserve = board.beta;
  }

  applyState(state: StateMessage): void {
    this.occupancy.clear();
    for (const entry of state.occupancy) {
      this.occupancy.set(`${entry.x},${entry.y}`, entry.color);
    }
    this.whiteReserve = state.whiteReserve;
    this.blackReserve = state.blackReserve;
    this.sideToMove = state.sideToMove;
    this.moveCount = state.moveCount;
    this.selection = null;
  }

  pawnAt(x: number, y: number): 'White' | 'Black' | null {
    return this.occupancy.get(`${x},${y}`) ?? null;
  }

  // Squares a selected white pawn could plausibly step to (orthogonal,
  // empty, distance from the white base not decreasing).
  stepHints(x: number, y: number): Array<[number, number]> {
    const from = whiteBaseDistance(x, y, this.board);
    const targets: Array<[number, number]> = [];
    for (const [dx, dy] of [[0, 1], [1, 0], [0, -1], [-1, 0]] as const) {
      const tx = x + dx;
      const ty = y + dy;
      if (tx < 0 || ty < 0 || tx >= this.board.n || ty >= this.board.n) continue;
      if (this.pawnAt(tx, ty) !== null) continue;
      if (inWhiteBase(tx, ty, this.board)) continue;
      if (whiteBaseDistance(tx, ty, this.board) < from) continue;
      targets.push([tx, ty]);
    }
    return targets;
  }

  // Free squares of the white exit ring (Chebyshev distance 1 from the base).
  exitHints(): Array<[number, number]> {
    const targets: Array<[number, number]> = [];
    for (let x = 0; x < this.board.n; x++) {
      for (let y = 0; y < this.board.n; y++) {
        if (whiteBaseDistance(x, y, this.board) !== 1) continue;
        if (this.pawnAt(x, y) !== null) continue;
        targets.push([x, y]);
      }
    }
    return targets;
  }

  private hintSet(): Set<string> {
    if (this.selection === null) return new Set();
    if (this.selection.kind === 'base') {
      return new Set(this.exitHints().map(([x, y]) => `${x},${y}`));
    }
    return new Set(
      this.stepHints(this.selection.x!, this.selection.y!).map(([x, y]) => `${x},${y}`),
    );
  }

  // A click either changes the selection (returns null) or produces a move
  // string to submit.
  click(x: number, y: number): string | null {
    const pawn = this.pawnAt(x, y);
    if (this.selection === null) {
      if (pawn === 'White') {
        this.selection = { kind: 'pawn', x, y };
      } else if (inWhiteBase(x, y, this.board) && this.whiteReserve > 0) {
        this.selection = { kind: 'base' };
      }
      return null;
    }
    if (this.selection.kind === 'pawn' && this.selection.x === x && this.selection.y === y) {
      this.selection = null; // deselect
      return null;
    }
    if (pawn === 'White') {
      this.selection = { kind: 'pawn', x, y };
      return null;
    }
    if (inWhiteBase(x, y, this.board)) {
      this.selection = this.whiteReserve > 0 ? { kind: 'base' } : null;
      return null;
    }
    const move =
      this.selection.kind === 'base'
        ? exitMove(x, y)
        : stepMove(this.selection.x!, this.selection.y!, x, y);
    this.selection = null;
    return move;
  }

  cells(): CellView[] {
    const hints = this.hintSet();
    const views: CellView[] = [];
    for (let y = this.board.n - 1; y >= 0; y--) {
      for (let x = 0; x < this.board.n; x++) {
        const kind: CellKind = inWhiteBase(x, y, this.board)
          ? 'whiteBase'
          : inBlackBase(x, y, this.board)
            ? 'blackBase'
            : 'empty';
        const selected =
          this.selection !== null &&
          ((this.selection.kind === 'pawn' && this.selection.x === x && this.selection.y === y) ||
            (this.selection.kind === 'base' && kind === 'whiteBase'));
        views.push({
          x,
          y,
          kind,
          pawn: this.pawnAt(x, y),
          selected,
          hint: hints.has(`${x},${y}`),
        });
      }
    }
    return views;
  }
}
