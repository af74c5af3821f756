// Play-service wire protocol: line-delimited JSON, one object per line.
// Mirrors docs/protocol.md in the repository root; the server is the only
// authority on move legality.

export const PROTOCOL_VERSION = 1;

export interface BoardInfo {
  n: number;
  a: number;
  beta: number;
}

export interface OccupancyEntry {
  x: number;
  y: number;
  color: 'White' | 'Black';
}

export interface HelloMessage {
  v: number;
  type: 'hello';
  protocol: number;
  board: BoardInfo;
}

export interface ProgressMessage {
  v: number;
  type: 'progress';
  batchId: string;
  stageIndex: number;
  gameKind: 'HC' | 'CC';
  hcGameIndex: number;
  hcGamesTotal: number;
  gameId: string;
  phase: 'AwaitingHuman' | 'ComputerThinking' | 'GameOver' | 'BetweenGames';
}

export interface StateMessage {
  v: number;
  type: 'state';
  board: { n: number; a: number };
  occupancy: OccupancyEntry[];
  whiteReserve: number;
  blackReserve: number;
  sideToMove: 'White' | 'Black';
  moveCount: number;
}

export interface YourTurnMessage {
  v: number;
  type: 'yourTurn';
}

export interface MoveResultMessage {
  v: number;
  type: 'moveResult';
  accepted: boolean;
  move: string;
  rule?: string;
}

export interface GameOverMessage {
  v: number;
  type: 'gameOver';
  winner: 'White' | 'Black' | 'Draw';
  reason: string;
  moveCount: number;
}

export interface ErrorMessage {
  v: number;
  type: 'error';
  code: string;
  message: string;
}

export interface DoneMessage {
  v: number;
  type: 'done';
  ok: boolean;
}

export type ServerMessage =
  | HelloMessage
  | ProgressMessage
  | StateMessage
  | YourTurnMessage
  | MoveResultMessage
  | GameOverMessage
  | ErrorMessage
  | DoneMessage;

export interface MoveSubmission {
  v: number;
  type: 'move';
  move: string;
}

export function encodeMove(move: string): string {
  const message: MoveSubmission = { v: PROTOCOL_VERSION, type: 'move', move };
  return JSON.stringify(message) + '\n';
}

export function parseServerLine(line: string): ServerMessage {
  const message = JSON.parse(line) as ServerMessage;
  if (typeof message !== 'object' || message === null || typeof message.type !== 'string') {
    throw new Error(`not a protocol message: ${line}`);
  }
  return message;
}

// Splits a byte stream into complete lines, buffering partials.
export class LineSplitter {
  private buffer = '';

  push(chunk: string): string[] {
    this.buffer += chunk;
    const lines = this.buffer.split('\n');
    this.buffer = lines.pop() ?? '';
    return lines.filter((line) => line.trim().length > 0);
  }
}

// Cell naming matches the server: spreadsheet files, 1-based ranks.
export function cellName(x: number, y: number): string {
  let file = '';
  let v = x + 1;
  while (v > 0) {
    const r = (v - 1) % 26;
    file = String.fromCharCode(97 + r) + file;
    v = Math.floor((v - 1) / 26);
  }
  return `${file}${y + 1}`;
}

export function stepMove(fromX: number, fromY: number, toX: number, toY: number): string {
  return `${cellName(fromX, fromY)}-${cellName(toX, toY)}`;
}

export function exitMove(toX: number, toY: number): string {
  return `out-${cellName(toX, toY)}`;
}
