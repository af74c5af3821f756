// Session client: a pure protocol state machine over an injected transport.
// The browser wires it to a WebSocket, the tests wire it to a TCP socket or
// a fake; either way the client never mutates game state locally, it only
// reflects what the server streamed.

import { BoardViewModel } from './board.js';
import {
  GameOverMessage,
  LineSplitter,
  PROTOCOL_VERSION,
  ProgressMessage,
  ServerMessage,
  encodeMove,
  parseServerLine,
} from './protocol.js';

export interface Transport {
  send(data: string): void;
  close(): void;
}

export type ClientPhase =
  | 'connecting'
  | 'waiting'
  | 'yourTurn'
  | 'gameOver'
  | 'done'
  | 'incompatible';

export interface LogEntry {
  kind: 'move' | 'rejected' | 'info' | 'error';
  text: string;
}

export class GameClient {
  phase: ClientPhase = 'connecting';
  board: BoardViewModel | null = null;
  progress: ProgressMessage | null = null;
  lastOutcome: GameOverMessage | null = null;
  log: LogEntry[] = [];
  pendingMove: string | null = null;
  incompatibleVersion: number | null = null;

  private transport: Transport | null = null;
  private splitter = new LineSplitter();
  private listeners: Array<() => void> = [];

  attach(transport: Transport): void {
    this.transport = transport;
  }

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  private push(kind: LogEntry['kind'], text: string): void {
    this.log.push({ kind, text });
    if (this.log.length > 200) this.log.shift();
  }

  receiveChunk(chunk: string): void {
    for (const line of this.splitter.push(chunk)) {
      this.handleMessage(parseServerLine(line));
    }
  }

  handleMessage(message: ServerMessage): void {
    if (message.v !== PROTOCOL_VERSION) {
      this.phase = 'incompatible';
      this.incompatibleVersion = message.v;
      this.push('error', `protocol version ${message.v} is not supported`);
      this.notify();
      return;
    }
    switch (message.type) {
      case 'hello':
        this.board = new BoardViewModel(message.board);
        this.phase = 'waiting';
        this.push('info', `connected: ${message.board.n}x${message.board.n} board`);
        break;
      case 'progress':
        this.progress = message;
        if (this.phase !== 'yourTurn') this.phase = 'waiting';
        break;
      case 'state':
        if (this.board) this.board.applyState(message);
        break;
      case 'yourTurn':
        this.phase = 'yourTurn';
        break;
      case 'moveResult':
        this.pendingMove = null;
        if (message.accepted) {
          this.push('move', message.move);
          this.phase = 'waiting';
        } else {
          this.push('rejected', `${message.move} rejected: ${message.rule ?? 'illegal'}`);
          this.phase = 'yourTurn'; // still our move
        }
        break;
      case 'gameOver':
        this.lastOutcome = message;
        this.phase = 'gameOver';
        this.push('info', `game over: ${message.winner} (${message.reason}) in ${message.moveCount} moves`);
        break;
      case 'error':
        this.push('error', `${message.code}: ${message.message}`);
        break;
      case 'done':
        this.phase = 'done';
        this.push('info', message.ok ? 'training plan finished' : 'training plan failed');
        break;
    }
    this.notify();
  }

  // Returns false when a submission is not possible right now.
  submitMove(move: string): boolean {
    if (this.phase !== 'yourTurn' || this.pendingMove !== null || this.transport === null) {
      return false;
    }
    this.pendingMove = move;
    this.transport.send(encodeMove(move));
    this.notify();
    return true;
  }

  // Click-to-move: selection handled by the board model, submission here.
  clickCell(x: number, y: number): void {
    if (this.board === null || this.phase !== 'yourTurn') return;
    const move = this.board.click(x, y);
    this.notify();
    if (move !== null) this.submitMove(move);
  }
}
