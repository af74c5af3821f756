// DOM rendering: a CSS grid of clickable cells, reserve counters, the move
// log, and stage progress. Re-rendered wholesale on every client change;
// boards are small enough that diffing would be overkill.

import { GameClient } from './client.js';
import { cellName } from './protocol.js';

export function renderInto(root: HTMLElement, client: GameClient): void {
  const render = () => {
    root.textContent = '';
    root.appendChild(banner(client));
    if (client.board !== null) {
      root.appendChild(boardGrid(client));
      root.appendChild(reserves(client));
    }
    root.appendChild(progressBar(client));
    root.appendChild(moveLog(client));
  };
  client.onChange(render);
  render();
}

function banner(client: GameClient): HTMLElement {
  const div = document.createElement('div');
  div.className = 'banner';
  switch (client.phase) {
    case 'connecting':
      div.textContent = 'connecting...';
      break;
    case 'incompatible':
      div.textContent = `server speaks protocol v${client.incompatibleVersion}; this client cannot continue`;
      div.classList.add('error');
      break;
    case 'yourTurn':
      div.textContent = 'your move (you play white)';
      div.classList.add('active');
      break;
    case 'gameOver':
      div.textContent = client.lastOutcome
        ? `game over: ${client.lastOutcome.winner} wins by ${client.lastOutcome.reason}`
        : 'game over';
      break;
    case 'done':
      div.textContent = 'training plan finished';
      break;
    default:
      div.textContent = 'waiting for the computer...';
  }
  return div;
}

function boardGrid(client: GameClient): HTMLElement {
  const board = client.board!;
  const grid = document.createElement('div');
  grid.className = 'board';
  grid.style.gridTemplateColumns = `repeat(${board.board.n}, 2.2rem)`;
  for (const cell of board.cells()) {
    const el = document.createElement('div');
    el.className = `cell ${cell.kind}`;
    if (cell.selected) el.classList.add('selected');
    if (cell.hint) el.classList.add('hint');
    el.title = cellName(cell.x, cell.y);
    if (cell.pawn !== null) {
      const pawn = document.createElement('span');
      pawn.className = `pawn ${cell.pawn.toLowerCase()}`;
      el.appendChild(pawn);
    }
    el.addEventListener('click', () => client.clickCell(cell.x, cell.y));
    grid.appendChild(el);
  }
  return grid;
}

function reserves(client: GameClient): HTMLElement {
  const board = client.board!;
  const div = document.createElement('div');
  div.className = 'reserves';
  div.textContent =
    `white reserve ${board.whiteReserve} | black reserve ${board.blackReserve}` +
    ` | ply ${board.moveCount}`;
  return div;
}

function progressBar(client: GameClient): HTMLElement {
  const div = document.createElement('div');
  div.className = 'progress';
  const p = client.progress;
  if (p !== null && p.gameKind === 'HC') {
    div.textContent = `${p.batchId}: stage ${p.stageIndex + 1}, game ${p.hcGameIndex + 1}/${p.hcGamesTotal}`;
  } else if (p !== null) {
    div.textContent = `${p.batchId}: stage ${p.stageIndex + 1}, self-play running`;
  }
  return div;
}

function moveLog(client: GameClient): HTMLElement {
  const list = document.createElement('ul');
  list.className = 'log';
  for (const entry of client.log.slice(-12)) {
    const item = document.createElement('li');
    item.className = entry.kind;
    item.textContent = entry.text;
    list.appendChild(item);
  }
  return list;
}
