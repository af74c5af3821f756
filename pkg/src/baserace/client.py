"""Terminal client for the play service.

Connects to a serving run, renders each streamed position, and forwards
typed moves. This is the fallback interface for interactive HC stages
when no browser client is around.
"""

from __future__ import annotations

import json
import socket
import sys
import threading

from .game import BoardConfig, Color, GameState, render_ascii


def _state_from_message(message: dict, beta: int) -> GameState:
    board = message["board"]
    occupancy = {
        (entry["x"], entry["y"]): Color(entry["color"]) for entry in message["occupancy"]
    }
    return GameState(
        config=BoardConfig(board["n"], board["a"], beta),
        occupancy=occupancy,
        white_reserve=message["whiteReserve"],
        black_reserve=message["blackReserve"],
        side_to_move=Color(message["sideToMove"]),
        move_count=message["moveCount"],
    )


class PlayClient:
    def __init__(self, host: str, port: int, out=sys.stdout):
        self._sock = socket.create_connection((host, port))
        self._out = out
        self._beta = 0
        self.done = threading.Event()

    def _emit(self, text: str) -> None:
        self._out.write(text + "\n")
        self._out.flush()

    def _handle(self, message: dict) -> None:
        kind = message.get("type")
        if kind == "hello":
            self._beta = message["board"]["beta"]
            self._emit(f"connected: board {message['board']}")
        elif kind == "progress":
            self._emit(
                f"[{message.get('batchId')}] stage {message.get('stageIndex')} "
                f"{message.get('gameKind')} game {message.get('hcGameIndex')}"
                f"/{message.get('hcGamesTotal')} ({message.get('phase')})"
            )
        elif kind == "state":
            self._emit(render_ascii(_state_from_message(message, self._beta)))
        elif kind == "yourTurn":
            self._emit("your move (e.g. c3-c4, out-b3):")
        elif kind == "moveResult":
            if message.get("accepted"):
                self._emit(f"accepted: {message.get('move')}")
            else:
                self._emit(f"rejected ({message.get('rule')}): {message.get('move')}")
        elif kind == "gameOver":
            self._emit(
                f"game over: {message.get('winner')} ({message.get('reason')}) "
                f"after {message.get('moveCount')} moves"
            )
        elif kind == "error":
            self._emit(f"error [{message.get('code')}]: {message.get('message')}")
        elif kind == "done":
            self._emit("plan finished")
            self.done.set()

    def _reader(self) -> None:
        try:
            with self._sock.makefile("r", encoding="utf-8") as stream:
                for line in stream:
                    line = line.strip()
                    if line:
                        self._handle(json.loads(line))
        except OSError:
            pass
        finally:
            self.done.set()

    def run(self, in_stream=sys.stdin) -> None:
        threading.Thread(target=self._reader, daemon=True).start()
        try:
            for line in in_stream:
                text = line.strip()
                if not text:
                    continue
                if text in ("quit", "exit"):
                    self._send({"type": "quit"})
                    break
                self._send({"type": "move", "move": text})
                if self.done.is_set():
                    break
        finally:
            try:
                self._sock.close()
            except OSError:
                pass

    def _send(self, message: dict) -> None:
        message.setdefault("v", 1)
        self._sock.sendall((json.dumps(message) + "\n").encode("utf-8"))


def play(address: str) -> int:
    host, _, port = address.rpartition(":")
    client = PlayClient(host or "127.0.0.1", int(port))
    client.run()
    return 0
