"""Local session service for interactive human-vs-computer games.

The service runs a training plan and, whenever an interactive HC game
comes up, hands the white side to a connected client over a local TCP
socket speaking line-delimited JSON. One client session at a time; a
client that disconnects mid-game aborts that game (it is recorded as
aborted, excluded from statistics, and offered again on reconnect).

Server-to-client message types: hello, progress, state, yourTurn,
moveResult, gameOver, error, done. Client-to-server: move, quit. Every
message carries {"v": 1}. Full field-by-field schemas live in
docs/protocol.md.
"""

from __future__ import annotations

import json
import queue
import socket
import threading
from pathlib import Path

from .experiment import ExperimentPlan, PlanReport, TrainingHooks, run_plan
from .agents import ChannelClosedError
from .game import GameState, Move, format_move, parse_move, validate_move

PROTOCOL_VERSION = 1


class ServiceError(Exception):
    pass


class NoInteractiveStagesError(ServiceError):
    pass


class ServiceClosedError(ServiceError):
    """The service is shutting down; pending games cannot continue.

    Deliberately not a ChannelClosedError: a lost client aborts one game
    and waits for a reconnect, while shutdown must end the whole run.
    """


def _encode(message: dict) -> bytes:
    message.setdefault("v", PROTOCOL_VERSION)
    return (json.dumps(message, sort_keys=True, separators=(",", ":")) + "\n").encode("utf-8")


def state_message(state: GameState) -> dict:
    return {
        "v": PROTOCOL_VERSION,
        "type": "state",
        "board": {"n": state.config.n, "a": state.config.a},
        "occupancy": [
            {"x": x, "y": y, "color": color.value}
            for (x, y), color in sorted(state.occupancy.items())
        ],
        "whiteReserve": state.white_reserve,
        "blackReserve": state.black_reserve,
        "sideToMove": state.side_to_move.value,
        "moveCount": state.move_count,
    }


class SessionHub:
    """Single-session rendezvous between the running plan and one client.

    The orchestrator thread blocks in ``request_human_move`` while a handler
    thread feeds client messages into a queue. Phases follow the game:
    AwaitingHuman only while a move request is pending.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        # Serializes every wire write; taken before self._lock when both
        # are needed.
        self._send_lock = threading.Lock()
        self._client: socket.socket | None = None
        self._client_ready = threading.Condition(self._lock)
        self._inbox: "queue.Queue[dict | None]" = queue.Queue()
        self.phase = "BetweenGames"
        self.progress: dict = {}
        self.last_state: dict | None = None
        self.hello: dict = {}
        self.closed = False

    # -- client side -------------------------------------------------------

    def attach_client(self, conn: socket.socket) -> bool:
        """Register a client after streaming it the session snapshot.

        The hello/progress/state snapshot goes out before the client
        becomes visible to the orchestrator, so a pending move request
        can never interleave its own messages ahead of the snapshot.
        """
        with self._send_lock:
            with self._lock:
                if self.closed or self._client is not None:
                    return False
            try:
                conn.sendall(_encode(dict(self.hello)))
                if self.progress:
                    conn.sendall(_encode({**self.progress, "phase": self.phase}))
                if self.last_state is not None:
                    conn.sendall(_encode(dict(self.last_state)))
            except OSError:
                return False
            with self._lock:
                self._client = conn
                self._client_ready.notify_all()
        return True

    def detach_client(self, conn: socket.socket) -> None:
        with self._lock:
            if self._client is conn:
                self._client = None
        self._inbox.put(None)  # wake a pending move request

    def client_message(self, message: dict) -> None:
        self._inbox.put(message)

    # -- orchestrator side ---------------------------------------------------

    def _send_raw(self, message: dict) -> None:
        if not message:
            return
        with self._send_lock:
            with self._lock:
                client = self._client
            if client is None:
                return
            try:
                client.sendall(_encode(dict(message)))
            except OSError:
                pass
            else:
                return
        self.detach_client(client)

    def broadcast(self, message: dict) -> None:
        self._send_raw(message)

    def set_progress(self, progress: dict) -> None:
        self.progress = {"type": "progress", **progress}
        self._send_raw({**self.progress, "phase": self.phase})

    def notify_state(self, state: GameState) -> None:
        self.last_state = state_message(state)
        self._send_raw(self.last_state)

    def _wait_for_client(self) -> None:
        with self._lock:
            while self._client is None and not self.closed:
                self._client_ready.wait(timeout=0.5)
            if self.closed:
                raise ServiceClosedError("service shutting down")

    def request_human_move(self, state: GameState) -> Move:
        """Block until the connected client submits a legal move."""
        self._wait_for_client()
        # Flush moves queued outside our turn.
        while True:
            try:
                self._inbox.get_nowait()
            except queue.Empty:
                break
        self.phase = "AwaitingHuman"
        self.notify_state(state)
        self._send_raw({"type": "yourTurn"})
        try:
            while True:
                message = self._inbox.get()
                if self.closed:
                    raise ServiceClosedError("service shutting down")
                if message is None:
                    raise ChannelClosedError("client disconnected")
                if message.get("type") == "quit":
                    raise ChannelClosedError("client quit")
                if message.get("type") != "move":
                    self._send_raw({"type": "error", "code": "WrongPhase",
                                    "message": f"unexpected message {message.get('type')!r}"})
                    continue
                text = message.get("move", "")
                try:
                    move = parse_move(str(text))
                except ValueError as exc:
                    self._send_raw({"type": "error", "code": "MalformedMove", "message": str(exc)})
                    continue
                rule = validate_move(state, move)
                if rule is not None:
                    self._send_raw({"type": "moveResult", "accepted": False,
                                    "move": format_move(move), "rule": rule})
                    continue
                self._send_raw({"type": "moveResult", "accepted": True, "move": format_move(move)})
                return move
        finally:
            self.phase = "ComputerThinking"

    def close(self) -> None:
        with self._lock:
            self.closed = True
            client = self._client
            self._client_ready.notify_all()
        self._inbox.put(None)
        if client is not None:
            try:
                client.close()
            except OSError:
                pass


class SessionHuman:
    """Agent adapter: the white human playing through the session hub."""

    kind = "InteractiveService"
    learning = False

    def __init__(self, hub: SessionHub):
        self._hub = hub

    def select_move(self, state: GameState, rng) -> Move:
        return self._hub.request_human_move(state)


class _ServiceHooks(TrainingHooks):
    """Streams interactive games to the session and keeps progress fresh."""

    def __init__(self, hub: SessionHub):
        self.hub = hub
        self._streaming = False

    def on_game_start(self, meta: dict, state) -> None:
        interactive = bool(meta.get("interactive"))
        self._streaming = interactive
        if interactive or meta.get("game_kind") == "HC":
            self.hub.phase = "AwaitingHuman" if interactive else "ComputerThinking"
        self.hub.set_progress({
            "batchId": meta.get("batch_id"),
            "stageIndex": meta.get("stage_index"),
            "gameKind": meta.get("game_kind"),
            "hcGameIndex": meta.get("hc_game_index"),
            "hcGamesTotal": meta.get("hc_games_total"),
            "gameId": meta.get("game_id"),
        })

    def on_ply(self, meta: dict, move, result) -> None:
        if self._streaming:
            self.hub.notify_state(result.next_state)

    def on_game_end(self, meta: dict, record) -> None:
        if not self._streaming:
            return
        if record.aborted:
            self.hub.broadcast({"type": "error", "code": "Aborted",
                                "message": "game aborted; it will be offered again"})
        else:
            outcome = record.outcome
            self.hub.phase = "GameOver"
            self.hub.broadcast({
                "type": "gameOver",
                "winner": outcome.winner_name,
                "reason": outcome.reason.value,
                "moveCount": outcome.final_move_count,
            })
        self.hub.phase = "BetweenGames"
        self._streaming = False


class PlayService:
    """Socket server plus plan execution."""

    def __init__(self, plan: ExperimentPlan, out_root: str | Path, bind: tuple[str, int]):
        if not any(b.human_agent == "Interactive" for b in plan.batches):
            raise NoInteractiveStagesError("plan has no interactive HC batches to serve")
        self.plan = plan
        self.out_root = Path(out_root)
        self.hub = SessionHub()
        self.hub.hello = {
            "v": PROTOCOL_VERSION,
            "type": "hello",
            "protocol": PROTOCOL_VERSION,
            "board": {"n": plan.board.n, "a": plan.board.a, "beta": plan.board.beta},
        }
        self._server = socket.create_server(bind)
        self._accept_thread = threading.Thread(target=self._accept_loop, daemon=True)

    @property
    def address(self) -> tuple[str, int]:
        return self._server.getsockname()[:2]

    def _accept_loop(self) -> None:
        while not self.hub.closed:
            try:
                conn, _addr = self._server.accept()
            except OSError:
                return
            if not self.hub.attach_client(conn):
                try:
                    conn.sendall(_encode({
                        "type": "error", "code": "SessionConflict",
                        "message": "another client holds this session",
                    }))
                    conn.close()
                except OSError:
                    pass
                continue
            threading.Thread(target=self._client_loop, args=(conn,), daemon=True).start()

    def _client_loop(self, conn: socket.socket) -> None:
        try:
            with conn.makefile("r", encoding="utf-8") as reader:
                for line in reader:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        message = json.loads(line)
                    except json.JSONDecodeError:
                        self.hub.broadcast({"type": "error", "code": "MalformedMove",
                                            "message": "message is not valid JSON"})
                        continue
                    self.hub.client_message(message)
        except OSError:
            pass
        finally:
            self.hub.detach_client(conn)

    def run(self, *, resume: bool = False) -> PlanReport:
        self._accept_thread.start()
        try:
            report = run_plan(
                self.plan,
                self.out_root,
                resume=resume,
                interactive_factory=lambda: SessionHuman(self.hub),
                hooks=_ServiceHooks(self.hub),
            )
            self.hub.broadcast({"type": "done", "ok": report.ok})
            return report
        finally:
            self.close()

    def close(self) -> None:
        self.hub.close()
        try:
            self._server.close()
        except OSError:
            pass


def serve(plan: ExperimentPlan, out_root: str | Path, bind: tuple[str, int],
          *, resume: bool = False) -> PlanReport:
    service = PlayService(plan, out_root, bind)
    host, port = service.address
    print(f"serving interactive plan on {host}:{port}", flush=True)
    return service.run(resume=resume)
