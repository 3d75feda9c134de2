"""WebSocket event service.

Serves decoded Joy-Con events as JSON text frames on ``/ws``.  Every
connection is greeted with ``{"type":"hello","version":1}``; after that the
stream carries button/imu/jump events.  Clients may send
``{"type":"ping"}`` and get ``{"type":"pong"}``; anything else from a client
is ignored.

Two source modes:

* precomputed: a replay log decoded up front; every client receives the
  complete, identical stream on connect (virtual time).
* live: a producer thread (realtime replay or the keyboard simulator)
  broadcasts to all currently-connected clients through bounded per-client
  queues; a client that falls more than ``QUEUE_LIMIT`` messages behind is
  disconnected.
"""

from __future__ import annotations

import asyncio
import json
import logging
import sys
import threading
import time
from contextlib import asynccontextmanager
from typing import Iterable, Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from . import joycon
from .jump import JumpConfig
from .pipeline import JoyConPipeline, replay_events
from .transport import ReplayRecord

logger = logging.getLogger(__name__)

__all__ = ["PROTOCOL_VERSION", "QUEUE_LIMIT", "Broadcaster", "create_app"]

PROTOCOL_VERSION = 1
QUEUE_LIMIT = 1024

HELLO = {"type": "hello", "version": PROTOCOL_VERSION}

_CLOSE = object()  # sentinel pushed to a queue to force-disconnect its client


class Broadcaster:
    """Fan-out of event dicts to per-client queues, callable from any thread."""

    def __init__(self, limit: int = QUEUE_LIMIT) -> None:
        self.limit = limit
        self._clients: set[asyncio.Queue] = set()
        self._lock = threading.Lock()
        self._loop: Optional[asyncio.AbstractEventLoop] = None

    def attach_loop(self, loop: asyncio.AbstractEventLoop) -> None:
        self._loop = loop

    def register(self) -> asyncio.Queue:
        queue: asyncio.Queue = asyncio.Queue()
        with self._lock:
            self._clients.add(queue)
        return queue

    def unregister(self, queue: asyncio.Queue) -> None:
        with self._lock:
            self._clients.discard(queue)

    def publish(self, event: dict) -> None:
        """Enqueue for every client; queues over the limit get closed."""
        with self._lock:
            clients = list(self._clients)
            for queue in clients:
                if queue.qsize() >= self.limit:
                    self._clients.discard(queue)
                    queue.put_nowait(_CLOSE)
                    logger.warning("disconnecting client %d messages behind", self.limit)
                else:
                    queue.put_nowait(event)

    def publish_threadsafe(self, event: dict) -> None:
        loop = self._loop
        if loop is None or loop.is_closed():
            return
        loop.call_soon_threadsafe(self.publish, event)


async def _client_reader(websocket: WebSocket, send_lock: asyncio.Lock) -> None:
    # answers pings, ignores everything else, returns on disconnect
    while True:
        text = await websocket.receive_text()
        try:
            message = json.loads(text)
        except json.JSONDecodeError:
            continue
        if isinstance(message, dict) and message.get("type") == "ping":
            async with send_lock:
                await websocket.send_text(json.dumps({"type": "pong"}))


def _dumps(event: dict) -> str:
    return json.dumps(event, separators=(",", ":"))


def create_app(
    precomputed: Optional[list[dict]] = None,
    broadcaster: Optional[Broadcaster] = None,
    producer: Optional[threading.Thread] = None,
) -> FastAPI:
    """Build the service app.

    ``precomputed`` serves a fixed stream to every client; ``broadcaster``
    (plus an optional ``producer`` thread started once the loop is up) serves
    live events.  Both may be omitted, leaving a hello-and-ping-only service.
    """
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if broadcaster is not None:
            broadcaster.attach_loop(asyncio.get_running_loop())
        if producer is not None:
            producer.start()
        yield

    app = FastAPI(lifespan=lifespan)
    app.state.precomputed = precomputed
    app.state.broadcaster = broadcaster

    @app.get("/healthz")
    async def healthz() -> dict:
        return {"ok": True, "version": PROTOCOL_VERSION}

    @app.websocket("/ws")
    async def ws_events(websocket: WebSocket) -> None:
        await websocket.accept()
        if broadcaster is not None:
            broadcaster.attach_loop(asyncio.get_running_loop())
        send_lock = asyncio.Lock()
        reader = asyncio.create_task(_client_reader(websocket, send_lock))
        queue = broadcaster.register() if broadcaster is not None else None
        try:
            async with send_lock:
                await websocket.send_text(_dumps(HELLO))
            if precomputed is not None:
                for event in precomputed:
                    async with send_lock:
                        await websocket.send_text(_dumps(event))
            if queue is not None:
                while not reader.done():
                    getter = asyncio.ensure_future(queue.get())
                    await asyncio.wait({getter, reader}, return_when=asyncio.FIRST_COMPLETED)
                    if not getter.done():
                        getter.cancel()  # client went away with nothing queued
                        break
                    event = getter.result()
                    if event is _CLOSE:
                        await websocket.close(code=1013)
                        break
                    async with send_lock:
                        await websocket.send_text(_dumps(event))
            else:
                await reader  # nothing more to send; serve pings until close
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            if queue is not None and broadcaster is not None:
                broadcaster.unregister(queue)
            if reader.done() and not reader.cancelled():
                reader.exception()  # consume the disconnect, if any
            else:
                reader.cancel()

    return app


def realtime_replay_producer(
    records: list[ReplayRecord],
    broadcaster: Broadcaster,
    jump_config: Optional[JumpConfig] = None,
) -> threading.Thread:
    """Thread that replays a log on the wall clock, broadcasting each event."""

    def run() -> None:
        pipeline = JoyConPipeline(broadcaster.publish_threadsafe, jump_config=jump_config)
        start = time.monotonic()
        for record in records:
            delay = record.t_ms / 1000.0 - (time.monotonic() - start)
            if delay > 0:
                time.sleep(delay)
            pipeline.inject(record.report_id, record.data, at_ms=record.t_ms)

    return threading.Thread(target=run, name="replay-producer", daemon=True)


def stdin_sim_producer(
    broadcaster: Broadcaster,
    jump_config: Optional[JumpConfig] = None,
    lines: Optional[Iterable[str]] = None,
) -> threading.Thread:
    """Keyboard simulator: each stdin line fires one A press and one jump spike.

    Lets the game be played without hardware: hit space+Enter to jump.
    """

    def run() -> None:
        pipeline = JoyConPipeline(broadcaster.publish_threadsafe, jump_config=jump_config)
        spike_raw = int(2.5 / joycon.ACCEL_G_PER_LSB)
        rest_raw = int(1.0 / joycon.ACCEL_G_PER_LSB)
        t_ms = 0
        source = lines if lines is not None else sys.stdin
        for _ in source:
            pipeline.inject(joycon.SIMPLE_MODE_REPORT_ID, bytes([0x01]), at_ms=t_ms)
            rest = (0, 0, rest_raw, 0, 0, 0)
            spike = (0, 0, spike_raw, 0, 0, 0)
            body = joycon.build_standard_report(raw_frames=(rest, spike, rest))
            pipeline.inject(joycon.STANDARD_MODE_REPORT_ID, body, at_ms=t_ms + 5)
            # settle back below the re-arm threshold before the next press
            body = joycon.build_standard_report(raw_frames=(rest, rest, rest))
            pipeline.inject(joycon.STANDARD_MODE_REPORT_ID, body, at_ms=t_ms + 25)
            t_ms += 500

    return threading.Thread(target=run, name="stdin-sim", daemon=True)
