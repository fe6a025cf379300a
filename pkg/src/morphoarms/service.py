"""WebSocket teleoperation service.

Exposes a live simulated session over one socket endpoint: the first client
to claim the operator role may submit commands (or stream raw hand samples
that the server maps to commands); every other client observes.  World
snapshots are broadcast at a fixed divisor of the simulation tick rate with
latest-state-wins semantics.

Routes:
    WS  /ws         command/hand intake plus snapshot broadcast
    GET /healthz    liveness probe, returns "ok"
    GET /scenario   the active scenario as JSON
"""

from __future__ import annotations

import asyncio
import itertools
import json
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from typing import Dict, Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import PlainTextResponse

from .config import RobotConfig, default_config
from .scenario import Scenario, segment_metrics
from .teleop import (
    CommandKind,
    Hand,
    HandSample,
    SubmitResult,
    ack_to_json,
    command_from_json,
    map_gesture,
)
from .world import Simulation

BROADCAST_DIVISOR = 5  # 50 Hz sim -> 10 Hz snapshots


@dataclass
class ClientSession:
    """One connected socket client."""

    id: int
    socket: WebSocket
    role: str = "observer"
    connected_at: float = 0.0
    hand_armed: Dict[Hand, bool] = field(
        default_factory=lambda: {Hand.LEFT: True, Hand.RIGHT: True}
    )


class TeleopService:
    """Shared state behind the socket endpoints."""

    def __init__(
        self,
        config: RobotConfig,
        scenario: Scenario,
        tick_interval: Optional[float] = None,
    ):
        self.config = config
        self.scenario = scenario
        self.sim = Simulation(config, scenario.layout())
        self.tick_interval = (
            tick_interval if tick_interval is not None else 1.0 / config.gait.tick_rate
        )
        self.clients: Dict[int, ClientSession] = {}
        self.operator_id: Optional[int] = None
        self._ids = itertools.count(1)
        self._task: Optional[asyncio.Task] = None

    # -- sim loop -------------------------------------------------------------

    async def run_loop(self) -> None:
        try:
            while True:
                self.sim.tick()
                if self.sim.tick_count % BROADCAST_DIVISOR == 0:
                    await self.broadcast_snapshot()
                await asyncio.sleep(self.tick_interval)
        except asyncio.CancelledError:
            pass

    def snapshot_message(self) -> dict:
        metrics = segment_metrics(self.sim.events, tick_rate=self.sim.tick_rate).to_dict()
        doc = self.sim.snapshot(metrics=metrics)
        doc["type"] = "snapshot"
        return doc

    async def broadcast_snapshot(self) -> None:
        message = self.snapshot_message()
        dead = []
        for client in list(self.clients.values()):
            try:
                await client.socket.send_json(message)
            except Exception:
                dead.append(client.id)
        for client_id in dead:
            self.drop_client(client_id)

    # -- clients ---------------------------------------------------------------

    def add_client(self, socket: WebSocket) -> ClientSession:
        client = ClientSession(
            id=next(self._ids), socket=socket, connected_at=self.sim.clock
        )
        self.clients[client.id] = client
        return client

    def drop_client(self, client_id: int) -> None:
        self.clients.pop(client_id, None)
        if self.operator_id == client_id:
            self.operator_id = None

    def claim_operator(self, client: ClientSession) -> bool:
        if self.operator_id is not None and self.operator_id != client.id:
            return False
        self.operator_id = client.id
        client.role = "operator"
        return True

    # -- message handling ---------------------------------------------------------

    async def handle_message(self, client: ClientSession, raw: str) -> None:
        try:
            payload = json.loads(raw)
            if not isinstance(payload, dict):
                raise ValueError("message must be a JSON object")
            kind = payload.get("type")
        except (json.JSONDecodeError, ValueError):
            await client.socket.send_json({"type": "error", "error": "malformed"})
            return

        if kind == "claim":
            granted = self.claim_operator(client)
            if granted:
                await client.socket.send_json({"type": "role", "role": "operator"})
            else:
                await client.socket.send_json({"type": "error", "error": "role_denied"})
        elif kind == "command":
            await self._handle_command(client, payload)
        elif kind == "hand":
            await self._handle_hand(client, payload)
        else:
            await client.socket.send_json({"type": "error", "error": "malformed"})

    async def _handle_command(self, client: ClientSession, payload: dict) -> None:
        if client.role != "operator":
            await client.socket.send_json({"type": "error", "error": "observer_role"})
            return
        try:
            cmd = command_from_json(payload)
        except ValueError:
            await client.socket.send_json({"type": "error", "error": "malformed"})
            return
        result = self.sim.submit(cmd)
        await client.socket.send_json(ack_to_json(result))
        if (
            result is SubmitResult.ACCEPTED
            and cmd.kind is CommandKind.ARM_JOG
            and not self.sim._jog_ok
        ):
            await client.socket.send_json({"type": "error", "error": "out_of_reach"})

    async def _handle_hand(self, client: ClientSession, payload: dict) -> None:
        if client.role != "operator":
            await client.socket.send_json({"type": "error", "error": "observer_role"})
            return
        try:
            hand = Hand(payload["hand"])
            pos = payload["pos"]
            sample = HandSample(
                hand=hand,
                position=(float(pos[0]), float(pos[1]), float(pos[2])),
                timestamp=self.sim.clock,
            )
        except (KeyError, TypeError, ValueError, IndexError):
            await client.socket.send_json({"type": "error", "error": "malformed"})
            return
        cmd = map_gesture(sample, self.sim.engine.mode, self.config.teleop)
        if cmd is None:
            client.hand_armed[hand] = True
            return
        if not client.hand_armed[hand]:
            return
        client.hand_armed[hand] = False
        result = self.sim.submit(cmd)
        await client.socket.send_json(ack_to_json(result))


def create_app(
    config: Optional[RobotConfig] = None,
    scenario: Optional[Scenario] = None,
    tick_interval: Optional[float] = None,
) -> FastAPI:
    """Build the FastAPI application around a fresh simulation."""
    if config is None:
        config = default_config()
    if scenario is None:
        scenario = Scenario()
    service = TeleopService(config, scenario, tick_interval=tick_interval)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        service._task = asyncio.create_task(service.run_loop())
        yield
        service._task.cancel()
        try:
            await service._task
        except asyncio.CancelledError:
            pass

    app = FastAPI(lifespan=lifespan)
    app.state.service = service

    @app.get("/healthz", response_class=PlainTextResponse)
    async def healthz() -> str:
        return "ok"

    @app.get("/scenario")
    async def get_scenario() -> dict:
        return service.scenario.to_dict()

    @app.websocket("/ws")
    async def ws_endpoint(socket: WebSocket) -> None:
        await socket.accept()
        client = service.add_client(socket)
        await socket.send_json(service.snapshot_message())
        try:
            while True:
                raw = await socket.receive_text()
                await service.handle_message(client, raw)
        except WebSocketDisconnect:
            pass
        finally:
            service.drop_client(client.id)

    return app
