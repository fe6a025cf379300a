import time

import pytest
from starlette.testclient import TestClient

from morphoarms.config import default_config
from morphoarms.scenario import Scenario
from morphoarms.service import create_app

# Fast wall-clock pacing so command completions arrive quickly in tests.
FAST_TICK = 0.0002


@pytest.fixture()
def client():
    app = create_app(
        default_config(),
        Scenario(ball_start=(0.6, 0.0), box_position=(0.6, 0.12), robot_heading=0.0),
        tick_interval=FAST_TICK,
    )
    with TestClient(app) as test_client:
        yield test_client


def recv_until(ws, predicate, attempts=500):
    for _ in range(attempts):
        message = ws.receive_json()
        if predicate(message):
            return message
    raise AssertionError("expected message never arrived")


def recv_type(ws, kind, attempts=500):
    return recv_until(ws, lambda m: m.get("type") == kind, attempts)


def claim_operator(ws):
    ws.send_json({"type": "claim", "role": "operator"})
    return recv_until(ws, lambda m: m.get("type") in ("role", "error"))


class TestHttpEndpoints:
    def test_healthz(self, client):
        response = client.get("/healthz")
        assert response.status_code == 200
        assert response.text == "ok"

    def test_scenario_endpoint(self, client):
        response = client.get("/scenario")
        assert response.status_code == 200
        doc = response.json()
        assert doc["ball_start"] == [0.6, 0.0]
        assert doc["box_position"] == [0.6, 0.12]


class TestRoles:
    def test_first_claim_wins_second_denied(self, client):
        with client.websocket_connect("/ws") as ws_a:
            assert claim_operator(ws_a)["type"] == "role"
            with client.websocket_connect("/ws") as ws_b:
                denied = claim_operator(ws_b)
                assert denied == {"type": "error", "error": "role_denied"}

    def test_observer_commands_rejected(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.send_json({"type": "command", "name": "step_forward"})
            message = recv_until(
                ws, lambda m: m.get("type") in ("error", "ack")
            )
            assert message == {"type": "error", "error": "observer_role"}

    def test_role_freed_after_disconnect(self, client):
        with client.websocket_connect("/ws") as ws_a:
            assert claim_operator(ws_a)["type"] == "role"
        time.sleep(0.05)
        with client.websocket_connect("/ws") as ws_b:
            assert claim_operator(ws_b)["type"] == "role"

    def test_command_survives_operator_disconnect(self, client):
        with client.websocket_connect("/ws") as ws_a:
            claim_operator(ws_a)
            ws_a.send_json({"type": "command", "name": "step_forward"})
            assert recv_type(ws_a, "ack")["result"] == "accepted"
        # The operator is gone; the robot keeps walking and finishes.
        time.sleep(0.1)
        with client.websocket_connect("/ws") as ws_b:
            assert claim_operator(ws_b)["type"] == "role"
            done = recv_until(
                ws_b,
                lambda m: m.get("type") == "snapshot" and not m.get("busy"),
                attempts=3000,
            )
            assert abs(done["body"]["x"]) + abs(done["body"]["y"]) > 0.1


class TestCommands:
    def test_command_ack_and_busy_snapshot(self, client):
        with client.websocket_connect("/ws") as ws:
            claim_operator(ws)
            ws.send_json({"type": "command", "name": "step_forward"})
            ack = recv_type(ws, "ack")
            assert ack["result"] == "accepted"
            snap = recv_until(
                ws, lambda m: m.get("type") == "snapshot" and m.get("busy")
            )
            assert snap["busy"] is True

    def test_busy_rejection_ack(self, client):
        with client.websocket_connect("/ws") as ws:
            claim_operator(ws)
            ws.send_json({"type": "command", "name": "step_forward"})
            first = recv_type(ws, "ack")
            assert first["result"] == "accepted"
            ws.send_json({"type": "command", "name": "step_left"})
            second = recv_type(ws, "ack")
            assert second["result"] == "rejected_busy"

    def test_wrong_mode_command_ack(self, client):
        with client.websocket_connect("/ws") as ws:
            claim_operator(ws)
            ws.send_json({"type": "command", "name": "gripper_close"})
            ack = recv_type(ws, "ack")
            assert ack["result"] == "rejected_wrong_mode"

    def test_each_command_gets_exactly_one_ack(self, client):
        with client.websocket_connect("/ws") as ws:
            claim_operator(ws)
            sent = 5
            for _ in range(sent):
                ws.send_json({"type": "command", "name": "step_forward"})
            acks = 0
            deadline_attempts = 2000
            while acks < sent and deadline_attempts:
                message = ws.receive_json()
                if message.get("type") == "ack":
                    acks += 1
                deadline_attempts -= 1
            assert acks == sent

    def test_malformed_message_keeps_connection(self, client):
        with client.websocket_connect("/ws") as ws:
            claim_operator(ws)
            ws.send_text("this is not json")
            err = recv_type(ws, "error")
            assert err["error"] == "malformed"
            ws.send_json({"type": "command", "name": "step_forward"})
            assert recv_type(ws, "ack")["result"] == "accepted"

    def test_snapshot_clock_monotone(self, client):
        with client.websocket_connect("/ws") as ws:
            clocks = []
            while len(clocks) < 6:
                message = ws.receive_json()
                if message.get("type") == "snapshot":
                    clocks.append(message["clock"])
            assert clocks == sorted(clocks)

    def test_snapshot_schema(self, client):
        with client.websocket_connect("/ws") as ws:
            snap = recv_type(ws, "snapshot")
            assert snap["v"] == 1
            for key in ("clock", "mode", "busy", "body", "joints", "ball", "box",
                        "trial_count", "metrics"):
                assert key in snap


class TestHandSamples:
    def test_hand_stream_maps_to_command(self, client):
        with client.websocket_connect("/ws") as ws:
            claim_operator(ws)
            ws.send_json({"type": "hand", "hand": "right", "pos": [0.3, 0.0, 0.0]})
            ack = recv_type(ws, "ack")
            assert ack["result"] == "accepted"

    def test_hand_rearm_requires_dead_zone_return(self, client):
        with client.websocket_connect("/ws") as ws:
            claim_operator(ws)
            # Two reaches without returning home: only one command fires.
            ws.send_json({"type": "hand", "hand": "right", "pos": [0.3, 0.0, 0.0]})
            first = recv_type(ws, "ack")
            assert first["result"] == "accepted"
            ws.send_json({"type": "hand", "hand": "right", "pos": [0.31, 0.0, 0.0]})
            ws.send_json({"type": "hand", "hand": "right", "pos": [0.0, 0.0, 0.0]})
            ws.send_json({"type": "hand", "hand": "right", "pos": [0.3, 0.0, 0.0]})
            second = recv_type(ws, "ack")
            # The re-armed reach lands while the step is still executing.
            assert second["result"] == "rejected_busy"

    def test_dead_zone_sample_is_silent(self, client):
        with client.websocket_connect("/ws") as ws:
            claim_operator(ws)
            ws.send_json({"type": "hand", "hand": "left", "pos": [0.01, 0.0, 0.0]})
            ws.send_json({"type": "command", "name": "step_forward"})
            # The next non-snapshot message must be the command ack, proving
            # the dead-zone sample produced nothing.
            message = recv_until(ws, lambda m: m.get("type") != "snapshot")
            assert message["type"] == "ack"

    def test_malformed_hand_sample(self, client):
        with client.websocket_connect("/ws") as ws:
            claim_operator(ws)
            ws.send_json({"type": "hand", "hand": "upper", "pos": [0, 0, 0]})
            err = recv_type(ws, "error")
            assert err["error"] == "malformed"
