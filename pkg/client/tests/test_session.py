"""Unit tests against a scripted in-process fake service (no real gym)."""

from __future__ import annotations

import json
import socket
import threading

import pytest

from gymclient import (
    ClientSession,
    NeedsResetError,
    NotFoundError,
    ProtocolError,
    StepAfterDoneError,
    export_records,
)
from gymclient.session import EpisodeRecord, Observation, StepResult


class FakeService(threading.Thread):
    """Answers each incoming line using a handler function."""

    def __init__(self, handler):
        super().__init__(daemon=True)
        self.handler = handler
        self.listener = socket.create_server(("127.0.0.1", 0))
        self.port = self.listener.getsockname()[1]

    def run(self):
        conn, _ = self.listener.accept()
        fh = conn.makefile("rw", encoding="utf-8")
        for line in fh:
            reply = self.handler(json.loads(line))
            if reply is None:
                break
            fh.write(json.dumps(reply) + "\n")
            fh.flush()
        conn.close()


def result(msg, payload):
    return {"op": "result", "request_id": msg["request_id"], "session_id": "s-1", "payload": payload}


def error(msg, code, message=""):
    return {"op": "error", "request_id": msg["request_id"], "session_id": "s-1", "payload": {"code": code, "message": message}}


def default_handler(msg):
    if msg["op"] == "hello":
        return result(msg, {"server": "fake", "session_id": "s-1"})
    if msg["op"] == "reset":
        return result(msg, {"env_id": "env-1", "question": "Q?", "tools": [{"name": "t"}], "n_sub_questions": 1})
    if msg["op"] == "step":
        return result(msg, {"tool_responses": [], "reward": -0.5, "turn_stats": {"p": 0}, "done": True, "outcome": "empty", "stats": {"solve_f1": 0.0}})
    if msg["op"] == "close":
        return result(msg, {"closed": True})
    return error(msg, "UNKNOWN_OP")


@pytest.fixture()
def session():
    service = FakeService(default_handler)
    service.start()
    sess = ClientSession.connect("127.0.0.1", service.port)
    yield sess
    sess.close()


class TestSession:
    def test_hello_handshake(self, session):
        assert session.session_id == "s-1"

    def test_reset_returns_observation(self, session):
        obs = session.reset(env_id="env-1")
        assert obs.env_id == "env-1"
        assert obs.question == "Q?"
        assert obs.tools[0]["name"] == "t"

    def test_step_mirrors_service_payload(self, session):
        session.reset(env_id="env-1")
        res = session.step("")
        assert res.reward == -0.5
        assert res.done and res.outcome == "empty"
        assert session.last_stats == {"solve_f1": 0.0}

    def test_step_before_reset_is_local_error(self, session):
        with pytest.raises(StepAfterDoneError):
            session.step("hello")

    def test_step_after_done_is_local_error(self, session):
        session.reset(env_id="env-1")
        session.step("")
        # The fake service would answer again; the client must refuse locally.
        with pytest.raises(StepAfterDoneError):
            session.step("more")

    def test_reset_after_done_starts_fresh(self, session):
        session.reset(env_id="env-1")
        session.step("")
        session.reset(env_id="env-1")
        assert not session.episode_done


class TestErrors:
    def test_not_found_maps_to_typed_exception(self):
        def handler(msg):
            if msg["op"] == "hello":
                return result(msg, {"session_id": "s-1"})
            return error(msg, "NOT_FOUND", "no such env")

        service = FakeService(handler)
        service.start()
        sess = ClientSession.connect("127.0.0.1", service.port)
        with pytest.raises(NotFoundError):
            sess.reset(env_id="missing")

    def test_needs_reset_maps_to_typed_exception(self):
        def handler(msg):
            if msg["op"] == "hello":
                return result(msg, {"session_id": "s-1"})
            return error(msg, "NEEDS_RESET", "reset first")

        service = FakeService(handler)
        service.start()
        sess = ClientSession.connect("127.0.0.1", service.port)
        sess.episode_active = True  # force the network path
        with pytest.raises(NeedsResetError):
            sess.step("text")

    def test_wrong_request_id_echo_is_protocol_error(self):
        def handler(msg):
            if msg["op"] == "hello":
                return result(msg, {"session_id": "s-1"})
            return {"op": "result", "request_id": "bogus", "payload": {}}

        service = FakeService(handler)
        service.start()
        sess = ClientSession.connect("127.0.0.1", service.port)
        with pytest.raises(ProtocolError):
            sess.reset(env_id="env-1")


def test_export_records(tmp_path):
    obs = Observation(env_id="env-1", question="Q?", tools=())
    record = EpisodeRecord(env_id="env-1", observation=obs)
    record.turns.append(
        ("", StepResult(tool_responses=(), reward=-0.5, turn_stats={"p": 0}, done=True, outcome="empty", stats={"solve_f1": 0.0}))
    )
    path = tmp_path / "episodes.jsonl"
    assert export_records([record], str(path)) == 1
    data = json.loads(path.read_text().splitlines()[0])
    assert data["env_id"] == "env-1"
    assert data["turns"][0]["reward"] == -0.5
    assert data["stats"] == {"solve_f1": 0.0}
