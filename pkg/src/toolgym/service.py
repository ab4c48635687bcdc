"""Line-JSON service exposing environments to external agents and trainers.

One message per line.  Requests carry ``op``, a client-chosen ``request_id``
and an op-specific ``payload``; responses echo the request_id with op
``result`` or ``error``.  A session owns one episode at a time; re-sending an
already processed request_id returns the cached result instead of
re-executing.
"""

from __future__ import annotations

import json
import logging
import os
import socket
import socketserver
import threading
import uuid
from dataclasses import dataclass, field
from typing import Any

from . import engine
from .graph import ScenarioKind
from .model import EnvironmentBundle, load_bundle, validate_bundle
from .pipeline import build_environment, preset_seed
from .rewards import RewardVariant, solve_scores
from .rewards import answer_correctness as answer_correct_metric

log = logging.getLogger("toolgym.service")

PROTOCOL_VERSION = 1


def load_catalog(bundle_dir: str) -> dict[str, EnvironmentBundle]:
    catalog: dict[str, EnvironmentBundle] = {}
    if not bundle_dir:
        return catalog
    for name in sorted(os.listdir(bundle_dir)):
        if not name.endswith(".json"):
            continue
        path = os.path.join(bundle_dir, name)
        try:
            bundle = load_bundle(path)
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            log.warning("skipping %s: %s", path, exc)
            continue
        if validate_bundle(bundle).ok:
            catalog[bundle.id] = bundle
        else:
            log.warning("skipping invalid bundle %s", path)
    return catalog


@dataclass
class Session:
    session_id: str
    env: EnvironmentBundle | None = None
    state: engine.EpisodeState | None = None
    variant: RewardVariant = RewardVariant.BALANCED
    seen: dict[str, dict[str, Any]] = field(default_factory=dict)

    def reset(self, env: EnvironmentBundle, variant: RewardVariant) -> dict[str, Any]:
        self.env = env
        self.variant = variant
        self.state = engine.new_episode(env)
        return {
            "env_id": env.id,
            "question": env.question,
            "tools": [doc.to_schema() for doc in env.documents()],
            "system": engine.render_system_context(env),
            "n_sub_questions": env.n,
        }

    def step(self, assistant_text: str) -> dict[str, Any]:
        assert self.env is not None and self.state is not None
        result = engine.step(self.state, self.env, assistant_text, self.variant)
        payload: dict[str, Any] = {
            "tool_responses": [resp.to_json() for resp in result.responses],
            "reward": result.reward,
            "turn_stats": result.stats.to_json(),
            "done": result.done,
            "outcome": result.outcome,
            "stats": None,
        }
        if result.done:
            payload["stats"] = self.final_stats()
        return payload

    def final_stats(self) -> dict[str, Any]:
        state, env = self.state, self.env
        scores = solve_scores(state.p_total, state.q_total, env.n)
        answered = state.final_output is not None
        return {
            "p_total": state.p_total,
            "q_total": state.q_total,
            "n": env.n,
            "t": env.n - state.q_total,
            "solve_p": scores.solve_p,
            "solve_r": scores.solve_r,
            "solve_f1": scores.solve_f1,
            "outcome": state.outcome,
            "answer_correct": (
                answer_correct_metric(state.final_output, env.final_answer) if answered else 0
            ),
        }


class ProtocolHandler:
    """Session state machine shared by the TCP and stdio front ends."""

    def __init__(self, catalog: dict[str, EnvironmentBundle]):
        self.catalog = catalog
        self.session = Session(session_id="s-" + uuid.uuid4().hex[:12])

    def handle_line(self, line: str) -> str:
        try:
            message = json.loads(line)
        except json.JSONDecodeError:
            return self._error(None, "BAD_MESSAGE", "message is not valid JSON")
        if not isinstance(message, dict):
            return self._error(None, "BAD_MESSAGE", "message must be a JSON object")
        request_id = message.get("request_id")
        op = message.get("op")
        if not isinstance(request_id, str) or not request_id:
            return self._error(None, "BAD_MESSAGE", "request_id is required")
        if request_id in self.session.seen:
            return json.dumps(self.session.seen[request_id], ensure_ascii=False)
        payload = message.get("payload") or {}
        try:
            handler = {
                "hello": self._op_hello,
                "reset": self._op_reset,
                "step": self._op_step,
                "close": self._op_close,
            }.get(op)
            if handler is None:
                return self._error(request_id, "UNKNOWN_OP", f"unsupported op {op!r}")
            response = handler(payload)
        except ServiceReject as exc:
            return self._error(request_id, exc.code, exc.message)
        envelope = {
            "op": "result",
            "request_id": request_id,
            "session_id": self.session.session_id,
            "payload": response,
        }
        self.session.seen[request_id] = envelope
        return json.dumps(envelope, ensure_ascii=False)

    def _error(self, request_id: str | None, code: str, message: str) -> str:
        return json.dumps(
            {
                "op": "error",
                "request_id": request_id,
                "session_id": self.session.session_id,
                "payload": {"code": code, "message": message},
            },
            ensure_ascii=False,
        )

    def _op_hello(self, _payload: dict[str, Any]) -> dict[str, Any]:
        return {"server": "toolgym", "protocol": PROTOCOL_VERSION, "session_id": self.session.session_id}

    def _op_reset(self, payload: dict[str, Any]) -> dict[str, Any]:
        variant_name = payload.get("variant", RewardVariant.BALANCED.value)
        try:
            variant = RewardVariant(variant_name)
        except ValueError:
            raise ServiceReject("BAD_PAYLOAD", f"unknown reward variant {variant_name!r}")
        env_id = payload.get("env_id")
        if env_id is not None:
            env = self.catalog.get(env_id)
            if env is None:
                raise ServiceReject("NOT_FOUND", f"no bundle named {env_id!r}")
            return self.session.reset(env, variant)
        scenario_name = payload.get("scenario")
        if scenario_name is None:
            raise ServiceReject("BAD_PAYLOAD", "reset needs env_id or scenario")
        try:
            scenario = ScenarioKind.from_wire(scenario_name)
        except Exception:
            raise ServiceReject("BAD_PAYLOAD", f"unknown scenario {scenario_name!r}")
        seed = payload.get("seed", 0)
        if not isinstance(seed, int):
            raise ServiceReject("BAD_PAYLOAD", "seed must be an integer")
        scenario_seed, cfg = preset_seed(scenario, seed)
        env = build_environment(scenario_seed, cfg)
        return self.session.reset(env, variant)

    def _op_step(self, payload: dict[str, Any]) -> dict[str, Any]:
        if self.session.state is None:
            raise ServiceReject("NEEDS_RESET", "no active episode; send reset first")
        if self.session.state.done:
            raise ServiceReject("STEP_AFTER_DONE", "episode already terminated")
        text = payload.get("assistant_text")
        if not isinstance(text, str):
            raise ServiceReject("BAD_PAYLOAD", "assistant_text must be a string")
        return self.session.step(text)

    def _op_close(self, _payload: dict[str, Any]) -> dict[str, Any]:
        self.session.state = None
        self.session.env = None
        return {"closed": True}


class ServiceReject(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


class _LineHandler(socketserver.StreamRequestHandler):
    timeout = 300

    def handle(self) -> None:
        server: GymServer = self.server  # type: ignore[assignment]
        if not server.try_acquire_session():
            self.wfile.write(
                (json.dumps({"op": "error", "request_id": None, "payload": {"code": "MAX_SESSIONS", "message": "session limit reached"}}) + "\n").encode("utf-8")
            )
            return
        handler = ProtocolHandler(server.catalog)
        try:
            for raw in self.rfile:
                line = raw.decode("utf-8").strip()
                if not line:
                    continue
                reply = handler.handle_line(line)
                self.wfile.write((reply + "\n").encode("utf-8"))
                self.wfile.flush()
        except (ConnectionResetError, BrokenPipeError, socket.timeout):
            pass
        finally:
            server.release_session()


class GymServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, bind: tuple[str, int], catalog: dict[str, EnvironmentBundle], max_sessions: int = 16):
        super().__init__(bind, _LineHandler)
        self.catalog = catalog
        self.max_sessions = max_sessions
        self._active = 0
        self._lock = threading.Lock()

    def try_acquire_session(self) -> bool:
        with self._lock:
            if self._active >= self.max_sessions:
                return False
            self._active += 1
            return True

    def release_session(self) -> None:
        with self._lock:
            self._active = max(0, self._active - 1)

    @property
    def bound_address(self) -> tuple[str, int]:
        host, port = self.server_address[:2]
        return host, port


def serve(
    bind: str,
    bundle_dir: str,
    max_sessions: int = 16,
) -> GymServer:
    """Construct a server bound to ``host:port`` (port 0 picks a free one)."""
    host, _, port_text = bind.partition(":")
    port = int(port_text or "0")
    catalog = load_catalog(bundle_dir)
    return GymServer((host or "127.0.0.1", port), catalog, max_sessions=max_sessions)


def serve_stdio(bundle_dir: str, stdin=None, stdout=None) -> None:
    """Same grammar over stdin/stdout for subprocess embedding."""
    import sys

    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    handler = ProtocolHandler(load_catalog(bundle_dir))
    for raw in stdin:
        line = raw.strip()
        if not line:
            continue
        stdout.write(handler.handle_line(line) + "\n")
        stdout.flush()
