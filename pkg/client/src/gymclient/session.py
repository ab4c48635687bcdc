"""Blocking client session for the gym line-JSON protocol.

One request in flight at a time; rollout parallelism comes from opening one
session per worker.  A session tracks episode liveness locally so a step
after termination fails before any network traffic.
"""

from __future__ import annotations

import json
import socket
from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import ProtocolError, StepAfterDoneError, error_from_payload


@dataclass(frozen=True)
class Observation:
    env_id: str
    question: str
    tools: tuple[dict[str, Any], ...]
    system: str = ""
    n_sub_questions: int = 0


@dataclass(frozen=True)
class StepResult:
    tool_responses: tuple[dict[str, Any], ...]
    reward: float
    turn_stats: dict[str, Any]
    done: bool
    outcome: str
    stats: dict[str, Any] | None = None


@dataclass
class EpisodeRecord:
    """Client-side record of one episode, exportable as a JSONL line."""

    env_id: str
    observation: Observation
    turns: list[tuple[str, StepResult]] = field(default_factory=list)

    def rewards(self) -> list[float]:
        return [result.reward for _, result in self.turns]

    def final_stats(self) -> dict[str, Any] | None:
        return self.turns[-1][1].stats if self.turns else None

    def to_dict(self) -> dict[str, Any]:
        return {
            "env_id": self.env_id,
            "question": self.observation.question,
            "turns": [
                {
                    "assistant_text": text,
                    "reward": result.reward,
                    "turn_stats": result.turn_stats,
                    "done": result.done,
                    "outcome": result.outcome,
                }
                for text, result in self.turns
            ],
            "stats": self.final_stats(),
        }


class ClientSession:
    """Synchronous session speaking exactly the service wire grammar."""

    def __init__(self, sock: socket.socket):
        self._sock = sock
        self._fh = sock.makefile("rw", encoding="utf-8", newline="\n")
        self._counter = 0
        self.session_id: str | None = None
        self.episode_active = False
        self.episode_done = False
        self.last_stats: dict[str, Any] | None = None
        hello = self._request("hello", {})
        self.session_id = hello.get("session_id")

    @classmethod
    def connect(cls, host: str, port: int, timeout: float = 30.0) -> "ClientSession":
        return cls(socket.create_connection((host, port), timeout=timeout))

    def __enter__(self) -> "ClientSession":
        return self

    def __exit__(self, *_exc) -> None:
        self.close()

    def _request(self, op: str, payload: dict[str, Any]) -> dict[str, Any]:
        self._counter += 1
        request_id = f"r{self._counter}"
        line = json.dumps({"op": op, "request_id": request_id, "payload": payload}, ensure_ascii=False)
        self._fh.write(line + "\n")
        self._fh.flush()
        raw = self._fh.readline()
        if not raw:
            raise ProtocolError("connection closed by service")
        try:
            reply = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"unparseable reply: {exc}")
        if reply.get("request_id") != request_id:
            raise ProtocolError("reply does not echo the request_id")
        if reply.get("op") == "error":
            raise error_from_payload(reply.get("payload", {}))
        if reply.get("op") != "result":
            raise ProtocolError(f"unexpected op {reply.get('op')!r}")
        return reply.get("payload", {})

    def reset(
        self,
        env_id: str | None = None,
        scenario: str | None = None,
        seed: int = 0,
        variant: str = "balanced",
    ) -> Observation:
        """Start a fresh episode from a stored bundle or a generated scenario."""
        payload: dict[str, Any] = {"variant": variant}
        if env_id is not None:
            payload["env_id"] = env_id
        else:
            payload["scenario"] = scenario
            payload["seed"] = seed
        data = self._request("reset", payload)
        self.episode_active = True
        self.episode_done = False
        self.last_stats = None
        return Observation(
            env_id=data["env_id"],
            question=data["question"],
            tools=tuple(data.get("tools", [])),
            system=data.get("system", ""),
            n_sub_questions=data.get("n_sub_questions", 0),
        )

    def step(self, assistant_text: str) -> StepResult:
        if not self.episode_active:
            raise StepAfterDoneError("no active episode; call reset first")
        if self.episode_done:
            raise StepAfterDoneError("episode already terminated")
        data = self._request("step", {"assistant_text": assistant_text})
        result = StepResult(
            tool_responses=tuple(data.get("tool_responses", [])),
            reward=data["reward"],
            turn_stats=data.get("turn_stats", {}),
            done=data["done"],
            outcome=data.get("outcome", ""),
            stats=data.get("stats"),
        )
        if result.done:
            self.episode_done = True
            self.last_stats = result.stats
        return result

    def run(self, agent: Callable[[Observation, list[StepResult]], str], observation: Observation) -> EpisodeRecord:
        """Drive an agent callback until the episode ends; records every turn."""
        record = EpisodeRecord(env_id=observation.env_id, observation=observation)
        history: list[StepResult] = []
        while not self.episode_done:
            text = agent(observation, history)
            result = self.step(text)
            history.append(result)
            record.turns.append((text, result))
        return record

    def close(self) -> None:
        try:
            if self.session_id is not None:
                self._request("close", {})
        except Exception:
            pass
        finally:
            self.session_id = None
            try:
                self._fh.close()
            finally:
                self._sock.close()


def export_records(records: list[EpisodeRecord], path: str) -> int:
    """Write episode records as JSONL; returns the number written."""
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")
    return len(records)
