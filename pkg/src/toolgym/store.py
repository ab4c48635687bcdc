"""Training-instance records and their JSONL persistence."""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass, field
from typing import Any, Iterable

from .errors import StoreError
from .model import ToolDocument
from .rewards import RewardVariant, TurnStats


@dataclass(frozen=True)
class Trajectory:
    """One recorded episode: the five-field training instance plus bookkeeping."""

    env_id: str
    transcript: tuple[tuple[str, str], ...]
    tools: tuple[ToolDocument, ...]
    final_answer: str
    remaining: tuple[tuple[str, str], ...]
    per_turn: tuple[tuple[TurnStats, float], ...]
    outcome: str
    variant: RewardVariant = RewardVariant.BALANCED
    epoch: int = 0
    sampler_seed: int = 0

    @property
    def p_total(self) -> int:
        return sum(stats.p for stats, _ in self.per_turn)

    @property
    def q_total(self) -> int:
        return sum(stats.q for stats, _ in self.per_turn)

    @property
    def n(self) -> int:
        return self.q_total + len(self.remaining)

    def assistant_turns(self) -> list[str]:
        return [content for role, content in self.transcript if role == "assistant"]

    def rewards(self) -> list[float]:
        return [reward for _, reward in self.per_turn]

    def final_output(self) -> str | None:
        if self.outcome != "answered":
            return None
        turns = self.assistant_turns()
        return turns[-1] if turns else None

    def to_dict(self) -> dict[str, Any]:
        return {
            "env_id": self.env_id,
            "transcript": [[role, content] for role, content in self.transcript],
            "tools": [doc.to_schema() for doc in self.tools],
            "final_answer": self.final_answer,
            "remaining": [[sq_id, answer] for sq_id, answer in self.remaining],
            "per_turn": [
                {**stats.to_json(), "reward": reward} for stats, reward in self.per_turn
            ],
            "outcome": self.outcome,
            "variant": self.variant.value,
            "epoch": self.epoch,
            "sampler_seed": self.sampler_seed,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Trajectory":
        return cls(
            env_id=data["env_id"],
            transcript=tuple((role, content) for role, content in data["transcript"]),
            tools=tuple(ToolDocument.from_schema(doc) for doc in data.get("tools", [])),
            final_answer=data["final_answer"],
            remaining=tuple((sq_id, answer) for sq_id, answer in data.get("remaining", [])),
            per_turn=tuple(
                (TurnStats.from_json(item), item["reward"]) for item in data.get("per_turn", [])
            ),
            outcome=data["outcome"],
            variant=RewardVariant(data.get("variant", "balanced")),
            epoch=int(data.get("epoch", 0)),
            sampler_seed=int(data.get("sampler_seed", 0)),
        )


def dumps_trajectory(traj: Trajectory) -> str:
    return json.dumps(traj.to_dict(), ensure_ascii=False)


def loads_trajectory(line: str) -> Trajectory:
    return Trajectory.from_dict(json.loads(line))


@dataclass
class ScanResult:
    records: list[tuple[int, Trajectory]] = field(default_factory=list)
    errors: list[tuple[int, str]] = field(default_factory=list)


class TrajectoryStore:
    """Append-only JSONL store; one writer, record-atomic appends."""

    def __init__(self, path: str):
        self.path = path
        self._lock = threading.Lock()

    def append(self, traj: Trajectory) -> int:
        line = dumps_trajectory(traj)
        with self._lock:
            offset = self._count_lines()
            try:
                os.makedirs(os.path.dirname(self.path) or ".", exist_ok=True)
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(line + "\n")
                    fh.flush()
                    os.fsync(fh.fileno())
            except OSError as exc:
                raise StoreError("IO_FAILURE", f"cannot append to {self.path}: {exc}") from exc
        return offset

    def _count_lines(self) -> int:
        if not os.path.exists(self.path):
            return 0
        with open(self.path, "r", encoding="utf-8") as fh:
            return sum(1 for _ in fh)

    def read_all(self) -> ScanResult:
        return scan_file(self.path)


def scan_file(path: str) -> ScanResult:
    """Read every record; malformed lines are reported and skipped."""
    result = ScanResult()
    if not os.path.exists(path):
        return result
    with open(path, "r", encoding="utf-8") as fh:
        for offset, line in enumerate(fh):
            if not line.strip():
                continue
            try:
                result.records.append((offset, loads_trajectory(line)))
            except (json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
                result.errors.append((offset, f"{type(exc).__name__}: {exc}"))
    return result


def epoch_path(rollout_dir: str, epoch: int) -> str:
    return os.path.join(rollout_dir, f"epoch-{epoch}.jsonl")


@dataclass(frozen=True)
class ManifestEntry:
    env_id: str
    seed: int


def _digest(*parts: object) -> int:
    payload = "|".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")


def resample_manifest(epoch: int, env_ids: Iterable[str], seed: int) -> list[ManifestEntry]:
    """Deterministic per-epoch permutation with derived per-episode seeds."""
    if epoch < 1:
        raise StoreError("BAD_EPOCH", "epoch must be >= 1")
    ids = list(env_ids)
    keyed = sorted(ids, key=lambda env_id: _digest("order", seed, epoch, env_id))
    return [
        ManifestEntry(env_id=env_id, seed=_digest("episode", seed, epoch, env_id))
        for env_id in keyed
    ]
