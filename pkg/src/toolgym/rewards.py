"""Step-level verifiable rewards and the evaluation metric formulas."""

from __future__ import annotations

import enum
import re
import unicodedata
from dataclasses import dataclass
from typing import NamedTuple

from .literals import literals_equal
from .runtime import ToolCall


class TurnKind(str, enum.Enum):
    TOOL_CALLS = "tool_calls"
    FINAL_ANSWER = "final_answer"
    EMPTY = "empty"
    FORMAT_ERROR = "format_error"


class RewardVariant(str, enum.Enum):
    BALANCED = "balanced"
    SOLVE_P = "solve_p"
    SOLVE_R = "solve_r"
    SOLVE_PR = "solve_pr"


@dataclass(frozen=True)
class TurnStats:
    """Counters for one assistant turn.

    p: tool invocations in the turn; q: sub-questions newly solved by it;
    t: unsolved sub-questions remaining after the turn.
    """

    p: int
    q: int
    t: int
    o_kind: TurnKind
    final_contains_answer: bool = False

    def check(self) -> None:
        if self.p < 0 or self.t < 0 or self.q < 0 or self.q > self.p:
            raise ValueError(f"inconsistent turn stats: p={self.p} q={self.q} t={self.t}")

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "t": self.t,
            "o_kind": self.o_kind.value,
            "final_contains_answer": self.final_contains_answer,
        }

    @classmethod
    def from_json(cls, data: dict) -> "TurnStats":
        return cls(
            p=data["p"],
            q=data["q"],
            t=data["t"],
            o_kind=TurnKind(data["o_kind"]),
            final_contains_answer=data.get("final_contains_answer", False),
        )


def turn_reward(stats: TurnStats, variant: RewardVariant = RewardVariant.BALANCED) -> float:
    """Piecewise per-turn reward; variants replace only the tool-calling branch."""
    stats.check()
    if stats.p > 0:
        if variant is RewardVariant.BALANCED:
            return 2 * stats.q / (stats.p + 1)
        if variant is RewardVariant.SOLVE_P:
            return stats.q / stats.p
        if variant is RewardVariant.SOLVE_R:
            return float(stats.q)
        return stats.q * stats.q / stats.p
    if stats.o_kind is TurnKind.EMPTY:
        return -0.5
    if stats.o_kind is TurnKind.FORMAT_ERROR:
        return -0.3
    if stats.final_contains_answer:
        return 1 / (stats.t + 1)
    if stats.t == 0:
        return 0.5
    return 0.0


class SolveScores(NamedTuple):
    solve_p: float
    solve_r: float
    solve_f1: float


def solve_scores(p_total: int, q_total: int, n: int) -> SolveScores:
    """Precision of invocations, completeness over sub-questions, harmonic mean."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if p_total == 0 and q_total != 0:
        raise ValueError("q must be 0 when p is 0")
    if p_total > 0 and q_total > p_total:
        raise ValueError("q must not exceed p")
    precision = q_total / p_total if p_total > 0 else 1.0
    recall = q_total / n
    if precision + recall == 0:
        f1 = 0.0
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return SolveScores(precision, recall, f1)


_WS_RUN = re.compile(r"\s+")


def normalize_answer_text(text: str) -> str:
    """NFC, collapse whitespace runs to single spaces, casefold."""
    return _WS_RUN.sub(" ", unicodedata.normalize("NFC", text)).strip().casefold()


def answer_correctness(final_output: str, gold: str) -> int:
    """1 iff the normalized gold answer appears inside the normalized output."""
    if not gold:
        raise ValueError("gold answer must be non-empty")
    return int(normalize_answer_text(gold) in normalize_answer_text(final_output))


def pass_hat_1(correct: int, attempts: int) -> float:
    if attempts < 1 or not 0 <= correct <= attempts:
        raise ValueError("need 0 <= correct <= attempts, attempts >= 1")
    return correct / attempts


def ts_pi_cf(pred: ToolCall, gold: ToolCall) -> tuple[int, int, int]:
    """Cascaded tool-selection / parameter-set / value correctness bits."""
    ts = int(pred.name == gold.name)
    keys_equal = pred.arguments.keys() == gold.arguments.keys()
    pi = ts if keys_equal else 0
    values_equal = keys_equal and all(
        literals_equal(pred.arguments[k], gold.arguments[k]) for k in gold.arguments
    )
    cf = pi if values_equal else 0
    return ts, pi, cf
