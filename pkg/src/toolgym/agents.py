"""Scripted agents used for verification: oracle, silent, spammer, guesser."""

from __future__ import annotations

import json
from typing import Any, Callable

from .engine import TOOL_CALL_CLOSE, TOOL_CALL_OPEN, AgentFn, oracle_rounds
from .literals import resolve_literal
from .model import EnvironmentBundle, SubQuestion

FINAL_ANSWER_TEMPLATE = "The answer is {answer}."
SPAMMER_FINAL_TEXT = "No further action."


def render_call(name: str, arguments: dict[str, Any]) -> str:
    payload = json.dumps({"name": name, "arguments": arguments}, ensure_ascii=False)
    return f"{TOOL_CALL_OPEN}\n{payload}\n{TOOL_CALL_CLOSE}"


def canonical_call_arguments(env: EnvironmentBundle, sq: SubQuestion) -> dict[str, Any]:
    """Canonical bindings with every reference resolved to its answer."""
    answers = env.answers()
    resolved = {}
    for key, value in sq.canonical_bindings.items():
        resolved[key] = resolve_literal(value, answers.get)
    return resolved


def _round_texts(env: EnvironmentBundle, copies: int, max_per_turn: int = 8) -> list[str]:
    texts = []
    for round_ids in oracle_rounds(env):
        blocks = []
        for sq_id in round_ids:
            sq = env.sub_question(sq_id)
            args = canonical_call_arguments(env, sq)
            blocks.extend([render_call(sq.tool_name, args)] * copies)
        # Emit wide rounds across several turns so no call gets dropped.
        for start in range(0, len(blocks), max_per_turn):
            texts.append("\n".join(blocks[start:start + max_per_turn]))
    return texts


def _scripted(turns: list[str]) -> AgentFn:
    state = {"next": 0}

    def agent(_transcript: list[tuple[str, str]]) -> str:
        idx = state["next"]
        state["next"] = idx + 1
        if idx < len(turns):
            return turns[idx]
        return ""

    return agent


def oracle_agent(env: EnvironmentBundle) -> AgentFn:
    """Solves every sub-question in dependency order, then answers."""
    turns = _round_texts(env, copies=1)
    turns.append(FINAL_ANSWER_TEMPLATE.format(answer=env.final_answer))
    return _scripted(turns)


def silent_agent(env: EnvironmentBundle) -> AgentFn:
    return _scripted([""])


def spammer_agent(env: EnvironmentBundle) -> AgentFn:
    """Issues every canonical call twice, then stops without answering."""
    turns = _round_texts(env, copies=2)
    turns.append(SPAMMER_FINAL_TEXT)
    return _scripted(turns)


def guesser_agent(env: EnvironmentBundle) -> AgentFn:
    """Answers immediately without touching any tool."""
    return _scripted([FINAL_ANSWER_TEMPLATE.format(answer=env.final_answer)])


AGENTS: dict[str, Callable[[EnvironmentBundle], AgentFn]] = {
    "oracle": oracle_agent,
    "silent": silent_agent,
    "spammer": spammer_agent,
    "guesser": guesser_agent,
}


def make_agent(name: str, env: EnvironmentBundle) -> AgentFn:
    try:
        factory = AGENTS[name]
    except KeyError:
        raise ValueError(f"unknown agent {name!r}; choose from {sorted(AGENTS)}")
    return factory(env)
