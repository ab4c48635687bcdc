"""Multi-turn episode engine: message parsing, stepping, transcripts."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import EngineError
from .graph import solvable_frontier
from .model import EnvironmentBundle
from .rewards import RewardVariant, TurnKind, TurnStats, answer_correctness, turn_reward
from .runtime import ToolCall, ToolResponse, invoke

TOOL_CALL_OPEN = "<tool_call>"
TOOL_CALL_CLOSE = "</tool_call>"
TOOL_RESPONSE_OPEN = "<tool_response>"
TOOL_RESPONSE_CLOSE = "</tool_response>"

_THINK_BLOCK = re.compile(r"<think>.*?</think>", re.DOTALL)

SYSTEM_HEADER = (
    "# Tools\n\nYou may call one or more functions to assist with the user query.\n\n"
    "You are provided with function signatures within <tools></tools> XML tags:\n<tools>"
)
SYSTEM_FOOTER = (
    "\n</tools>\n\nFor each function call, return a json object with function name and "
    'arguments within <tool_call></tool_call> XML tags:\n<tool_call>\n{"name": '
    "<function-name>, \"arguments\": <args-json-object>}\n</tool_call>"
)


@dataclass
class ParsedTurn:
    kind: TurnKind
    calls: list[ToolCall] = field(default_factory=list)
    text: str = ""
    error_detail: str | None = None


def strip_think(text: str) -> str:
    return _THINK_BLOCK.sub("", text)


def _extract_blocks(text: str) -> list[str] | None:
    """Contents of tool_call blocks, or None when tags are unbalanced."""
    blocks: list[str] = []
    pos = 0
    while True:
        open_at = text.find(TOOL_CALL_OPEN, pos)
        close_at = text.find(TOOL_CALL_CLOSE, pos)
        if open_at == -1 and close_at == -1:
            return blocks
        if open_at == -1 or (close_at != -1 and close_at < open_at):
            return None
        body_start = open_at + len(TOOL_CALL_OPEN)
        close_at = text.find(TOOL_CALL_CLOSE, body_start)
        if close_at == -1:
            return None
        inner = text[body_start:close_at]
        if TOOL_CALL_OPEN in inner:
            return None
        blocks.append(inner)
        pos = close_at + len(TOOL_CALL_CLOSE)


def parse_assistant_message(text: str) -> ParsedTurn:
    """Classify one assistant message under the tool_call tag grammar."""
    stripped = strip_think(text)
    if not stripped.strip():
        return ParsedTurn(TurnKind.EMPTY, text=stripped)
    blocks = _extract_blocks(stripped)
    if blocks is None:
        return ParsedTurn(TurnKind.FORMAT_ERROR, text=text, error_detail="unbalanced tool_call tags")
    if not blocks:
        return ParsedTurn(TurnKind.FINAL_ANSWER, text=stripped.strip())
    calls: list[ToolCall] = []
    for raw in blocks:
        try:
            payload = json.loads(raw.strip())
        except json.JSONDecodeError as exc:
            return ParsedTurn(TurnKind.FORMAT_ERROR, text=text, error_detail=f"invalid JSON in tool_call: {exc}")
        if not isinstance(payload, dict):
            return ParsedTurn(TurnKind.FORMAT_ERROR, text=text, error_detail="tool_call payload is not an object")
        name = payload.get("name")
        arguments = payload.get("arguments")
        if not isinstance(name, str) or not isinstance(arguments, dict):
            return ParsedTurn(
                TurnKind.FORMAT_ERROR,
                text=text,
                error_detail="tool_call needs a string name and an arguments object",
            )
        calls.append(ToolCall(name=name, arguments=arguments))
    return ParsedTurn(TurnKind.TOOL_CALLS, calls=calls, text=text)


@dataclass(frozen=True)
class Budgets:
    max_turns: int
    max_calls_per_turn: int = 8


def default_budgets(n_sub_questions: int) -> Budgets:
    return Budgets(max_turns=2 * n_sub_questions + 2, max_calls_per_turn=8)


OUTCOME_CONTINUE = "continue"
OUTCOME_ANSWERED = "answered"
OUTCOME_EMPTY = "empty"
OUTCOME_FORMAT_ERROR = "format_error"
OUTCOME_BUDGET_EXHAUSTED = "budget_exhausted"

TERMINAL_OUTCOMES = (OUTCOME_ANSWERED, OUTCOME_EMPTY, OUTCOME_FORMAT_ERROR, OUTCOME_BUDGET_EXHAUSTED)


@dataclass
class EpisodeState:
    env_id: str
    transcript: list[tuple[str, str]] = field(default_factory=list)
    solved: list[str] = field(default_factory=list)
    p_total: int = 0
    turn_index: int = 0
    budgets: Budgets = field(default_factory=lambda: Budgets(max_turns=10))
    done: bool = False
    final_output: str | None = None
    outcome: str = OUTCOME_CONTINUE

    @property
    def q_total(self) -> int:
        return len(self.solved)


def render_system_context(env: EnvironmentBundle) -> str:
    docs = "\n".join(json.dumps(d.to_schema(), ensure_ascii=False) for d in env.documents())
    return SYSTEM_HEADER + "\n" + docs + SYSTEM_FOOTER


def new_episode(env: EnvironmentBundle, budgets: Budgets | None = None) -> EpisodeState:
    state = EpisodeState(
        env_id=env.id,
        budgets=budgets or default_budgets(env.n),
    )
    state.transcript.append(("system", render_system_context(env)))
    state.transcript.append(("user", env.question))
    return state


@dataclass
class StepResult:
    responses: list[ToolResponse]
    stats: TurnStats
    reward: float
    done: bool
    outcome: str


def wrap_tool_responses(responses: list[ToolResponse]) -> str:
    return "\n".join(
        f"{TOOL_RESPONSE_OPEN}\n{resp.payload}\n{TOOL_RESPONSE_CLOSE}" for resp in responses
    )


def step(
    state: EpisodeState,
    env: EnvironmentBundle,
    assistant_text: str,
    variant: RewardVariant = RewardVariant.BALANCED,
) -> StepResult:
    """Apply one assistant turn; mutates ``state`` and returns turn results."""
    if state.done:
        raise EngineError("STEP_AFTER_DONE", "episode already terminated")
    parsed = parse_assistant_message(assistant_text)
    state.transcript.append(("assistant", assistant_text))
    state.turn_index += 1

    responses: list[ToolResponse] = []
    turn_p = 0
    turn_q = 0
    contains_answer = False
    answers = env.answers()

    if parsed.kind is TurnKind.TOOL_CALLS:
        def resolver(sq_id: str) -> str | None:
            return answers.get(sq_id) if sq_id in state.solved else None

        for call in parsed.calls[: state.budgets.max_calls_per_turn]:
            turn_p += 1
            state.p_total += 1
            entry = env.entry(call.name)
            if entry is None:
                responses.append(
                    ToolResponse("error", f"Error: no tool named '{call.name}' is available.", code="UNKNOWN_TOOL")
                )
                continue
            response = invoke(entry.behavior, entry.document, call, resolver)
            if response.is_success and response.matched_subq and response.matched_subq not in state.solved:
                state.solved.append(response.matched_subq)
                turn_q += 1
            responses.append(response)
        state.transcript.append(("tool", wrap_tool_responses(responses)))
        if state.turn_index >= state.budgets.max_turns:
            state.done = True
            state.outcome = OUTCOME_BUDGET_EXHAUSTED
    elif parsed.kind is TurnKind.FINAL_ANSWER:
        state.done = True
        state.outcome = OUTCOME_ANSWERED
        state.final_output = parsed.text
        if env.final_answer:
            contains_answer = answer_correctness(parsed.text, env.final_answer) == 1
    elif parsed.kind is TurnKind.EMPTY:
        state.done = True
        state.outcome = OUTCOME_EMPTY
    else:
        # A format error voids the whole turn: nothing executes, p unchanged.
        state.done = True
        state.outcome = OUTCOME_FORMAT_ERROR

    remaining = env.n - state.q_total
    stats = TurnStats(
        p=turn_p,
        q=turn_q,
        t=remaining,
        o_kind=parsed.kind,
        final_contains_answer=contains_answer,
    )
    reward = turn_reward(stats, variant)
    outcome = state.outcome if state.done else OUTCOME_CONTINUE
    return StepResult(responses=responses, stats=stats, reward=reward, done=state.done, outcome=outcome)


AgentFn = Callable[[list[tuple[str, str]]], str]


def run_episode(
    env: EnvironmentBundle,
    agent: AgentFn,
    budgets: Budgets | None = None,
    variant: RewardVariant = RewardVariant.BALANCED,
    epoch: int = 0,
    sampler_seed: int = 0,
):
    """Drive an agent callback until the episode terminates; returns a Trajectory."""
    from .store import Trajectory

    if budgets is not None and (budgets.max_turns < 1 or budgets.max_calls_per_turn < 1):
        raise EngineError("BAD_BUDGETS", "budgets must be positive")
    state = new_episode(env, budgets)
    per_turn: list[dict[str, Any]] = []
    while not state.done:
        try:
            text = agent(list(state.transcript))
        except EngineError:
            raise
        except Exception as exc:
            raise EngineError(
                "AGENT_FAILURE", f"agent callback failed at turn {state.turn_index}: {exc}"
            ) from exc
        result = step(state, env, text, variant)
        per_turn.append({"stats": result.stats, "reward": result.reward})
    solved = set(state.solved)
    remaining = tuple((sq.id, sq.answer) for sq in env.sub_questions if sq.id not in solved)
    return Trajectory(
        env_id=env.id,
        transcript=tuple(state.transcript),
        tools=tuple(env.documents()),
        final_answer=env.final_answer,
        remaining=remaining,
        per_turn=tuple((entry["stats"], entry["reward"]) for entry in per_turn),
        outcome=state.outcome,
        variant=variant,
        epoch=epoch,
        sampler_seed=sampler_seed,
    )


def replay_transcript(
    env: EnvironmentBundle,
    assistant_turns: list[str],
    budgets: Budgets | None = None,
    variant: RewardVariant = RewardVariant.BALANCED,
    epoch: int = 0,
    sampler_seed: int = 0,
):
    """Re-run recorded assistant turns; deterministic given the same bundle."""
    turns = iter(assistant_turns)

    def playback(_transcript: list[tuple[str, str]]) -> str:
        try:
            return next(turns)
        except StopIteration:
            raise EngineError("REPLAY_UNDERRUN", "stored transcript ended before the episode did")

    return run_episode(env, playback, budgets, variant, epoch=epoch, sampler_seed=sampler_seed)


def dependency_safe(env: EnvironmentBundle, solved_order: list[str]) -> bool:
    """True iff every sub-question was solved only after all its dependencies."""
    seen: set[str] = set()
    graph = env.graph()
    for sq_id in solved_order:
        if not set(graph.dependencies_of(sq_id)) <= seen:
            return False
        seen.add(sq_id)
    return True


def oracle_rounds(env: EnvironmentBundle) -> list[list[str]]:
    """Sub-question ids grouped into dependency-respecting rounds."""
    graph = env.graph()
    rounds: list[list[str]] = []
    solved: set[str] = set()
    while len(solved) < len(graph.nodes):
        frontier = sorted(solvable_frontier(graph, solved))
        rounds.append(frontier)
        solved |= set(frontier)
    return rounds
