"""Generation backends: offline synthetic (default) and chat-completion driven.

The chat backend renders the bundled prompt assets, posts them to an
OpenAI-style ``/chat/completions`` endpoint and parses the JSON replies.
Every exchange is recorded so a run can be replayed deterministically.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Callable

from .errors import BackendFailure
from .model import ToolDocument, validate_document
from .pipeline import MergeGroup, MergePlan

ENV_BASE_URL = "GYM_LLM_BASE_URL"
ENV_API_KEY = "GYM_LLM_API_KEY"
ENV_MODEL = "GYM_LLM_MODEL"

TEMPERATURE = 0
MAX_TOKENS = 2048
MAX_ATTEMPTS = 3


def load_prompt(name: str) -> str:
    return resources.files("toolgym.assets.prompts").joinpath(f"{name}.txt").read_text(encoding="utf-8")


class SyntheticBackend:
    """Identity backend: the seeded skeletons are already the documents."""

    name = "synthetic"

    def design_tool(self, question: str, skeleton: ToolDocument) -> ToolDocument:
        return skeleton

    def plan_merge(self, docs: list[ToolDocument]) -> MergePlan | None:
        return None  # fall back to the deterministic merge rule

    def refine_description(self, doc: ToolDocument) -> ToolDocument:
        return doc


_FENCE = re.compile(r"^```[a-zA-Z]*\n|```$", re.MULTILINE)


def extract_json_object(text: str) -> dict[str, Any]:
    """First balanced JSON object in a model reply, fences tolerated."""
    cleaned = _FENCE.sub("", text).strip()
    start = cleaned.find("{")
    if start == -1:
        raise ValueError("no JSON object in reply")
    depth = 0
    in_string = False
    escape = False
    for idx in range(start, len(cleaned)):
        ch = cleaned[idx]
        if in_string:
            if escape:
                escape = False
            elif ch == "\\":
                escape = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return json.loads(cleaned[start:idx + 1])
    raise ValueError("unbalanced JSON object in reply")


def _default_transport(base_url: str, api_key: str, model: str) -> Callable[[str], str]:
    def post(prompt: str) -> str:
        import requests

        response = requests.post(
            base_url.rstrip("/") + "/chat/completions",
            headers={"Authorization": f"Bearer {api_key}", "Content-Type": "application/json"},
            json={
                "model": model,
                "messages": [{"role": "user", "content": prompt}],
                "temperature": TEMPERATURE,
                "max_tokens": MAX_TOKENS,
            },
            timeout=120,
        )
        response.raise_for_status()
        return response.json()["choices"][0]["message"]["content"]

    return post


@dataclass
class ChatBackend:
    """Drives the bundled prompts through a chat-completion endpoint.

    ``transport`` maps a prompt string to the model reply; tests inject a
    canned one.  ``transcript`` accumulates every (prompt, reply) pair and can
    be persisted and replayed.
    """

    transport: Callable[[str], str] | None = None
    transcript: list[dict[str, str]] = field(default_factory=list)
    replay: bool = False
    name: str = "llm"
    _replay_cursor: int = 0

    @classmethod
    def from_env(cls) -> "ChatBackend":
        base_url = os.environ.get(ENV_BASE_URL)
        api_key = os.environ.get(ENV_API_KEY, "")
        model = os.environ.get(ENV_MODEL, "")
        if not base_url or not model:
            raise BackendFailure(
                f"chat backend needs {ENV_BASE_URL} and {ENV_MODEL} set", raw=None
            )
        return cls(transport=_default_transport(base_url, api_key, model))

    @classmethod
    def from_transcript(cls, path: str) -> "ChatBackend":
        with open(path, "r", encoding="utf-8") as fh:
            recorded = json.load(fh)
        return cls(transcript=recorded, replay=True)

    def save_transcript(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.transcript, fh, ensure_ascii=False, indent=2)

    def _complete(self, prompt: str) -> str:
        if self.replay:
            if self._replay_cursor >= len(self.transcript):
                raise BackendFailure("transcript exhausted during replay", raw=prompt)
            entry = self.transcript[self._replay_cursor]
            if entry["prompt"] != prompt:
                raise BackendFailure("replayed prompt diverged from transcript", raw=prompt)
            self._replay_cursor += 1
            return entry["reply"]
        if self.transport is None:
            raise BackendFailure("chat backend has no transport configured", raw=None)
        reply = self.transport(prompt)
        self.transcript.append({"prompt": prompt, "reply": reply})
        return reply

    def _ask(self, prompt: str, parse: Callable[[dict[str, Any]], Any]) -> Any:
        last_raw: str | None = None
        for _ in range(MAX_ATTEMPTS):
            last_raw = self._complete(prompt)
            try:
                return parse(extract_json_object(last_raw))
            except (ValueError, KeyError, TypeError):
                continue
        raise BackendFailure("model output unusable after retries", raw=last_raw)

    def design_tool(self, question: str, skeleton: ToolDocument) -> ToolDocument:
        prompt = load_prompt("document_generation").format(question=question)

        def parse(payload: dict[str, Any]) -> ToolDocument:
            doc = ToolDocument.from_schema(payload["tool"])
            report = validate_document(doc)
            if not report.ok:
                raise ValueError(report.summary())
            return doc

        return self._ask(prompt, parse)

    def plan_merge(self, docs: list[ToolDocument]) -> MergePlan | None:
        numbered = json.dumps(
            [{"tool_number": i + 1, **doc.to_schema()} for i, doc in enumerate(docs)],
            ensure_ascii=False,
            indent=2,
        )
        prompt = load_prompt("function_integration").format(documents=numbered)

        def parse(payload: dict[str, Any]) -> MergePlan:
            merged = payload.get("merged")
            if merged is None:
                return MergePlan(groups=(), untouched=tuple(range(len(docs))))
            groups: list[MergeGroup] = []
            taken: set[int] = set()
            for item in merged:
                ids = tuple(sorted(int(i) - 1 for i in item["id"]))
                if any(i < 0 or i >= len(docs) for i in ids) or set(ids) & taken or len(ids) < 2:
                    raise ValueError("merge groups must be disjoint in-range lists")
                taken.update(ids)
                doc = ToolDocument.from_schema(item["document"])
                if not validate_document(doc).ok:
                    raise ValueError("merged document is malformed")
                groups.append(MergeGroup(ids=ids, merged=doc))
            untouched = tuple(i for i in range(len(docs)) if i not in taken)
            return MergePlan(groups=tuple(groups), untouched=untouched)

        return self._ask(prompt, parse)

    def refine_description(self, doc: ToolDocument) -> ToolDocument:
        prompt = load_prompt("complexity_scaling").format(tool=json.dumps(doc.to_schema(), ensure_ascii=False, indent=2))

        def parse(payload: dict[str, Any]) -> ToolDocument:
            refined = ToolDocument.from_schema(payload["refined_version"])
            if refined.name != doc.name:
                raise ValueError("refinement must preserve the tool name")
            return refined

        return self._ask(prompt, parse)
