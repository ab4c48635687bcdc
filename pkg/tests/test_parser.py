from __future__ import annotations

import pytest
from parser_corpus import CORPUS

from toolgym.engine import parse_assistant_message, strip_think
from toolgym.rewards import TurnKind


@pytest.mark.parametrize("label,text,kind,call_count", CORPUS, ids=[c[0] for c in CORPUS])
def test_corpus_classification(label, text, kind, call_count):
    parsed = parse_assistant_message(text)
    assert parsed.kind is kind
    assert len(parsed.calls) == call_count


def test_corpus_is_large_enough():
    assert len(CORPUS) >= 30


def test_call_fields_extracted():
    parsed = parse_assistant_message(
        '<tool_call>\n{"name": "distance_calculator", "arguments": {"origin": "A", "destination": "B", "mode": "walking"}}\n</tool_call>'
    )
    call = parsed.calls[0]
    assert call.name == "distance_calculator"
    assert call.arguments == {"origin": "A", "destination": "B", "mode": "walking"}


def test_format_error_reports_detail():
    parsed = parse_assistant_message("<tool_call>\nnope\n</tool_call>")
    assert parsed.kind is TurnKind.FORMAT_ERROR
    assert parsed.error_detail


def test_strip_think_removes_all_blocks():
    text = "<think>a</think>middle<think>b</think>"
    assert strip_think(text) == "middle"


def test_tool_calls_kind_implies_nonempty_calls():
    for _, text, kind, _ in CORPUS:
        parsed = parse_assistant_message(text)
        if parsed.kind is TurnKind.TOOL_CALLS:
            assert parsed.calls
        if parsed.kind is TurnKind.EMPTY:
            assert not parsed.text.strip()
