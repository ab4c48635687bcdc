"""Hand-labeled assistant-message fixtures for the tag-grammar parser."""

from __future__ import annotations

from toolgym.rewards import TurnKind

CALL = '{"name": "distance_calculator", "arguments": {"origin": "A", "destination": "B", "mode": "walking"}}'
CALL2 = '{"name": "city_mayor_lookup", "arguments": {"city": "Duskvale"}}'

# (label, text, expected kind, expected call count)
CORPUS: list[tuple[str, str, TurnKind, int]] = [
    ("single_call", f"<tool_call>\n{CALL}\n</tool_call>", TurnKind.TOOL_CALLS, 1),
    ("two_calls", f"<tool_call>\n{CALL}\n</tool_call>\n<tool_call>\n{CALL2}\n</tool_call>", TurnKind.TOOL_CALLS, 2),
    ("three_calls", "\n".join([f"<tool_call>\n{CALL}\n</tool_call>"] * 3), TurnKind.TOOL_CALLS, 3),
    ("think_then_call", f"<think>\nplan the lookup\n</think>\n<tool_call>\n{CALL}\n</tool_call>", TurnKind.TOOL_CALLS, 1),
    ("prose_around_call", f"Let me check.\n<tool_call>\n{CALL}\n</tool_call>\nDone soon.", TurnKind.TOOL_CALLS, 1),
    ("inline_json", f"<tool_call>{CALL}</tool_call>", TurnKind.TOOL_CALLS, 1),
    ("padded_json", f"<tool_call>\n\n  {CALL}  \n\n</tool_call>", TurnKind.TOOL_CALLS, 1),
    ("nested_args_object", '<tool_call>\n{"name": "t", "arguments": {"filter": {"value": "x"}, "tags": ["a", "b"]}}\n</tool_call>', TurnKind.TOOL_CALLS, 1),
    ("unicode_args", '<tool_call>\n{"name": "t", "arguments": {"city": "Åre"}}\n</tool_call>', TurnKind.TOOL_CALLS, 1),
    ("extra_payload_keys", '<tool_call>\n{"name": "t", "arguments": {}, "id": "call_1"}\n</tool_call>', TurnKind.TOOL_CALLS, 1),
    ("empty_args_object", '<tool_call>\n{"name": "t", "arguments": {}}\n</tool_call>', TurnKind.TOOL_CALLS, 1),
    ("final_plain", "The answer is 128.", TurnKind.FINAL_ANSWER, 0),
    ("final_multiline", "Based on the lookups:\nThe answer is Duskvale.", TurnKind.FINAL_ANSWER, 0),
    ("final_after_think", "<think>\nno tools needed\n</think>\nThe answer is 42.", TurnKind.FINAL_ANSWER, 0),
    ("final_mentions_tag_word", "I could not locate any tool_call worth making.", TurnKind.FINAL_ANSWER, 0),
    ("final_with_tool_response_tag", "<tool_response>\nsomething\n</tool_response>", TurnKind.FINAL_ANSWER, 0),
    ("final_markdown", "**Answer:** 4.2 km", TurnKind.FINAL_ANSWER, 0),
    ("empty_string", "", TurnKind.EMPTY, 0),
    ("whitespace_only", "   \n\t  ", TurnKind.EMPTY, 0),
    ("think_only", "<think>quiet reasoning</think>", TurnKind.EMPTY, 0),
    ("think_only_with_newlines", "<think>\n\n</think>\n\n", TurnKind.EMPTY, 0),
    ("not_json", "<tool_call>\nnot json\n</tool_call>", TurnKind.FORMAT_ERROR, 0),
    ("json_array", '<tool_call>\n["name", "arguments"]\n</tool_call>', TurnKind.FORMAT_ERROR, 0),
    ("missing_name", '<tool_call>\n{"arguments": {}}\n</tool_call>', TurnKind.FORMAT_ERROR, 0),
    ("name_not_string", '<tool_call>\n{"name": 3, "arguments": {}}\n</tool_call>', TurnKind.FORMAT_ERROR, 0),
    ("arguments_not_object", '<tool_call>\n{"name": "t", "arguments": "origin=A"}\n</tool_call>', TurnKind.FORMAT_ERROR, 0),
    ("arguments_missing", '<tool_call>\n{"name": "t"}\n</tool_call>', TurnKind.FORMAT_ERROR, 0),
    ("unclosed_tag", f"<tool_call>\n{CALL}", TurnKind.FORMAT_ERROR, 0),
    ("close_before_open", f"</tool_call>\n{CALL}\n<tool_call>", TurnKind.FORMAT_ERROR, 0),
    ("nested_open_tags", f"<tool_call>\n<tool_call>\n{CALL}\n</tool_call>\n</tool_call>", TurnKind.FORMAT_ERROR, 0),
    ("second_block_malformed", f"<tool_call>\n{CALL}\n</tool_call>\n<tool_call>\nbroken\n</tool_call>", TurnKind.FORMAT_ERROR, 0),
    ("good_call_plus_dangling_open", f"<tool_call>\n{CALL}\n</tool_call>\n<tool_call>", TurnKind.FORMAT_ERROR, 0),
    ("trailing_garbage_in_block", f"<tool_call>\n{CALL} trailing\n</tool_call>", TurnKind.FORMAT_ERROR, 0),
]
