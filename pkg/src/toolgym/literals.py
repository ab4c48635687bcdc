"""Literal value algebra used in canonical bindings and behavior match tables.

A literal is one of: str, bool, int, float, list of literals, dict of
str -> literal, or :class:`Ref` — a symbolic reference to another
sub-question whose answer string is substituted at match time.

JSON encoding: a Ref serializes as ``{"ref": "<sub_question_id>"}``.  Plain
map literals whose only key is ``ref`` with a string value are therefore not
representable; nothing in this package emits such maps.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from typing import Any, Callable

NUM_REL_TOL = 1e-9


@dataclass(frozen=True)
class Ref:
    """Symbolic reference to a sub-question answer, resolved at match time."""

    target: str


def literal_to_json(value: Any) -> Any:
    if isinstance(value, Ref):
        return {"ref": value.target}
    if isinstance(value, list):
        return [literal_to_json(v) for v in value]
    if isinstance(value, dict):
        return {k: literal_to_json(v) for k, v in value.items()}
    return value


def literal_from_json(value: Any) -> Any:
    if isinstance(value, dict):
        if set(value.keys()) == {"ref"} and isinstance(value["ref"], str):
            return Ref(value["ref"])
        return {k: literal_from_json(v) for k, v in value.items()}
    if isinstance(value, list):
        return [literal_from_json(v) for v in value]
    return value


def resolve_literal(value: Any, resolver: Callable[[str], str | None]) -> Any:
    """Substitute every Ref via ``resolver``; an unresolved Ref yields None.

    None propagates upward so that a match row containing any unresolved
    reference can never match.
    """
    if isinstance(value, Ref):
        return resolver(value.target)
    if isinstance(value, list):
        out = []
        for item in value:
            resolved = resolve_literal(item, resolver)
            if resolved is None and item is not None:
                return None
            out.append(resolved)
        return out
    if isinstance(value, dict):
        out_map = {}
        for key, item in value.items():
            resolved = resolve_literal(item, resolver)
            if resolved is None and item is not None:
                return None
            out_map[key] = resolved
        return out_map
    return value


def contains_ref(value: Any) -> bool:
    if isinstance(value, Ref):
        return True
    if isinstance(value, list):
        return any(contains_ref(v) for v in value)
    if isinstance(value, dict):
        return any(contains_ref(v) for v in value.values())
    return False


def norm_match_string(text: str) -> str:
    """Normalization used when matching argument values: NFC, trim, casefold."""
    return unicodedata.normalize("NFC", text).strip().casefold()


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def numbers_close(a: float, b: float) -> bool:
    return abs(a - b) <= NUM_REL_TOL * max(1.0, abs(a), abs(b))


def literals_equal(a: Any, b: Any) -> bool:
    """Normalization-stable equality over fully resolved literals.

    Strings compare after NFC + trim + casefold; numbers within a relative
    tolerance (integers and floats interchangeable); lists element-wise in
    order; maps key-wise.
    """
    if isinstance(a, str) and isinstance(b, str):
        return norm_match_string(a) == norm_match_string(b)
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a == b
    if _is_number(a) and _is_number(b):
        return numbers_close(float(a), float(b))
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(literals_equal(x, y) for x, y in zip(a, b))
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(literals_equal(a[k], b[k]) for k in a)
    return a is None and b is None
