"""Interprets tool behaviors: argument validation, table matching, responses."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from .literals import Ref, literals_equal, norm_match_string, resolve_literal
from .model import (
    DEFAULT_ERROR_TEMPLATES,
    ParameterSpec,
    SuccessRow,
    ToolBehavior,
    ToolDocument,
    TypeSpec,
    ValidationReport,
)

SUCCESS = "success"
ERROR = "error"


@dataclass(frozen=True)
class ToolCall:
    name: str
    arguments: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {"name": self.name, "arguments": self.arguments}


@dataclass(frozen=True)
class ToolResponse:
    kind: str
    payload: str
    matched_subq: str | None = None
    code: str | None = None

    @property
    def is_success(self) -> bool:
        return self.kind == SUCCESS

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "payload": self.payload,
            "matched_sub_question": self.matched_subq,
            "code": self.code,
        }


@dataclass
class ArgumentReport(ValidationReport):
    """Validation outcome plus the normalized call (defaults applied)."""

    normalized: dict[str, Any] = field(default_factory=dict)


def _value_matches_type(value: Any, spec: TypeSpec) -> bool:
    kind = spec.kind
    if kind == "string":
        return isinstance(value, str)
    if kind == "boolean":
        return isinstance(value, bool)
    if kind == "integer":
        return isinstance(value, int) and not isinstance(value, bool)
    if kind == "number":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if kind == "array":
        if not isinstance(value, list):
            return False
        if spec.element is None:
            return True
        return all(_value_matches_type(item, spec.element) for item in value)
    if kind == "object":
        if not isinstance(value, dict):
            return False
        if spec.properties is None:
            return True
        declared = dict(spec.properties)
        if any(key not in declared for key in value):
            return False
        if any(req not in value for req in spec.required_props):
            return False
        return all(_value_matches_type(item, declared[key]) for key, item in value.items())
    return False


def _enum_ok(value: Any, spec: TypeSpec) -> bool:
    if spec.enum_values is None:
        return True
    return any(literals_equal(value, option) for option in spec.enum_values)


def _check_enum(value: Any, spec: TypeSpec) -> bool:
    """Enum membership for scalars, array elements and object properties."""
    if spec.kind == "array" and spec.element is not None:
        return all(_check_enum(item, spec.element) for item in value)
    if spec.kind == "object" and spec.properties is not None:
        declared = dict(spec.properties)
        return all(_check_enum(item, declared[key]) for key, item in value.items())
    return _enum_ok(value, spec)


def validate_args(doc: ToolDocument, call: ToolCall) -> ArgumentReport:
    """Check a call against the document; fills defaults into ``normalized``."""
    report = ArgumentReport()
    declared = {p.name: p for p in doc.parameters}
    for key in call.arguments:
        if key not in declared:
            report.add("UNKNOWN_PARAM", key, f"unknown parameter '{key}'")
    for spec in doc.parameters:
        if spec.name in call.arguments:
            value = call.arguments[spec.name]
            if not _value_matches_type(value, spec.type):
                report.add("TYPE_MISMATCH", spec.name, f"parameter '{spec.name}' has an invalid type")
            elif not _check_enum(value, spec.type):
                report.add("ENUM_VIOLATION", spec.name, f"parameter '{spec.name}' is not a permitted option")
        elif spec.required:
            report.add("MISSING_REQUIRED", spec.name, f"required parameter '{spec.name}' is missing")
    if report.ok:
        normalized = dict(call.arguments)
        for spec in doc.parameters:
            if spec.name not in normalized and spec.default is not None:
                normalized[spec.name] = spec.default
        report.normalized = normalized
    return report


_CODE_TO_KIND = {
    "MISSING_REQUIRED": "missing_required",
    "UNKNOWN_PARAM": "unknown_param",
    "TYPE_MISMATCH": "type_mismatch",
    "ENUM_VIOLATION": "enum_violation",
}


def render_error(behavior: ToolBehavior, kind: str, param: str = "") -> str:
    template = behavior.fallback_errors.get(kind, DEFAULT_ERROR_TEMPLATES[kind])
    return template.format(param=param)


def row_matches(
    row: SuccessRow,
    normalized_args: dict[str, Any],
    resolver: Callable[[str], str | None],
) -> bool:
    """All row bindings must match the call; extra validated args never block.

    Rows containing a reference that the resolver cannot supply do not match.
    """
    for key, expected in row.match.items():
        if key not in normalized_args:
            return False
        resolved = resolve_literal(expected, resolver)
        if resolved is None:
            return False
        if not literals_equal(normalized_args[key], resolved):
            return False
    return True


def invoke(
    behavior: ToolBehavior,
    doc: ToolDocument,
    call: ToolCall,
    resolver: Callable[[str], str | None] = lambda _: None,
) -> ToolResponse:
    """Deterministic, stateless dispatch; every failure is an in-band Error."""
    report = validate_args(doc, call)
    if not report.ok:
        first = report.violations[0]
        kind = _CODE_TO_KIND.get(first.code, "type_mismatch")
        return ToolResponse(ERROR, render_error(behavior, kind, first.subject), code=first.code)
    for row in behavior.success_table:
        if row_matches(row, report.normalized, resolver):
            return ToolResponse(SUCCESS, row.response, matched_subq=row.sub_question)
    return ToolResponse(ERROR, render_error(behavior, "no_match"), code="NO_MATCH")


__all__ = [
    "ToolCall",
    "ToolResponse",
    "ArgumentReport",
    "validate_args",
    "invoke",
    "render_error",
    "row_matches",
    "norm_match_string",
    "Ref",
    "ParameterSpec",
    "SUCCESS",
    "ERROR",
]
