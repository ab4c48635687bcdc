"""Domain types for tool documents, behaviors and environment bundles.

All values are immutable after construction; validation is separate and
returns reports instead of raising, so malformed data can be inspected.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any, Iterator

from . import graph as graphmod
from .graph import DependencyGraph, ScenarioKind
from .literals import literal_from_json, literal_to_json

IDENT_RE = re.compile(r"^[a-z][a-z0-9_]{0,63}$")

SCALAR_KINDS = ("string", "number", "integer", "boolean")
CONTAINER_KINDS = ("array", "object")
ALL_KINDS = SCALAR_KINDS + CONTAINER_KINDS


@dataclass(frozen=True)
class TypeSpec:
    """Value type of a parameter; containers carry one level of sub-spec."""

    kind: str
    element: "TypeSpec | None" = None
    properties: tuple[tuple[str, "TypeSpec"], ...] | None = None
    required_props: tuple[str, ...] = ()
    enum_values: tuple[Any, ...] | None = None

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"type": self.kind}
        if self.enum_values is not None:
            out["enum"] = list(self.enum_values)
        if self.kind == "array" and self.element is not None:
            out["items"] = self.element.to_json()
        if self.kind == "object" and self.properties is not None:
            out["properties"] = {name: spec.to_json() for name, spec in self.properties}
            out["required"] = list(self.required_props)
        return out

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "TypeSpec":
        kind = data.get("type", "string")
        element = None
        properties = None
        required_props: tuple[str, ...] = ()
        if kind == "array" and "items" in data:
            element = cls.from_json(data["items"])
        if kind == "object" and "properties" in data:
            properties = tuple((name, cls.from_json(sub)) for name, sub in data["properties"].items())
            required_props = tuple(data.get("required", []))
        enum_values = tuple(data["enum"]) if "enum" in data else None
        return cls(kind, element, properties, required_props, enum_values)


@dataclass(frozen=True)
class ParameterSpec:
    name: str
    type: TypeSpec
    description: str = ""
    required: bool = False
    default: Any = None

    @property
    def value_type(self) -> str:
        return self.type.kind

    @property
    def enum_values(self) -> tuple[Any, ...] | None:
        return self.type.enum_values

    def to_json(self) -> dict[str, Any]:
        out = self.type.to_json()
        if self.description:
            out["description"] = self.description
        if self.default is not None:
            out["default"] = literal_to_json(self.default)
        return out

    @classmethod
    def from_json(cls, name: str, data: dict[str, Any], required: bool) -> "ParameterSpec":
        return cls(
            name=name,
            type=TypeSpec.from_json(data),
            description=data.get("description", ""),
            required=required,
            default=literal_from_json(data["default"]) if "default" in data else None,
        )


@dataclass(frozen=True)
class ToolDocument:
    name: str
    description: str
    parameters: tuple[ParameterSpec, ...] = ()

    def param(self, name: str) -> ParameterSpec | None:
        for spec in self.parameters:
            if spec.name == name:
                return spec
        return None

    @property
    def required_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.parameters if p.required)

    def to_schema(self) -> dict[str, Any]:
        """Interchange shape: name/description plus a JSON-schema object."""
        return {
            "name": self.name,
            "description": self.description,
            "parameters": {
                "type": "object",
                "properties": {p.name: p.to_json() for p in self.parameters},
                "required": list(self.required_names),
            },
        }

    @classmethod
    def from_schema(cls, data: dict[str, Any]) -> "ToolDocument":
        params_obj = data.get("parameters", {})
        required = set(params_obj.get("required", []))
        params = tuple(
            ParameterSpec.from_json(name, sub, name in required)
            for name, sub in params_obj.get("properties", {}).items()
        )
        return cls(name=data["name"], description=data.get("description", ""), parameters=params)


@dataclass(frozen=True)
class SubQuestion:
    id: str
    text: str
    answer: str
    depends_on: tuple[str, ...] = ()
    tool_name: str = ""
    canonical_bindings: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "text": self.text,
            "answer": self.answer,
            "depends_on": list(self.depends_on),
            "tool_name": self.tool_name,
            "canonical_bindings": {k: literal_to_json(v) for k, v in self.canonical_bindings.items()},
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "SubQuestion":
        return cls(
            id=data["id"],
            text=data["text"],
            answer=data["answer"],
            depends_on=tuple(data.get("depends_on", [])),
            tool_name=data.get("tool_name", ""),
            canonical_bindings={
                k: literal_from_json(v) for k, v in data.get("canonical_bindings", {}).items()
            },
        )


@dataclass(frozen=True)
class SuccessRow:
    """One deterministic success case: bindings to match and the response."""

    match: dict[str, Any]
    response: str
    sub_question: str | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "match": {k: literal_to_json(v) for k, v in self.match.items()},
            "response": self.response,
            "sub_question": self.sub_question,
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "SuccessRow":
        return cls(
            match={k: literal_from_json(v) for k, v in data.get("match", {}).items()},
            response=data["response"],
            sub_question=data.get("sub_question"),
        )


# Error kinds a behavior can render; templates may use {param}.
ERROR_KINDS = ("missing_required", "unknown_param", "type_mismatch", "enum_violation", "no_match")

DEFAULT_ERROR_TEMPLATES = {
    "missing_required": "Error: required parameter '{param}' is missing.",
    "unknown_param": "Error: unknown parameter '{param}'.",
    "type_mismatch": "Error: parameter '{param}' has an invalid type.",
    "enum_violation": "Error: parameter '{param}' must be one of the documented options.",
    "no_match": "No matching records found for the given arguments.",
}


@dataclass(frozen=True)
class ToolBehavior:
    tool_name: str
    success_table: tuple[SuccessRow, ...] = ()
    fallback_errors: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_ERROR_TEMPLATES))
    validation: tuple[ParameterSpec, ...] = ()

    def to_json(self) -> dict[str, Any]:
        return {
            "success_table": [row.to_json() for row in self.success_table],
            "errors": dict(self.fallback_errors),
        }

    @classmethod
    def from_json(cls, tool_name: str, data: dict[str, Any], doc: "ToolDocument | None" = None) -> "ToolBehavior":
        return cls(
            tool_name=tool_name,
            success_table=tuple(SuccessRow.from_json(row) for row in data.get("success_table", [])),
            fallback_errors=dict(data.get("errors", DEFAULT_ERROR_TEMPLATES)),
            validation=doc.parameters if doc is not None else (),
        )


@dataclass(frozen=True)
class ToolEntry:
    document: ToolDocument
    behavior: ToolBehavior


@dataclass(frozen=True)
class EnvironmentBundle:
    id: str
    scenario: ScenarioKind
    question: str
    final_answer: str
    sub_questions: tuple[SubQuestion, ...]
    toolset: tuple[ToolEntry, ...]
    distractor_names: tuple[str, ...] = ()
    rng_seed: int = 0

    @property
    def n(self) -> int:
        return len(self.sub_questions)

    def sub_question(self, sq_id: str) -> SubQuestion | None:
        for sq in self.sub_questions:
            if sq.id == sq_id:
                return sq
        return None

    def entry(self, tool_name: str) -> ToolEntry | None:
        for item in self.toolset:
            if item.document.name == tool_name:
                return item
        return None

    def documents(self) -> list[ToolDocument]:
        return [item.document for item in self.toolset]

    def graph(self) -> DependencyGraph:
        nodes = tuple(sq.id for sq in self.sub_questions)
        edges = []
        for sq in self.sub_questions:
            for dep in sq.depends_on:
                edges.append((dep, sq.id))
        return DependencyGraph(nodes=nodes, edges=tuple(edges))

    def answers(self) -> dict[str, str]:
        return {sq.id: sq.answer for sq in self.sub_questions}


@dataclass(frozen=True)
class Violation:
    code: str
    subject: str
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def add(self, code: str, subject: str, message: str) -> None:
        self.violations.append(Violation(code, subject, message))

    def extend(self, other: "ValidationReport") -> None:
        self.violations.extend(other.violations)

    def summary(self) -> str:
        return "; ".join(f"{v.code}({v.subject}): {v.message}" for v in self.violations) or "ok"


def _validate_typespec(spec: TypeSpec, report: ValidationReport, subject: str) -> None:
    if spec.kind not in ALL_KINDS:
        report.add("BAD_TYPE", subject, f"unknown value type {spec.kind!r}")
        return
    if spec.kind == "array":
        if spec.element is None:
            report.add("MISSING_SUBSPEC", subject, "array type needs an element sub-spec")
        else:
            _validate_typespec(spec.element, report, subject + "[]")
    elif spec.kind == "object":
        if spec.properties is None:
            report.add("MISSING_SUBSPEC", subject, "object type needs property sub-specs")
        else:
            names = [name for name, _ in spec.properties]
            if len(names) != len(set(names)):
                report.add("DUP_PARAM", subject, "duplicate object property")
            for name, sub in spec.properties:
                _validate_typespec(sub, report, f"{subject}.{name}")
            for req in spec.required_props:
                if req not in names:
                    report.add("MISSING_SUBSPEC", subject, f"required property {req!r} undeclared")
    else:
        if spec.element is not None or spec.properties is not None:
            report.add("UNEXPECTED_SUBSPEC", subject, "scalar types carry no sub-spec")
    if spec.enum_values is not None and spec.kind in CONTAINER_KINDS:
        report.add("BAD_ENUM", subject, "enum applies to scalar types only")


def validate_document(doc: ToolDocument) -> ValidationReport:
    """Check structural well-formedness; violations are data, not failures."""
    report = ValidationReport()
    if not IDENT_RE.match(doc.name):
        report.add("BAD_NAME", doc.name or "<empty>", "tool name must match [a-z][a-z0-9_]{0,63}")
    seen: set[str] = set()
    for spec in doc.parameters:
        subject = f"{doc.name}.{spec.name}"
        if not IDENT_RE.match(spec.name):
            report.add("BAD_NAME", subject, "parameter name must match [a-z][a-z0-9_]{0,63}")
        if spec.name in seen:
            report.add("DUP_PARAM", subject, "duplicate parameter name")
        seen.add(spec.name)
        _validate_typespec(spec.type, report, subject)
        if spec.default is not None and spec.enum_values is not None:
            if not any(spec.default == option for option in spec.enum_values):
                report.add("BAD_DEFAULT", subject, f"default {spec.default!r} not in enum")
    if doc.parameters and not doc.required_names:
        report.add("NO_REQUIRED", doc.name, "tools with parameters need at least one required parameter")
    return report


def _iter_binding_refs(value: Any) -> Iterator[str]:
    from .literals import Ref

    if isinstance(value, Ref):
        yield value.target
    elif isinstance(value, list):
        for item in value:
            yield from _iter_binding_refs(item)
    elif isinstance(value, dict):
        for item in value.values():
            yield from _iter_binding_refs(item)


def validate_bundle(env: EnvironmentBundle) -> ValidationReport:
    report = ValidationReport()
    if not env.sub_questions:
        report.add("EMPTY_SUBQS", env.id, "bundle carries no sub-questions")

    doc_names = [item.document.name for item in env.toolset]
    for name in doc_names:
        if doc_names.count(name) > 1:
            report.add("DUP_TOOL", name, "duplicate tool name in toolset")
            break
    for item in env.toolset:
        report.extend(validate_document(item.document))
        if item.behavior.tool_name != item.document.name:
            report.add("BEHAVIOR_NAME_MISMATCH", item.document.name, "behavior paired with wrong document")
        declared = {p.name for p in item.document.parameters}
        for row in item.behavior.success_table:
            for key in row.match:
                if key not in declared:
                    report.add("BEHAVIOR_UNKNOWN_PARAM", f"{item.document.name}.{key}", "match bindings reference undeclared parameter")
            if row.sub_question is not None:
                sq = env.sub_question(row.sub_question)
                if sq is None:
                    report.add("BEHAVIOR_UNKNOWN_SUBQ", item.document.name, f"row references unknown sub-question {row.sub_question}")
                elif sq.answer not in row.response:
                    report.add("RESPONSE_MISSING_ANSWER", f"{item.document.name}:{row.sub_question}", "success response must contain the answer verbatim")

    seen_ids: set[str] = set()
    for sq in env.sub_questions:
        if sq.id in seen_ids:
            report.add("DUP_SUBQ", sq.id, "duplicate sub-question id")
        seen_ids.add(sq.id)
        if not sq.answer:
            report.add("EMPTY_ANSWER", sq.id, "answer is empty")
        if sq.id in sq.depends_on:
            report.add("SELF_DEP", sq.id, "sub-question depends on itself")
        if len(set(sq.depends_on)) != len(sq.depends_on):
            report.add("DUP_DEP", sq.id, "duplicate dependency")
        if env.entry(sq.tool_name) is None:
            report.add("UNKNOWN_TOOL", sq.id, f"tool {sq.tool_name!r} not in toolset")
        for value in sq.canonical_bindings.values():
            for target in _iter_binding_refs(value):
                if target not in sq.depends_on:
                    report.add("BINDING_REF_NOT_DEP", sq.id, f"binding references {target!r} outside depends_on")

    for sq in env.sub_questions:
        for dep in sq.depends_on:
            if dep not in seen_ids:
                report.add("MISSING_DEP", sq.id, f"dependency {dep!r} is not a declared sub-question")

    graph = env.graph()
    structural = graphmod.check_structure(graph)
    if structural:
        for problem in structural:
            if "cycle" in problem:
                report.add("CYCLE", env.id, problem)
    elif env.sub_questions:
        kind = graphmod.classify(graph)
        if kind is not env.scenario:
            report.add("SCENARIO_MISMATCH", env.id, f"stored {env.scenario.wire}, classified {kind.wire}")

    answers = [sq.answer for sq in env.sub_questions if sq.answer]
    mapped_tools = {sq.tool_name for sq in env.sub_questions}
    for name in env.distractor_names:
        entry = env.entry(name)
        if entry is None:
            report.add("DISTRACTOR_UNKNOWN", name, "distractor name not in toolset")
            continue
        if name in mapped_tools or any(row.sub_question for row in entry.behavior.success_table):
            report.add("DISTRACTOR_MAPPED", name, "distractor must not serve any sub-question")
        templates = [row.response for row in entry.behavior.success_table]
        templates.extend(entry.behavior.fallback_errors.values())
        for template in templates:
            low = template.casefold()
            for answer in answers:
                if answer.casefold() in low:
                    report.add("DISTRACTOR_LEAK", name, f"distractor output contains answer {answer!r}")
    return report


def bundle_to_dict(env: EnvironmentBundle) -> dict[str, Any]:
    return {
        "id": env.id,
        "scenario": env.scenario.wire,
        "question": env.question,
        "final_answer": env.final_answer,
        "sub_questions": [sq.to_json() for sq in env.sub_questions],
        "tools": [
            {"document": item.document.to_schema(), "behavior": item.behavior.to_json()}
            for item in env.toolset
        ],
        "distractors": list(env.distractor_names),
        "rng_seed": env.rng_seed,
    }


def bundle_from_dict(data: dict[str, Any]) -> EnvironmentBundle:
    toolset = []
    for item in data.get("tools", []):
        doc = ToolDocument.from_schema(item["document"])
        toolset.append(ToolEntry(doc, ToolBehavior.from_json(doc.name, item.get("behavior", {}), doc)))
    return EnvironmentBundle(
        id=data["id"],
        scenario=ScenarioKind.from_wire(data["scenario"]),
        question=data["question"],
        final_answer=data["final_answer"],
        sub_questions=tuple(SubQuestion.from_json(sq) for sq in data.get("sub_questions", [])),
        toolset=tuple(toolset),
        distractor_names=tuple(data.get("distractors", [])),
        rng_seed=int(data.get("rng_seed", 0)),
    )


def dumps_bundle(env: EnvironmentBundle) -> str:
    return json.dumps(bundle_to_dict(env), ensure_ascii=False, indent=2) + "\n"


def loads_bundle(text: str) -> EnvironmentBundle:
    return bundle_from_dict(json.loads(text))


def save_bundle(env: EnvironmentBundle, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_bundle(env))


def load_bundle(path: str) -> EnvironmentBundle:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_bundle(fh.read())
