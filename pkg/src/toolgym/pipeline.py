"""Five-stage construction of tool-use environments.

Stages: decompose a scenario seed into a dependency shape, generate
sub-questions and one tool document each, merge overlapping documents,
deploy documents into deterministic behaviors, then scale complexity
(optional parameters, richer types, distractor tools).
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import random
from dataclasses import dataclass
from typing import Any

from .domains import (
    ENTITY_DOMAINS,
    QUESTION_DOMAINS,
    DistractorCatalog,
    DomainTemplate,
    domain_by_name,
    make_name,
)
from .errors import DeployError, PipelineError
from .graph import ScenarioKind
from .literals import Ref
from .model import (
    DEFAULT_ERROR_TEMPLATES,
    EnvironmentBundle,
    ParameterSpec,
    SubQuestion,
    SuccessRow,
    ToolBehavior,
    ToolDocument,
    ToolEntry,
    TypeSpec,
    validate_bundle,
)

RESPONSE_TEMPLATE = "Query successful. Result: {answer}"


def _rng_for(*parts: object) -> random.Random:
    payload = "|".join(str(p) for p in parts).encode("utf-8")
    return random.Random(int.from_bytes(hashlib.sha256(payload).digest()[:8], "big"))


def _short_digest(*parts: object) -> str:
    payload = "|".join(str(p) for p in parts).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()[:12]


@dataclass(frozen=True)
class ScenarioSeed:
    scenario: ScenarioKind
    n_subq: int
    rng_seed: int
    templates: tuple[str, ...] | None = None   # pinned domain tool names, hop order

    def check(self) -> None:
        if self.scenario is ScenarioKind.SINGLE_HOP:
            if self.n_subq != 1:
                raise PipelineError("BAD_SEED", "single-hop seeds take exactly one sub-question", stage="decompose")
        elif self.n_subq < 2:
            raise PipelineError("BAD_SEED", "composite scenarios need at least two sub-questions", stage="decompose")
        if self.scenario is ScenarioKind.PARALLEL_MULTI_HOP and self.n_subq < 3:
            raise PipelineError("BAD_SEED", "parallel multi-hop needs at least three sub-questions", stage="decompose")
        if self.templates is not None and len(self.templates) != self.n_subq:
            raise PipelineError("BAD_SEED", "pinned templates must cover every sub-question", stage="decompose")


@dataclass(frozen=True)
class ScalingConfig:
    functional_generalization: bool = False
    parameter_expansion: int = 0
    type_generalization: float = 0.0
    toolset_extension: int = 0
    rng_seed: int = 0

    def check(self) -> None:
        if self.toolset_extension < 0:
            raise PipelineError("BAD_CONFIG", "toolset_extension must be >= 0", stage="scale")
        if not 0.0 <= self.type_generalization <= 1.0:
            raise PipelineError("BAD_CONFIG", "type_generalization must be in [0, 1]", stage="scale")
        if self.parameter_expansion < 0:
            raise PipelineError("BAD_CONFIG", "parameter_expansion must be >= 0", stage="scale")

    def canonical(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True)


@dataclass(frozen=True)
class MergeGroup:
    ids: tuple[int, ...]
    merged: ToolDocument


@dataclass(frozen=True)
class MergePlan:
    groups: tuple[MergeGroup, ...]
    untouched: tuple[int, ...]

    def remapping(self, docs: list[ToolDocument]) -> dict[str, str]:
        """Old tool name -> merged tool name for every merged member."""
        mapping: dict[str, str] = {}
        for group in self.groups:
            for idx in group.ids:
                mapping[docs[idx].name] = group.merged.name
        return mapping


def decompose(seed: ScenarioSeed) -> list[list[str]]:
    """Chains of sub-question ids realizing the seed's scenario shape."""
    seed.check()
    rng = _rng_for(seed.rng_seed, "decompose")
    n = seed.n_subq
    ids = [f"q{i + 1}" for i in range(n)]
    if seed.scenario is ScenarioKind.SINGLE_HOP:
        return [ids]
    if seed.scenario is ScenarioKind.PARALLEL_SINGLE_HOP:
        return [[sq_id] for sq_id in ids]
    if seed.scenario is ScenarioKind.MULTI_HOP:
        return [ids]
    compositions = _chain_compositions(n)
    lengths = list(rng.choice(compositions))
    chains: list[list[str]] = []
    cursor = 0
    for length in lengths:
        chains.append(ids[cursor:cursor + length])
        cursor += length
    return chains


def _chain_compositions(n: int) -> list[tuple[int, ...]]:
    """Orderings of chain lengths for a hybrid scenario.

    Prefers 2-3 chains of length 2-4; falls back to length-1 chains when the
    total cannot be covered otherwise.  At least one chain has length >= 2 so
    the result classifies as parallel multi-hop.
    """
    preferred: list[tuple[int, ...]] = []
    fallback: list[tuple[int, ...]] = []
    for count in (2, 3):
        for combo in _compositions(n, count, 1, max(4, n)):
            if max(combo) < 2:
                continue
            if all(2 <= part <= 4 for part in combo):
                preferred.append(combo)
            else:
                fallback.append(combo)
    options = preferred or fallback
    if not options:
        raise PipelineError("BAD_SEED", f"cannot arrange {n} sub-questions into parallel chains", stage="decompose")
    return sorted(options)


def _compositions(total: int, parts: int, lo: int, hi: int) -> list[tuple[int, ...]]:
    if parts == 1:
        return [(total,)] if lo <= total <= hi else []
    out: list[tuple[int, ...]] = []
    for head in range(lo, hi + 1):
        for tail in _compositions(total - head, parts - 1, lo, hi):
            out.append((head,) + tail)
    return out


@dataclass
class GenerationResult:
    question: str
    final_answer: str
    sub_questions: list[SubQuestion]
    documents: list[ToolDocument]


def _draw_unique(category: str, rng: random.Random, used: set[str]) -> str:
    for _ in range(64):
        candidate = make_name(category, rng)
        if candidate not in used:
            used.add(candidate)
            return candidate
    raise PipelineError("NAME_SPACE_EXHAUSTED", f"cannot draw a fresh {category} name", stage="generate")


def _pick_domains(seed: ScenarioSeed, chains: list[list[str]], rng: random.Random) -> list[list[DomainTemplate]]:
    """One domain per hop; chain-interior hops need entity-valued answers."""
    if seed.templates is not None:
        flat = [domain_by_name(name) for name in seed.templates]
        picked: list[list[DomainTemplate]] = []
        cursor = 0
        for chain in chains:
            picked.append(flat[cursor:cursor + len(chain)])
            cursor += len(chain)
        for chain_domains in picked:
            for domain in chain_domains[:-1]:
                if not domain.chainable_answer:
                    raise PipelineError(
                        "BAD_SEED",
                        f"domain {domain.tool_name} cannot feed a dependent hop",
                        stage="generate",
                    )
        return picked

    used: set[str] = set()

    def take(pool: tuple[DomainTemplate, ...], prefer_category: str | None) -> DomainTemplate:
        fresh = [d for d in pool if d.tool_name not in used]
        if not fresh:
            # Catalog smaller than the request: reuse is allowed, merging
            # collapses duplicates downstream.
            fresh = list(pool)
        preferred = [d for d in fresh if d.subject_category == prefer_category]
        choice = rng.choice(preferred or fresh)
        used.add(choice.tool_name)
        return choice

    picked = []
    for chain in chains:
        chain_domains: list[DomainTemplate] = []
        for hop_index in range(len(chain)):
            interior = hop_index < len(chain) - 1
            prev = chain_domains[-1].answer_category if chain_domains else None
            chain_domains.append(take(ENTITY_DOMAINS if interior else QUESTION_DOMAINS, prev))
        picked.append(chain_domains)
    return picked


def generate_documents(seed: ScenarioSeed, backend=None) -> GenerationResult:
    """Stage 2: sub-questions with canonical bindings plus one document each.

    Documents come out parallel to the sub-questions (a one-to-one mapping);
    integration may later collapse duplicates.
    """
    seed.check()
    rng = _rng_for(seed.rng_seed, "generate")
    chains = decompose(seed)
    domains = _pick_domains(seed, chains, rng)

    used_names: set[str] = set()
    used_answers: set[str] = set()
    sub_questions: list[SubQuestion] = []
    documents: list[ToolDocument] = []
    chain_answers: list[str] = []

    for chain, chain_domains in zip(chains, domains):
        for hop_index, (sq_id, domain) in enumerate(zip(chain, chain_domains)):
            extras = {name: _draw_unique(category, rng, used_names) for name, category in domain.extra_subjects}
            bindings: dict[str, Any] = {}
            if hop_index == 0:
                subject = _draw_unique(domain.subject_category, rng, used_names)
                bindings[domain.subject_param] = subject
                inner = subject
            else:
                dep = chain[hop_index - 1]
                bindings[domain.subject_param] = Ref(dep)
                inner = f"the {domain.subject_noun} identified in {dep}"
            bindings.update({name: value for name, value in domain.fixed_bindings})
            bindings.update(extras)
            answer = domain.make_answer(rng)
            for _ in range(64):
                if answer not in used_answers:
                    break
                answer = domain.make_answer(rng)
            else:
                raise PipelineError("NAME_SPACE_EXHAUSTED", "cannot draw a fresh answer", stage="generate")
            used_answers.add(answer)
            text = domain.question_tpl.format(inner=inner, **extras)
            depends = (chain[hop_index - 1],) if hop_index > 0 else ()
            sub_questions.append(
                SubQuestion(
                    id=sq_id,
                    text=text,
                    answer=answer,
                    depends_on=depends,
                    tool_name=domain.tool_name,
                    canonical_bindings=bindings,
                )
            )
            documents.append(domain.document())
        chain_answers.append(sub_questions[-1].answer)

    question = _compose_question(chains, domains, sub_questions)
    final_answer = "; ".join(chain_answers)

    if backend is not None:
        sub_questions, documents = _backend_documents(backend, sub_questions, documents)

    return GenerationResult(
        question=question,
        final_answer=final_answer,
        sub_questions=sub_questions,
        documents=documents,
    )


def _compose_question(
    chains: list[list[str]],
    domains: list[list[DomainTemplate]],
    sub_questions: list[SubQuestion],
) -> str:
    by_id = {sq.id: sq for sq in sub_questions}
    parts: list[str] = []
    for chain, chain_domains in zip(chains, domains):
        inner = ""
        for hop_index, (sq_id, domain) in enumerate(zip(chain, chain_domains)):
            sq = by_id[sq_id]
            extras = {name: sq.canonical_bindings[name] for name, _ in domain.extra_subjects}
            if hop_index == 0:
                inner = sq.canonical_bindings[domain.subject_param]
            elif chain_domains[hop_index - 1].answer_category != domain.subject_category:
                # Bridge category jumps so the nested phrase stays grammatical.
                inner = f"the {domain.subject_noun} associated with {inner}"
            if hop_index == len(chain) - 1:
                parts.append(domain.question_tpl.format(inner=inner, **extras))
            else:
                inner = domain.phrase_tpl.format(inner=inner, **extras)
    if len(parts) == 1:
        return parts[0]
    numbered = " ".join(f"({i + 1}) {part}" for i, part in enumerate(parts))
    return f"Answer each of the following. {numbered}"


def _backend_documents(
    backend, sub_questions: list[SubQuestion], skeletons: list[ToolDocument]
) -> tuple[list[SubQuestion], list[ToolDocument]]:
    """Let a generation backend redesign each document from its sub-question.

    The redesigned document may carry a new name; sub-questions follow it.
    Every canonical binding parameter must survive the redesign.
    """
    out_docs: list[ToolDocument] = []
    out_subqs: list[SubQuestion] = []
    designed: dict[str, ToolDocument] = {}
    for sq, skeleton in zip(sub_questions, skeletons):
        if skeleton.name in designed:
            doc = designed[skeleton.name]
        else:
            doc = backend.design_tool(sq.text, skeleton)
            missing = set(sq.canonical_bindings) - {p.name for p in doc.parameters}
            if missing:
                raise PipelineError(
                    "BACKEND_FAILURE",
                    f"backend document for {sq.tool_name} lacks parameters {sorted(missing)}",
                    stage="generate",
                )
            designed[skeleton.name] = doc
        out_docs.append(doc)
        out_subqs.append(dataclasses.replace(sq, tool_name=doc.name))
    return out_subqs, out_docs


_NAME_SPLIT = "_"


def _name_tokens(name: str) -> frozenset[str]:
    return frozenset(tok for tok in name.split(_NAME_SPLIT) if tok)


def _desc_tokens(description: str) -> frozenset[str]:
    words = "".join(ch.lower() if ch.isalnum() else " " for ch in description).split()
    return frozenset(words)


def _jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def _should_merge(a: ToolDocument, b: ToolDocument) -> bool:
    if _name_tokens(a.name) == _name_tokens(b.name):
        return True
    params_a = {p.name for p in a.parameters}
    params_b = {p.name for p in b.parameters}
    return _jaccard(_desc_tokens(a.description), _desc_tokens(b.description)) >= 0.5 and bool(params_a & params_b)


def _merge_docs(members: list[ToolDocument]) -> ToolDocument:
    base = members[0]
    params: list[ParameterSpec] = list(base.parameters)
    seen = {p.name for p in params}
    required = set(base.required_names)
    for doc in members[1:]:
        required &= set(doc.required_names)
        for spec in doc.parameters:
            if spec.name not in seen:
                params.append(dataclasses.replace(spec, required=False))
                seen.add(spec.name)
    merged_params = tuple(
        dataclasses.replace(spec, required=spec.name in required) for spec in params
    )
    return ToolDocument(name=base.name, description=base.description, parameters=merged_params)


def integrate_functions(docs: list[ToolDocument]) -> MergePlan:
    """Stage 3: group overlapping documents; deterministic for a fixed order."""
    if not docs:
        raise PipelineError("BAD_INPUT", "integration needs at least one document", stage="integrate")
    parent = list(range(len(docs)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(docs)):
        for j in range(i + 1, len(docs)):
            if _should_merge(docs[i], docs[j]):
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    clusters: dict[int, list[int]] = {}
    for i in range(len(docs)):
        clusters.setdefault(find(i), []).append(i)

    groups: list[MergeGroup] = []
    untouched: list[int] = []
    for root in sorted(clusters):
        members = sorted(clusters[root])
        if len(members) == 1:
            untouched.append(members[0])
        else:
            groups.append(MergeGroup(ids=tuple(members), merged=_merge_docs([docs[i] for i in members])))
    return MergePlan(groups=tuple(groups), untouched=tuple(untouched))


def apply_merge_plan(
    plan: MergePlan, docs: list[ToolDocument], sub_questions: list[SubQuestion]
) -> tuple[list[ToolDocument], list[SubQuestion]]:
    mapping = plan.remapping(docs)
    merged_docs: list[ToolDocument] = []
    emitted: set[str] = set()
    merged_by_first = {group.ids[0]: group.merged for group in plan.groups}
    skip = {idx for group in plan.groups for idx in group.ids[1:]}
    for idx, doc in enumerate(docs):
        if idx in skip:
            continue
        out = merged_by_first.get(idx, doc)
        if out.name not in emitted:
            merged_docs.append(out)
            emitted.add(out.name)
    remapped = [
        dataclasses.replace(sq, tool_name=mapping.get(sq.tool_name, sq.tool_name))
        for sq in sub_questions
    ]
    return merged_docs, remapped


def _binding_type_ok(value: Any, spec: TypeSpec) -> bool:
    """Type-check a canonical binding; refs stand in for answer strings."""
    if isinstance(value, Ref):
        return spec.kind == "string"
    if spec.kind == "array":
        return isinstance(value, list) and (
            spec.element is None or all(_binding_type_ok(v, spec.element) for v in value)
        )
    if spec.kind == "object":
        if not isinstance(value, dict) or spec.properties is None:
            return isinstance(value, dict)
        declared = dict(spec.properties)
        if any(k not in declared for k in value):
            return False
        if any(req not in value for req in spec.required_props):
            return False
        return all(_binding_type_ok(v, declared[k]) for k, v in value.items())
    from .runtime import _check_enum, _value_matches_type

    return _value_matches_type(value, spec) and _check_enum(value, spec)


def deploy(doc: ToolDocument, qa_pairs: list[tuple[SubQuestion, str]]) -> ToolBehavior:
    """Stage 5: compile a document plus QA pairs into a response table."""
    rows: list[SuccessRow] = []
    seen_matches: list[dict[str, Any]] = []
    declared = {p.name: p for p in doc.parameters}
    for sq, answer in qa_pairs:
        if sq.tool_name != doc.name:
            raise DeployError("BAD_PAIR", f"sub-question {sq.id} belongs to {sq.tool_name}, not {doc.name}", stage="deploy")
        for key, value in sq.canonical_bindings.items():
            spec = declared.get(key)
            if spec is None:
                raise DeployError("BINDING_TYPE_MISMATCH", f"parameter '{key}' is not declared by {doc.name}", stage="deploy")
            if not _binding_type_ok(value, spec.type):
                raise DeployError("BINDING_TYPE_MISMATCH", f"binding for parameter '{key}' does not fit its declared type", stage="deploy")
        missing = [name for name, spec in declared.items() if spec.required and name not in sq.canonical_bindings]
        if missing:
            raise DeployError("BINDING_TYPE_MISMATCH", f"canonical bindings for {sq.id} miss required parameter '{missing[0]}'", stage="deploy")
        if any(sq.canonical_bindings == prior for prior in seen_matches):
            raise DeployError("AMBIGUOUS_ROW", f"duplicate canonical bindings within {doc.name}", stage="deploy")
        seen_matches.append(dict(sq.canonical_bindings))
        rows.append(
            SuccessRow(
                match=dict(sq.canonical_bindings),
                response=RESPONSE_TEMPLATE.format(answer=answer),
                sub_question=sq.id,
            )
        )
    return ToolBehavior(
        tool_name=doc.name,
        success_table=tuple(rows),
        fallback_errors=dict(DEFAULT_ERROR_TEMPLATES),
        validation=doc.parameters,
    )


_EXPANSION_POOL: tuple[ParameterSpec, ...] = (
    ParameterSpec("locale", TypeSpec("string"), "Locale code for formatting the response."),
    ParameterSpec("verbose", TypeSpec("boolean"), "Return extended diagnostics. Default is false.", default=False),
    ParameterSpec("max_results", TypeSpec("integer"), "Upper bound on returned records."),
    ParameterSpec("include_metadata", TypeSpec("boolean"), "Attach provenance metadata. Default is false.", default=False),
    ParameterSpec("response_format", TypeSpec("string", enum_values=("plain", "detailed")), "Shape of the textual response. Default is 'plain'.", default="plain"),
    ParameterSpec("timeout_s", TypeSpec("number"), "Soft timeout for the lookup, in seconds."),
    ParameterSpec("page", TypeSpec("integer"), "Result page to return."),
    ParameterSpec("trace_id", TypeSpec("string"), "Opaque identifier echoed into logs."),
)


def _wrap_literal(value: Any, style: str) -> Any:
    return [value] if style == "array" else {"value": value}


def _wrap_spec(spec: ParameterSpec, style: str) -> ParameterSpec:
    inner = spec.type
    if style == "array":
        wrapped = TypeSpec("array", element=inner)
    else:
        wrapped = TypeSpec("object", properties=(("value", inner),), required_props=("value",))
    default = _wrap_literal(spec.default, style) if spec.default is not None else None
    return dataclasses.replace(spec, type=wrapped, default=default)


def scale_complexity(
    env: EnvironmentBundle,
    cfg: ScalingConfig,
    catalog: DistractorCatalog | None = None,
    backend=None,
) -> EnvironmentBundle:
    """Stage 4: harden the environment without breaking its solvability."""
    cfg.check()
    rng = _rng_for(cfg.rng_seed, "scale", env.id)
    catalog = catalog or DistractorCatalog.default()

    mapped_tools = {sq.tool_name for sq in env.sub_questions}
    sub_questions = list(env.sub_questions)
    entries: list[ToolEntry] = []

    for item in env.toolset:
        doc, behavior = item.document, item.behavior
        if doc.name in mapped_tools:
            doc, behavior, sub_questions = _generalize_types(doc, behavior, sub_questions, cfg, rng)
            doc = _expand_parameters(doc, cfg, rng)
            if cfg.functional_generalization and backend is not None:
                refined = backend.refine_description(doc)
                if refined.name == doc.name and set(refined.required_names) == set(doc.required_names):
                    doc = dataclasses.replace(doc, description=refined.description)
            behavior = dataclasses.replace(behavior, validation=doc.parameters)
        entries.append(ToolEntry(doc, behavior))

    existing = {entry.document.name for entry in entries}
    available = catalog.available(existing)
    if cfg.toolset_extension > len(available):
        raise PipelineError(
            "CATALOG_EXHAUSTED",
            f"need {cfg.toolset_extension} distractors, catalog offers {len(available)}",
            stage="scale",
        )
    drawn = rng.sample(available, cfg.toolset_extension) if cfg.toolset_extension else []
    answers = [sq.answer for sq in sub_questions]
    distractor_names = list(env.distractor_names)
    for domain in drawn:
        doc = domain.document()
        behavior = ToolBehavior(
            tool_name=doc.name,
            success_table=(),
            fallback_errors=dict(DEFAULT_ERROR_TEMPLATES),
            validation=doc.parameters,
        )
        _assert_no_leak(behavior, answers)
        entries.append(ToolEntry(doc, behavior))
        distractor_names.append(doc.name)

    scaled = dataclasses.replace(
        env,
        sub_questions=tuple(sub_questions),
        toolset=tuple(entries),
        distractor_names=tuple(distractor_names),
    )
    report = validate_bundle(scaled)
    if not report.ok:
        raise PipelineError("STAGE_INVALID", f"scaling produced an invalid bundle: {report.summary()}", stage="scale")
    return scaled


def _assert_no_leak(behavior: ToolBehavior, answers: list[str]) -> None:
    templates = [row.response for row in behavior.success_table]
    templates.extend(behavior.fallback_errors.values())
    for template in templates:
        low = template.casefold()
        for answer in answers:
            if answer and answer.casefold() in low:
                raise PipelineError("DISTRACTOR_LEAK", "distractor template contains a sub-question answer", stage="scale")


def _expand_parameters(doc: ToolDocument, cfg: ScalingConfig, rng: random.Random) -> ToolDocument:
    if cfg.parameter_expansion <= 0:
        return doc
    existing = {p.name for p in doc.parameters}
    pool = [p for p in _EXPANSION_POOL if p.name not in existing]
    count = rng.randint(0, min(cfg.parameter_expansion, len(pool)))
    if count == 0:
        return doc
    added = rng.sample(pool, count)
    return dataclasses.replace(doc, parameters=doc.parameters + tuple(added))


def _generalize_types(
    doc: ToolDocument,
    behavior: ToolBehavior,
    sub_questions: list[SubQuestion],
    cfg: ScalingConfig,
    rng: random.Random,
) -> tuple[ToolDocument, ToolBehavior, list[SubQuestion]]:
    if cfg.type_generalization <= 0.0:
        return doc, behavior, sub_questions
    new_params: list[ParameterSpec] = []
    wrapped: dict[str, str] = {}
    for spec in doc.parameters:
        if spec.type.kind in ("string", "number", "integer", "boolean") and rng.random() < cfg.type_generalization:
            style = rng.choice(("array", "object"))
            wrapped[spec.name] = style
            new_params.append(_wrap_spec(spec, style))
        else:
            new_params.append(spec)
    if not wrapped:
        return doc, behavior, sub_questions
    doc = dataclasses.replace(doc, parameters=tuple(new_params))

    def rewrite(bindings: dict[str, Any]) -> dict[str, Any]:
        return {
            key: _wrap_literal(value, wrapped[key]) if key in wrapped else value
            for key, value in bindings.items()
        }

    rows = tuple(dataclasses.replace(row, match=rewrite(row.match)) for row in behavior.success_table)
    behavior = dataclasses.replace(behavior, success_table=rows)
    sub_questions = [
        dataclasses.replace(sq, canonical_bindings=rewrite(sq.canonical_bindings))
        if sq.tool_name == doc.name
        else sq
        for sq in sub_questions
    ]
    return doc, behavior, sub_questions


def build_environment(
    seed: ScenarioSeed,
    cfg: ScalingConfig | None = None,
    backend=None,
    catalog: DistractorCatalog | None = None,
) -> EnvironmentBundle:
    """Run all stages and return a validated bundle."""
    cfg = cfg or ScalingConfig()
    seed.check()
    cfg.check()

    generated = generate_documents(seed, backend)

    if backend is not None:
        plan = backend.plan_merge(generated.documents)
        if plan is None:
            plan = integrate_functions(generated.documents)
    else:
        plan = integrate_functions(generated.documents)
    docs, sub_questions = apply_merge_plan(plan, generated.documents, generated.sub_questions)

    by_tool: dict[str, list[tuple[SubQuestion, str]]] = {}
    for sq in sub_questions:
        by_tool.setdefault(sq.tool_name, []).append((sq, sq.answer))
    entries = [ToolEntry(doc, deploy(doc, by_tool.get(doc.name, []))) for doc in docs]

    bundle_id = "env-" + _short_digest(seed.scenario.wire, seed.n_subq, seed.rng_seed, cfg.canonical())
    base = EnvironmentBundle(
        id=bundle_id,
        scenario=seed.scenario,
        question=generated.question,
        final_answer=generated.final_answer,
        sub_questions=tuple(sub_questions),
        toolset=tuple(entries),
        distractor_names=(),
        rng_seed=seed.rng_seed,
    )
    report = validate_bundle(base)
    if not report.ok:
        raise PipelineError("STAGE_INVALID", f"generation produced an invalid bundle: {report.summary()}", stage="deploy")
    return scale_complexity(base, cfg, catalog, backend=backend)


# Documented presets reproducing the structural statistics of the reference
# splits (average sub-questions and toolset sizes per scenario).
PRESET_SPLITS: dict[str, dict[ScenarioKind, dict[str, Any]]] = {
    "test": {
        ScenarioKind.SINGLE_HOP: {"n": (1,), "distractors": 7},
        ScenarioKind.PARALLEL_SINGLE_HOP: {"n": (2,), "distractors": 5},
        ScenarioKind.MULTI_HOP: {"n": (5, 6), "distractors": 5},
        ScenarioKind.PARALLEL_MULTI_HOP: {"n": None, "distractors": 4},
    },
    "train": {
        ScenarioKind.SINGLE_HOP: {"n": (1,), "distractors": 7},
        ScenarioKind.PARALLEL_SINGLE_HOP: {"n": (2,), "distractors": 6},
        ScenarioKind.MULTI_HOP: {"n": (4, 5), "distractors": 5},
        ScenarioKind.PARALLEL_MULTI_HOP: {"n": None, "distractors": 3},
    },
}


def _sample_pmh_n(rng: random.Random) -> int:
    chains = rng.choice((2, 3))
    return sum(rng.choice((2, 3, 4)) for _ in range(chains))


def preset_seed(
    scenario: ScenarioKind,
    rng_seed: int,
    split: str = "test",
    scaling_overrides: dict[str, Any] | None = None,
) -> tuple[ScenarioSeed, ScalingConfig]:
    """Seed plus scaling config under a documented split preset."""
    try:
        preset = PRESET_SPLITS[split][scenario]
    except KeyError as exc:
        raise PipelineError("BAD_CONFIG", f"unknown preset split {split!r}", stage="decompose") from exc
    rng = _rng_for(rng_seed, "preset", scenario.wire, split)
    if preset["n"] is None:
        n = _sample_pmh_n(rng)
    else:
        n = rng.choice(preset["n"])
    cfg_fields: dict[str, Any] = {
        "parameter_expansion": 2,
        "type_generalization": 0.25,
        "toolset_extension": preset["distractors"],
        "rng_seed": rng_seed,
    }
    cfg_fields.update(scaling_overrides or {})
    return ScenarioSeed(scenario=scenario, n_subq=n, rng_seed=rng_seed), ScalingConfig(**cfg_fields)
