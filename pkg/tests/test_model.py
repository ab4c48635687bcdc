from __future__ import annotations

import dataclasses

import pytest

from toolgym.graph import ScenarioKind
from toolgym.literals import Ref
from toolgym.model import (
    ParameterSpec,
    SubQuestion,
    ToolDocument,
    TypeSpec,
    bundle_to_dict,
    dumps_bundle,
    loads_bundle,
    validate_bundle,
    validate_document,
)
from toolgym.pipeline import ScalingConfig, ScenarioSeed, build_environment, preset_seed

STR = TypeSpec("string")


def make_doc(name="city_lookup", params=None):
    params = params if params is not None else (
        ParameterSpec("city", STR, "City name.", required=True),
        ParameterSpec("year", TypeSpec("integer"), "Optional census year."),
    )
    return ToolDocument(name=name, description="Looks things up.", parameters=params)


class TestValidateDocument:
    def test_well_formed_two_params(self):
        assert validate_document(make_doc()).ok

    def test_duplicate_parameter_name(self):
        doc = make_doc(params=(
            ParameterSpec("unit", STR, required=True),
            ParameterSpec("unit", STR),
        ))
        assert "DUP_PARAM" in validate_document(doc).codes()

    def test_enum_default_outside_enum(self):
        # Minimal counterexample: default not a member of the enum.
        doc = make_doc(params=(
            ParameterSpec("unit", TypeSpec("string", enum_values=("km", "miles")), required=True, default="leagues"),
        ))
        assert "BAD_DEFAULT" in validate_document(doc).codes()

    def test_bad_names(self):
        assert "BAD_NAME" in validate_document(make_doc(name="CityLookup")).codes()
        doc = make_doc(params=(ParameterSpec("City", STR, required=True),))
        assert "BAD_NAME" in validate_document(doc).codes()

    def test_scalar_with_subspec_flagged(self):
        doc = make_doc(params=(
            ParameterSpec("city", TypeSpec("string", element=STR), required=True),
        ))
        assert "UNEXPECTED_SUBSPEC" in validate_document(doc).codes()

    def test_array_without_subspec_flagged(self):
        doc = make_doc(params=(ParameterSpec("cities", TypeSpec("array"), required=True),))
        assert "MISSING_SUBSPEC" in validate_document(doc).codes()

    def test_params_without_any_required_flagged(self):
        doc = make_doc(params=(ParameterSpec("city", STR),))
        assert "NO_REQUIRED" in validate_document(doc).codes()


@pytest.fixture(scope="module")
def generated_bundle():
    seed, cfg = preset_seed(ScenarioKind.MULTI_HOP, 11)
    return build_environment(seed, cfg)


class TestValidateBundle:
    def test_generator_output_is_clean(self, generated_bundle):
        assert validate_bundle(generated_bundle).ok

    def test_self_dependency(self, generated_bundle):
        bad_subqs = tuple(
            dataclasses.replace(sq, depends_on=sq.depends_on + (sq.id,)) if sq.id == "q2" else sq
            for sq in generated_bundle.sub_questions
        )
        bad = dataclasses.replace(generated_bundle, sub_questions=bad_subqs)
        assert "SELF_DEP" in validate_bundle(bad).codes()

    def test_scenario_mismatch(self):
        seed = ScenarioSeed(ScenarioKind.PARALLEL_SINGLE_HOP, n_subq=2, rng_seed=3)
        env = build_environment(seed, ScalingConfig())
        lying = dataclasses.replace(env, scenario=ScenarioKind.MULTI_HOP)
        assert "SCENARIO_MISMATCH" in validate_bundle(lying).codes()

    def test_unknown_tool(self, generated_bundle):
        bad_subqs = tuple(
            dataclasses.replace(sq, tool_name="no_such_tool") if sq.id == "q1" else sq
            for sq in generated_bundle.sub_questions
        )
        bad = dataclasses.replace(generated_bundle, sub_questions=bad_subqs)
        assert "UNKNOWN_TOOL" in validate_bundle(bad).codes()

    def test_distractor_leak_detected(self, generated_bundle):
        answer = generated_bundle.sub_questions[0].answer
        name = generated_bundle.distractor_names[0]
        entries = []
        for item in generated_bundle.toolset:
            if item.document.name == name:
                behavior = dataclasses.replace(
                    item.behavior,
                    fallback_errors={**item.behavior.fallback_errors, "no_match": f"nothing about {answer} here"},
                )
                item = dataclasses.replace(item, behavior=behavior)
            entries.append(item)
        bad = dataclasses.replace(generated_bundle, toolset=tuple(entries))
        assert "DISTRACTOR_LEAK" in validate_bundle(bad).codes()

    def test_empty_answer_flagged(self, generated_bundle):
        bad_subqs = tuple(
            dataclasses.replace(sq, answer="") if sq.id == "q1" else sq
            for sq in generated_bundle.sub_questions
        )
        bad = dataclasses.replace(generated_bundle, sub_questions=bad_subqs)
        assert "EMPTY_ANSWER" in validate_bundle(bad).codes()


class TestSerialization:
    @pytest.mark.parametrize("kind", list(ScenarioKind))
    def test_round_trip_field_for_field(self, kind):
        seed, cfg = preset_seed(kind, 23)
        env = build_environment(seed, cfg)
        again = loads_bundle(dumps_bundle(env))
        assert again == env
        assert dumps_bundle(again) == dumps_bundle(env)

    def test_top_level_keys(self, generated_bundle):
        data = bundle_to_dict(generated_bundle)
        assert list(data.keys()) == [
            "id", "scenario", "question", "final_answer",
            "sub_questions", "tools", "distractors", "rng_seed",
        ]

    def test_document_schema_shape(self, generated_bundle):
        schema = generated_bundle.toolset[0].document.to_schema()
        assert set(schema.keys()) == {"name", "description", "parameters"}
        assert schema["parameters"]["type"] == "object"
        assert isinstance(schema["parameters"]["properties"], dict)
        assert isinstance(schema["parameters"]["required"], list)

    def test_refs_serialize_symbolically(self, generated_bundle):
        data = bundle_to_dict(generated_bundle)
        chained = [sq for sq in data["sub_questions"] if sq["depends_on"]]
        assert chained, "multi-hop bundle must contain dependent sub-questions"
        values = [v for sq in chained for v in sq["canonical_bindings"].values()]
        assert any(isinstance(v, dict) and set(v) == {"ref"} for v in _flatten(values))

    def test_ref_round_trip(self):
        sq = SubQuestion(
            id="q2", text="t", answer="a", depends_on=("q1",),
            tool_name="city_lookup", canonical_bindings={"city": Ref("q1")},
        )
        again = SubQuestion.from_json(sq.to_json())
        assert again == sq


def _flatten(values):
    for v in values:
        if isinstance(v, list):
            yield from _flatten(v)
        else:
            yield v
