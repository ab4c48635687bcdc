from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toolgym.rewards import (
    RewardVariant,
    TurnKind,
    TurnStats,
    answer_correctness,
    normalize_answer_text,
    pass_hat_1,
    solve_scores,
    ts_pi_cf,
    turn_reward,
)
from toolgym.runtime import ToolCall


def stats(p=0, q=0, t=0, kind=TurnKind.FINAL_ANSWER, contains=False):
    return TurnStats(p=p, q=q, t=t, o_kind=kind, final_contains_answer=contains)


class TestSolveScores:
    def test_perfect_play(self):
        assert solve_scores(4, 4, 4) == (1, 1, 1)

    def test_half_precision(self):
        p, r, f1 = solve_scores(4, 2, 2)
        assert (p, r) == (0.5, 1.0)
        assert f1 == pytest.approx(2 / 3)

    def test_no_calls_scores_full_precision(self):
        assert solve_scores(0, 0, 3) == (1, 0, 0)

    def test_f1_harmonic_identity(self):
        p, r, f1 = solve_scores(5, 3, 4)
        assert f1 == 2 * p * r / (p + r)
        assert min(p, r) >= 0 and f1 <= max(p, r)

    def test_rejects_q_above_p(self):
        with pytest.raises(ValueError):
            solve_scores(2, 3, 4)


class TestAnswerCorrectness:
    def test_substring_hit(self):
        out = "The successor is Mishal Al-Ahmad Al-Jaber Al-Sabah."
        assert answer_correctness(out, "Mishal Al-Ahmad Al-Jaber Al-Sabah") == 1

    def test_miss(self):
        assert answer_correctness("no data", "128") == 0

    def test_embedded_number(self):
        assert answer_correctness("seats: 128 total", "128") == 1

    def test_casefold_and_whitespace_collapse(self):
        assert answer_correctness("the CITY   is  dusk vale", "Dusk Vale") == 1

    def test_rejects_empty_gold(self):
        with pytest.raises(ValueError):
            answer_correctness("anything", "")

    def test_normalization_shape(self):
        assert normalize_answer_text("  Á   b\n\nc ") == normalize_answer_text("Á b c")


class TestPassHat1:
    @pytest.mark.parametrize("c,n,expected", [(5, 20, 0.25), (0, 7, 0.0), (7, 7, 1.0)])
    def test_ratios(self, c, n, expected):
        assert pass_hat_1(c, n) == expected

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            pass_hat_1(3, 2)
        with pytest.raises(ValueError):
            pass_hat_1(0, 0)


class TestCascade:
    def test_identical_calls(self):
        call = ToolCall("t", {"a": 1})
        assert ts_pi_cf(call, call) == (1, 1, 1)

    def test_value_differs(self):
        pred = ToolCall("t", {"a": 1, "b": "x"})
        gold = ToolCall("t", {"a": 1, "b": "y"})
        assert ts_pi_cf(pred, gold) == (1, 1, 0)

    def test_different_tool(self):
        assert ts_pi_cf(ToolCall("u", {"a": 1}), ToolCall("t", {"a": 1})) == (0, 0, 0)

    def test_keyset_differs(self):
        pred = ToolCall("t", {"a": 1, "extra": 2})
        gold = ToolCall("t", {"a": 1})
        assert ts_pi_cf(pred, gold) == (1, 0, 0)

    def test_value_equality_uses_runtime_normalization(self):
        pred = ToolCall("t", {"city": " DUSKVALE "})
        gold = ToolCall("t", {"city": "Duskvale"})
        assert ts_pi_cf(pred, gold) == (1, 1, 1)


call_args = st.dictionaries(
    st.sampled_from(["a", "b", "c"]),
    st.sampled_from(["x", "y", 1, 2, True]),
    max_size=3,
)


@settings(max_examples=300, deadline=None)
@given(
    pred_name=st.sampled_from(["t", "u"]),
    gold_name=st.sampled_from(["t", "u"]),
    pred_args=call_args,
    gold_args=call_args,
)
def test_cascade_monotone(pred_name, gold_name, pred_args, gold_args):
    ts, pi, cf = ts_pi_cf(ToolCall(pred_name, pred_args), ToolCall(gold_name, gold_args))
    assert cf <= pi <= ts
    assert {ts, pi, cf} <= {0, 1}


def _branch_guards(s: TurnStats) -> list[bool]:
    not_empty = s.o_kind is not TurnKind.EMPTY
    not_fmt = s.o_kind is not TurnKind.FORMAT_ERROR
    return [
        s.p > 0,
        s.p == 0 and s.o_kind is TurnKind.EMPTY,
        s.p == 0 and not_empty and s.o_kind is TurnKind.FORMAT_ERROR,
        s.p == 0 and not_empty and not_fmt and s.final_contains_answer,
        s.p == 0 and not_empty and not_fmt and not s.final_contains_answer and s.t == 0,
        s.p == 0 and not_empty and not_fmt and not s.final_contains_answer and s.t != 0,
    ]


@settings(max_examples=500, deadline=None)
@given(
    p=st.integers(0, 6),
    dq=st.integers(0, 6),
    t=st.integers(0, 6),
    kind=st.sampled_from(list(TurnKind)),
    contains=st.booleans(),
)
def test_exactly_one_branch_fires(p, dq, t, kind, contains):
    s = stats(p=p, q=min(dq, p), t=t, kind=kind, contains=contains)
    assert sum(_branch_guards(s)) == 1
    turn_reward(s)  # total on all valid stats


@settings(max_examples=500, deadline=None)
@given(p=st.integers(1, 10), dq=st.integers(0, 10))
def test_balanced_bounds_for_tool_turns(p, dq):
    q = min(dq, p)
    reward = turn_reward(stats(p=p, q=q, t=0, kind=TurnKind.TOOL_CALLS))
    assert 0 <= reward <= 2 * p / (p + 1) < 2
    assert (reward == 1.0) == (2 * q == p + 1)


@settings(max_examples=300, deadline=None)
@given(p=st.integers(1, 10), dq=st.integers(0, 10), t=st.integers(0, 5))
def test_variants_only_change_tool_branch(p, dq, t):
    q = min(dq, p)
    tool = stats(p=p, q=q, t=t, kind=TurnKind.TOOL_CALLS)
    assert turn_reward(tool, RewardVariant.SOLVE_P) == q / p
    assert turn_reward(tool, RewardVariant.SOLVE_R) == q
    assert turn_reward(tool, RewardVariant.SOLVE_PR) == q * q / p
    silent = stats(kind=TurnKind.EMPTY, t=t)
    for variant in RewardVariant:
        assert turn_reward(silent, variant) == -0.5


def test_invalid_stats_rejected():
    with pytest.raises(ValueError):
        turn_reward(TurnStats(p=1, q=2, t=0, o_kind=TurnKind.TOOL_CALLS))
    with pytest.raises(ValueError):
        turn_reward(TurnStats(p=-1, q=0, t=0, o_kind=TurnKind.EMPTY))


def test_reward_is_finite_everywhere():
    for p in range(0, 4):
        for q in range(0, p + 1):
            for t in range(0, 3):
                for kind in TurnKind:
                    for contains in (False, True):
                        value = turn_reward(stats(p=p, q=q, t=t, kind=kind, contains=contains))
                        assert math.isfinite(value)
