from fractions import Fraction as F

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from oracles import brute_lassos, tds01_value

from tdsum.expansion import (
    decide_tds01,
    eligible_digits,
    gap_step,
    greedy_digit,
    greedy_explore,
    growth_rate_falsifier,
    lazy_digit,
    periodic_positions,
    powers_positions,
    tds01_instance,
)
from tdsum.numerics import DiscountFactor, LassoWord
from tdsum.problem import normalize
from tdsum.verdict import Answer, Reason

small_lams = st.sampled_from(["1/3", "2/5", "3/7", "1/4", "2/7", "3/8", "1/5"]).map(DiscountFactor.of)
any_lams = st.tuples(st.integers(1, 9), st.integers(2, 10)).filter(lambda qp: qp[0] < qp[1]).map(
    lambda qp: DiscountFactor(F(*qp))
)
bits = st.lists(st.sampled_from("01"), max_size=5).map(tuple)
nonempty_bits = st.lists(st.sampled_from("01"), min_size=1, max_size=5).map(tuple)


def explore(lam, t, steps=50):
    return greedy_explore(normalize(tds01_instance(DiscountFactor.of(lam), t))[0], steps)


def test_dump_of_five_eighths():
    assert explore("1/2", "5/8").dump().splitlines() == [
        "step 1: gap=5/8 digit=1",
        "step 2: gap=1/4 digit=0",
        "step 3: gap=1/2 digit=1",
        "step 4: gap=0 digit=0",
        "Repeat: gap at step 5 equals gap at step 4",
    ]


def test_dump_of_out_of_range_target():
    trace = explore("1/3", "3/4")
    assert trace.outcome.kind == "TooBig"
    assert trace.dump().splitlines() == ["step 1: gap=3/4 digit=-", "TooBig at step 1"]


def test_ten_twentyfirsts_is_periodic():
    trace = explore("2/5", "10/21")
    assert trace.verify()
    assert trace.lasso().same_word(LassoWord((), ("1", "0")))


@pytest.mark.parametrize(
    "lam,t,answer,word",
    [
        ("2/5", "10/21", Answer.YES, LassoWord((), ("1", "0"))),
        ("1/3", "3/4", Answer.NO, None),
        ("1/3", "1/2", Answer.YES, LassoWord((), ("1",))),
        ("1/8", "1/63", Answer.YES, LassoWord((), ("0", "1"))),
        ("1/4", "1/4", Answer.YES, LassoWord(("1",), ("0",))),
        ("2/3", "2", Answer.YES, LassoWord((), ("1",))),
        ("1/2", "1", Answer.YES, LassoWord((), ("1",))),
        ("2/5", "1/5", Answer.NO, None),
    ],
)
def test_decide_tds01_examples(lam, t, answer, word):
    v = decide_tds01(DiscountFactor.of(lam), t)
    assert v.answer is answer
    if word is not None:
        assert v.certificate.same_word(word)


def test_budget_below_denominator_is_rejected():
    with pytest.raises(ValueError):
        decide_tds01(DiscountFactor.of("2/5"), F(1, 7), budget=6)


def test_big_lambda_without_periodic_certificate():
    # λ ≥ 1/2 and full coverage: a solution exists even when no lasso is found
    v = decide_tds01(DiscountFactor.of("3/5"), F(1, 7))
    assert v.is_yes
    if v.certificate is None:
        assert v.reason is Reason.COVERAGE_GUARANTEE


def test_greedy_digit_rejects_negative_gap():
    with pytest.raises(ValueError):
        greedy_digit(F(-1, 3), DiscountFactor.of("1/2"), [0, 1])


@given(any_lams, st.fractions(0, 3), st.sampled_from([(0, 1), (0, 1, 2), (0, 2, 3)]))
def test_greedy_dominates_lazy(lam, g, weights):
    bound = lam.value * max(weights) / (1 - lam.value)
    assume(g <= bound)
    ok = eligible_digits(g, lam, weights, bound)
    if ok:
        assert greedy_digit(g, lam, weights) == max(ok)
        assert lazy_digit(g, lam, weights, bound) == min(ok)
        assert max(ok) >= min(ok)


@given(small_lams, bits, nonempty_bits)
def test_periodic_targets_are_recovered(lam, u, v):
    t = tds01_value(LassoWord(u, v), lam)
    verdict = decide_tds01(lam, t)
    assert verdict.is_yes
    assert tds01_value(verdict.certificate, lam) == t
    assert len(verdict.certificate) <= t.denominator
    trace = verdict.details.get("trace")  # absent for λ = 1/n
    if trace is not None:
        assert trace.verify()
        assert trace.gaps[trace.outcome.i] == trace.gaps[trace.outcome.j]


@given(small_lams, st.integers(1, 30), st.integers(0, 30))
def test_no_answers_have_no_short_lasso(lam, d, c):
    t = F(c, d)
    v = decide_tds01(lam, t)
    if v.is_no:
        assert all(tds01_value(w, lam) != t for w in brute_lassos("01", 6))


@given(small_lams, st.fractions(0, 1), st.integers(0, 1))
def test_gap_step_tracks_value(lam, g, m):
    # a gap g' after digit m stands for the same remainder: g = λ(m + g')
    assert lam.value * (m + gap_step(g, m, lam)) == g


def test_growth_rate_flags_sparse_word():
    lam = DiscountFactor.of("2/5")
    v = growth_rate_falsifier(powers_positions(3), lam, 7, 1000)
    assert (v.position, v.block, v.previous) == (9, "0", 3)
    assert v.length == 5


def test_growth_rate_needs_base_above_two():
    with pytest.raises(ValueError):
        growth_rate_falsifier(powers_positions(3), DiscountFactor.of("1/2"), 5, 100)


@given(st.sampled_from(["2/5", "1/3", "3/7", "1/4"]).map(DiscountFactor.of), bits, nonempty_bits)
def test_growth_rate_accepts_rationals(lam, u, v):
    w = LassoWord(u, v)
    d = tds01_value(w, lam).denominator
    ui, vi = [int(x) for x in u], [int(x) for x in v]
    assert growth_rate_falsifier(periodic_positions(ui, vi), lam, d, 400) is None
