from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tdsum.numerics import (
    DiscountFactor,
    LassoWord,
    discounted_sum_finite,
    format_rational,
    lasso_value,
    parse_rational,
)

lams = st.tuples(st.integers(1, 8), st.integers(2, 9)).filter(lambda qp: qp[0] < qp[1]).map(
    lambda qp: DiscountFactor(F(*qp))
)
words = st.lists(st.sampled_from("01"), max_size=6).map(tuple)
periods = st.lists(st.sampled_from("01"), min_size=1, max_size=5).map(tuple)
DIGITS = {"0": 0, "1": 1}


@pytest.mark.parametrize("text,value", [("3/6", F(1, 2)), ("-4", F(-4)), (" 7/21 ", F(1, 3)), ("0/5", F(0))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("bad", ["", "1/0", "a/2", "1.5", "1//2", None, True])
def test_parse_rational_rejects(bad):
    with pytest.raises(ValueError):
        parse_rational(bad)


def test_format_round_trip():
    for x in (F(0), F(-3, 7), F(12, 5), F(9)):
        assert parse_rational(format_rational(x)) == x
    assert format_rational(F(4, 2)) == "2"


def test_discount_factor_parts():
    lam = DiscountFactor.of("2/3")
    assert (lam.Q, lam.P, lam.base()) == (2, 3, F(3, 2))
    for bad in ("0", "1", "3/2", "-1/2"):
        with pytest.raises(ValueError):
            DiscountFactor.of(bad)


def test_lasso_basics():
    w = LassoWord(("a",), ("c", "a"))
    assert len(w) == 3
    assert w.take(6) == ("a", "c", "a", "c", "a", "c")
    assert w.canonical() == LassoWord((), ("a", "c"))
    assert str(LassoWord(("x1", "x2"), ("y",))) == "x1 x2(y)^ω"
    assert str(LassoWord((), ())) == "ε"
    assert LassoWord(("1", "0", "1"), ("0", "0")).canonical() == LassoWord(("1", "0", "1"), ("0",))


def test_geometric_series():
    for beta in (F(5, 2), F(3), F(7, 3)):
        lam = DiscountFactor(1 / beta)
        assert lasso_value(LassoWord((), ("1",)), DIGITS, lam) == 1 / (beta - 1)
    lam = DiscountFactor.of("2/5")
    assert discounted_sum_finite("102", {"0": 0, "1": 1, "2": 2}, lam, 1) == F(66, 125)
    with pytest.raises(ValueError):
        discounted_sum_finite("x", DIGITS, lam)


@given(words, periods, lams, st.integers(0, 6))
def test_canonical_denotes_same_word(u, v, lam, n):
    w = LassoWord(u, v)
    c = w.canonical()
    assert len(c) <= len(w)
    assert c.take(len(w) + 12) == w.take(len(w) + 12)
    assert lasso_value(c, DIGITS, lam) == lasso_value(w, DIGITS, lam)
    # unrolling the period n times leaves the word unchanged
    unrolled = LassoWord(u + v * n, v * 2)
    assert unrolled.same_word(w)


@given(words, periods, lams)
def test_lasso_value_is_limit_of_prefix_sums(u, v, lam):
    w = LassoWord(u, v)
    exact = lasso_value(w, DIGITS, lam, 0)
    n = 40
    partial = discounted_sum_finite(w.take(n), DIGITS, lam, 0)
    assert 0 <= exact - partial <= lam.value**n / (1 - lam.value)


@given(words, periods, lams)
def test_shift_identity(u, v, lam):
    # value from exponent 1 is λ times the value from exponent 0
    w = LassoWord(u, v)
    assert lasso_value(w, DIGITS, lam, 1) == lam.value * lasso_value(w, DIGITS, lam, 0)
