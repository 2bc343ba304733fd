import json
from fractions import Fraction as F
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import tds01_value

from tdsum.numerics import DiscountFactor, LassoWord, lasso_value
from tdsum.omega.solve import solve_cgtds, solve_cgtds_f
from tdsum.problem import (
    DegenerateAlphabet,
    GtdsInstance,
    WeightAlphabet,
    full_coverage,
    instance_from_json,
    instance_to_json,
    lift_finite_to_infinite,
    normalize,
    reduce_tds_to_tds01,
)

INSTANCES = Path(__file__).resolve().parent.parent / "instances"

lams = st.tuples(st.integers(1, 7), st.integers(2, 8)).filter(lambda qp: qp[0] < qp[1]).map(
    lambda qp: DiscountFactor(F(*qp))
)
weights = st.fractions(-3, 3, max_denominator=6)
letters_ab = st.lists(st.sampled_from("ab"), max_size=5).map(tuple)
period_ab = st.lists(st.sampled_from("ab"), min_size=1, max_size=4).map(tuple)


def test_alphabet_queries():
    A = WeightAlphabet.of({"a": "-1/2", "b": 0, "c": "1/2", "d": 0})
    assert A.letters == ("a", "b", "c", "d")
    assert (A.min_weight, A.max_weight) == (F(-1, 2), F(1, 2))
    assert A.distinct_weights() == [F(-1, 2), F(0), F(1, 2)]
    with pytest.raises(ValueError):
        WeightAlphabet.of([("a", 1), ("a", 2)])


@given(lams, weights, weights, weights, letters_ab, period_ab, st.integers(0, 1))
def test_normalization_preserves_solutions(lam, wa, wb, t, u, v, s):
    inst = GtdsInstance(lam, t, WeightAlphabet.of({"a": wa, "b": wb}), start_exponent=s)
    nf, vm = normalize(inst)
    w = LassoWord(u, v)
    assert min(nf.int_weights.values()) == 0
    assert all(x == int(x) for x in nf.alphabet.weights.values())
    assert vm.to_original(nf.value(w)) == inst.value(w)
    assert vm.to_normal(inst.target) == nf.target


@given(lams, weights, weights, letters_ab, period_ab)
def test_two_weight_reduction(lam, a, b, u, v):
    w = LassoWord(u, v)
    t = lasso_value(w, {"a": a, "b": b}, lam, 0)
    if a == b:
        with pytest.raises(DegenerateAlphabet) as exc:
            reduce_tds_to_tds01(lam, t, a, b)
        assert exc.value.solvable
        return
    red = reduce_tds_to_tds01(lam, t, a, b)
    bits = LassoWord(tuple(str(red.word_map[{"a": a, "b": b}[x]]) for x in u),
                     tuple(str(red.word_map[{"a": a, "b": b}[x]]) for x in v))
    assert tds01_value(bits, lam) == red.target


def test_abc_suffix_normal_form():
    inst = GtdsInstance(DiscountFactor.of("2/3"), F(-3, 10), WeightAlphabet.of({"a": "-1/2", "b": 0, "c": "1/2"}))
    nf, _ = normalize(inst)
    assert nf.int_weights == {"a": 0, "b": 1, "c": 2}
    assert nf.target == F(12, 5)
    assert nf.bound == 4
    assert full_coverage(nf)
    sparse = GtdsInstance(DiscountFactor.of("1/3"), 0, WeightAlphabet.digits(0, 1))
    assert not full_coverage(normalize(sparse)[0])


def test_invalid_instances():
    A = WeightAlphabet.digits(0, 1)
    with pytest.raises(ValueError):
        GtdsInstance(DiscountFactor.of("1/2"), 0, A, mode="sometimes")
    with pytest.raises(ValueError):
        GtdsInstance(DiscountFactor.of("1/2"), 0, A, start_exponent=2)
    with pytest.raises(ValueError):
        instance_from_json({"kind": "tds", "lambda": "1/2", "target": "1"})
    with pytest.raises(ValueError):
        instance_from_json({"kind": "tds01", "lambda": "1/2", "target": "1", "weights": [
            {"letter": "x", "weight": "0"}, {"letter": "y", "weight": "2"}]})
    with pytest.raises(ValueError):
        instance_from_json({"kind": "gtds", "lambda": "1/2", "target": "1",
                            "weights": [{"letter": "a", "weight": "0"}], "constraint": "(a)^ω"})


@pytest.mark.parametrize("path", sorted(INSTANCES.glob("*.json")), ids=lambda p: p.name)
def test_json_round_trip(path):
    inst = instance_from_json(json.loads(path.read_text()))
    again = instance_from_json(json.loads(json.dumps(instance_to_json(inst))))
    assert instance_to_json(again) == instance_to_json(inst)
    assert solve_cgtds_f(again).answer == solve_cgtds_f(inst).answer if inst.is_finite else (
        solve_cgtds(again).answer == solve_cgtds(inst).answer
    )


@pytest.mark.parametrize(
    "lam,ws,t,rx",
    [
        ("1/2", {"a": 1, "b": 2}, "5/4", None),
        ("1/2", {"a": 1, "b": 2}, "2", None),
        ("1/3", {"a": 0, "b": 1}, "10/27", "(a+b)*b"),
        ("2/5", {"a": 1, "b": 3}, "17/5", "a*b*"),
        ("2/5", {"a": 1, "b": 3}, "1", "b.*"),
        ("1/2", {"a": "1/2", "b": -1}, "0", ".*"),
    ],
)
def test_finite_search_agrees_with_lift(lam, ws, t, rx):
    inst = GtdsInstance(DiscountFactor.of(lam), F(t), WeightAlphabet.of(ws), rx, mode="finite", kind="cgtds_f")
    direct = solve_cgtds_f(inst)
    lifted, z = lift_finite_to_infinite(inst)
    via_lift = solve_cgtds(lifted)
    assert direct.is_yes == via_lift.details["eventually_periodic"]
    if direct.is_yes:
        x = direct.certificate.prefix
        assert lifted.is_solution(LassoWord(x, (z,)))
