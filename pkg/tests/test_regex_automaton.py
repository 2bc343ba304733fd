import itertools
import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tdsum.numerics import LassoWord
from tdsum.omega.automaton import Automaton
from tdsum.omega.regex import OmegaRegex, RegexError, compile_omega, compile_regular, split_omega

AB = ("a", "b")
REGEXES = ["a", "ab", "a+b", "a*", "(ab)*", ".*b", "a(a+b)*b", "(a+ε)b", "ε", "(a*b*)*a", "..", "(a+bb)*"]


def as_python(rx: str) -> str:
    return rx.replace("+", "|").replace(".", "[ab]").replace("ε", "")


def words(n):
    for k in range(n + 1):
        yield from itertools.product(AB, repeat=k)


@pytest.mark.parametrize("rx", REGEXES)
def test_regular_matches_python_re(rx):
    nfa = compile_regular(rx, AB)
    pattern = re.compile(as_python(rx))
    for w in words(6):
        assert nfa.accepts_finite(w) == bool(pattern.fullmatch("".join(w))), (rx, w)


@pytest.mark.parametrize("rx", REGEXES)
def test_position_automaton_size(rx):
    # one state per letter occurrence plus the initial state
    nfa = compile_regular(rx, AB)
    occurrences = sum(ch in "ab." for ch in rx)
    assert len(nfa) <= occurrences + 1


@pytest.mark.parametrize("bad", ["(a", "a)", "*a", "a<b", "^", "a)("])
def test_bad_regex(bad):
    with pytest.raises(RegexError):
        compile_regular(bad, AB)


def test_split_omega():
    assert split_omega(".*(.a)^ω") == [(".*", ".a")]
    assert split_omega("a(b)^ω + b a^w") == [("a", "b"), ("b", "a")]
    assert split_omega("<x1>(<y>)^ω") == [("<x1>", "<y>")]
    with pytest.raises(RegexError):
        split_omega("ab")


@pytest.mark.parametrize(
    "rx,accepted,rejected",
    [
        (".*(.a)^ω", [(("a",), ("c", "a")), ((), ("a",))], [((), ("b",)), (("a",), ("b", "c"))]),
        ("(a)^ω", [((), ("a",)), (("a", "a"), ("a",))], [(("b",), ("a",))]),
        (".*(b)^ω", [(("a", "a"), ("b",))], [((), ("a", "b"))]),
        ("(a*b)^ω", [((), ("a", "b")), ((), ("b",))], [(("b",), ("a",))]),
        ("a(b)^ω + b(a)^ω", [(("a",), ("b",)), (("b",), ("a",))], [((), ("a",)), ((), ("a", "b"))]),
    ],
)
def test_omega_membership(rx, accepted, rejected):
    aut = OmegaRegex.parse(rx).compile(("a", "b", "c"))
    for u, v in accepted:
        assert aut.accepts_lasso(LassoWord(u, v)), (rx, u, v)
    for u, v in rejected:
        assert not aut.accepts_lasso(LassoWord(u, v)), (rx, u, v)


def test_empty_union_is_empty():
    aut = compile_omega(OmegaRegex(()), AB)
    assert not aut.accepts_lasso(LassoWord((), ("a",)))


pieces = st.sampled_from(["a", "b", "ab", "ba", "aab", "(a+b)", "a*b", "b*a"])


@given(pieces, pieces, st.randoms(use_true_random=False))
def test_concatenations_are_accepted(u_rx, v_rx, rnd):
    # a word of L(U) followed by repeated words of L(V) is in U·V^ω
    aut = OmegaRegex.parse(f"{u_rx}({v_rx})^ω").compile(AB)
    lang_u = [w for w in words(4) if re.fullmatch(as_python(u_rx), "".join(w))]
    lang_v = [w for w in words(4) if w and re.fullmatch(as_python(v_rx), "".join(w))]
    u = rnd.choice(lang_u)
    v = sum((rnd.choice(lang_v) for _ in range(rnd.randint(1, 3))), ())
    assert aut.accepts_lasso(LassoWord(u, v))


def test_trim_and_bisimulation_keep_language():
    edges = [("p", "a", "q"), ("q", "b", "p"), ("p", "a", "r"), ("r", "b", "p"), ("p", "b", "dead")]
    aut = Automaton.build(["p", "q", "r", "dead"], "p", ["q", "r"], edges)
    trimmed = aut.trim_buchi()
    assert "dead" not in trimmed.states
    reduced = trimmed.reduce_bisimulation()
    assert len(reduced) == 2
    for u, v in [((), ("a", "b")), (("a",), ("b", "a")), ((), ("b",)), ((), ("a",))]:
        w = LassoWord(u, v)
        assert reduced.accepts_lasso(w) == aut.accepts_lasso(w)


def test_json_round_trip():
    aut = OmegaRegex.parse(".*(.a)^ω").compile(AB)
    again = Automaton.from_json(aut.to_json())
    for u, v in [((), ("a",)), (("b",), ("b", "a")), ((), ("b",))]:
        w = LassoWord(u, v)
        assert again.accepts_lasso(w) == aut.accepts_lasso(w)
    with pytest.raises(ValueError):
        Automaton.from_json({"initial": "q"})
