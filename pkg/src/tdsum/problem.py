"""Target discounted-sum instances and the reductions between them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Union

from .numerics import (
    DiscountFactor,
    LassoWord,
    format_rational,
    lasso_value,
    parse_rational,
)
from .omega.automaton import Automaton
from .omega.regex import OmegaRegex, compile_omega, compile_regular, regex_length

Constraint = Union[OmegaRegex, Automaton, str, None]

KINDS = ("tds", "tds01", "gtds", "ctds", "cgtds", "tds_f", "cgtds_f")
FINITE_KINDS = ("tds_f", "cgtds_f")


@dataclass(frozen=True)
class WeightAlphabet:
    """Ordered ``(letter, weight)`` pairs; letters are distinct, weights may
    repeat."""

    entries: tuple

    def __post_init__(self) -> None:
        entries = tuple((letter, Fraction(w)) for letter, w in self.entries)
        letters = [letter for letter, _ in entries]
        if len(set(letters)) != len(letters):
            raise ValueError(f"duplicate letters in alphabet: {letters}")
        if not entries:
            raise ValueError("alphabet must contain at least one weight")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def of(cls, data: Mapping | Iterable) -> "WeightAlphabet":
        items = data.items() if isinstance(data, Mapping) else data
        return cls(tuple((letter, parse_rational(w)) for letter, w in items))

    @classmethod
    def digits(cls, *values: int) -> "WeightAlphabet":
        """Alphabet whose letters are the decimal strings of the weights."""
        return cls(tuple((str(v), Fraction(v)) for v in values))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def letters(self) -> tuple:
        return tuple(letter for letter, _ in self.entries)

    @property
    def weights(self) -> dict:
        return dict(self.entries)

    def weight(self, letter: Hashable) -> Fraction:
        return self.weights[letter]

    def sorted_by_weight(self) -> tuple:
        order = {letter: i for i, letter in enumerate(self.letters)}
        return tuple(sorted(self.entries, key=lambda e: (e[1], order[e[0]])))

    @property
    def min_weight(self) -> Fraction:
        return min(w for _, w in self.entries)

    @property
    def max_weight(self) -> Fraction:
        return max(w for _, w in self.entries)

    def distinct_weights(self) -> list:
        return sorted(set(w for _, w in self.entries))

    def map_weights(self, f) -> "WeightAlphabet":
        return WeightAlphabet(tuple((letter, f(w)) for letter, w in self.entries))


@dataclass(frozen=True)
class GtdsInstance:
    lam: DiscountFactor
    target: Fraction
    alphabet: WeightAlphabet
    constraint: Constraint = None
    mode: str = "infinite"
    start_exponent: int = 0
    kind: str = "cgtds"

    def __post_init__(self) -> None:
        object.__setattr__(self, "target", Fraction(self.target))
        if self.mode not in ("infinite", "finite"):
            raise ValueError(f"mode must be 'infinite' or 'finite', got {self.mode!r}")
        if self.start_exponent not in (0, 1):
            raise ValueError("start_exponent must be 0 or 1")
        c = self.constraint
        if self.mode == "infinite" and isinstance(c, str):
            object.__setattr__(self, "constraint", OmegaRegex.parse(c))
        if self.mode == "finite" and isinstance(c, OmegaRegex):
            raise ValueError("finite-word instances take a regular, not ω-regular, constraint")

    @property
    def is_finite(self) -> bool:
        return self.mode == "finite"

    def constraint_automaton(self) -> Automaton | None:
        """Büchi automaton (infinite mode) or NFA (finite mode), or None."""
        c = self.constraint
        letters = self.alphabet.letters
        if c is None:
            return None
        if isinstance(c, Automaton):
            return c.with_alphabet(letters)
        if isinstance(c, OmegaRegex):
            return compile_omega(c, letters)
        return compile_regular(c, letters)

    def constraint_size(self) -> int:
        c = self.constraint
        if c is None:
            return 1
        if isinstance(c, Automaton):
            return len(c)
        if isinstance(c, OmegaRegex):
            return c.size()
        return regex_length(c)

    def value(self, word: LassoWord) -> Fraction:
        return lasso_value(word, self.alphabet.weights, self.lam, self.start_exponent)

    def is_solution(self, word: LassoWord) -> bool:
        if self.is_finite != word.is_finite:
            return False
        if self.value(word) != self.target:
            return False
        aut = self.constraint_automaton()
        return aut is None or aut.accepts_lasso(word)


# -- TDS to TDS01 -----------------------------------------------------------


class DegenerateAlphabet(ValueError):
    """Raised when both weights coincide; ``solvable`` records the answer."""

    def __init__(self, solvable: bool, message: str):
        super().__init__(message)
        self.solvable = solvable


@dataclass(frozen=True)
class Tds01Reduction:
    target: Fraction
    word_map: dict


def reduce_tds_to_tds01(lam: DiscountFactor, t, a, b) -> Tds01Reduction:
    """Target of the equivalent 0/1 instance summed from ``λ^1``; the weight
    ``a`` becomes digit 0 and ``b`` digit 1."""
    t, a, b = Fraction(t), Fraction(a), Fraction(b)
    lv = lam.value
    if a == b:
        solvable = t == a / (1 - lv)
        verdict = "solvable, constant word" if solvable else "unsolvable"
        raise DegenerateAlphabet(solvable, f"degenerate alphabet a = b = {a}: {verdict}")
    target = lv * (t - lv * t - a) / ((1 - lv) * (b - a))
    return Tds01Reduction(target, {a: 0, b: 1})


# -- normal form --------------------------------------------------------------


@dataclass(frozen=True)
class ValueMap:
    """``original = normal / scale + offset`` for infinite words."""

    scale: int
    offset: Fraction

    def to_original(self, v) -> Fraction:
        return Fraction(v) / self.scale + self.offset

    def to_normal(self, v) -> Fraction:
        return (Fraction(v) - self.offset) * self.scale


@dataclass(frozen=True)
class NormalFormInstance:
    base: GtdsInstance
    alphabet: WeightAlphabet
    target: Fraction
    scale: int
    shift: Fraction
    bound: Fraction = field(init=False)

    def __post_init__(self) -> None:
        lv = self.lam.value
        object.__setattr__(self, "bound", lv * self.max_weight / (1 - lv))

    @property
    def lam(self) -> DiscountFactor:
        return self.base.lam

    @property
    def start_exponent(self) -> int:
        return self.base.start_exponent

    @property
    def P(self) -> int:
        return self.lam.P

    @property
    def Q(self) -> int:
        return self.lam.Q

    @property
    def c(self) -> int:
        return self.target.numerator

    @property
    def d(self) -> int:
        return self.target.denominator

    @property
    def max_weight(self) -> int:
        return int(self.alphabet.max_weight)

    @property
    def int_weights(self) -> dict:
        return {letter: int(w) for letter, w in self.alphabet}

    @property
    def first_gap(self) -> Fraction:
        """Gap before the first digit: ``t`` when sums start at ``λ^1``,
        ``t·λ`` when they start at ``λ^0``."""
        return self.target if self.start_exponent == 1 else self.target * self.lam.value

    def value(self, word: LassoWord) -> Fraction:
        return lasso_value(word, self.alphabet.weights, self.lam, self.start_exponent)


def normalize(instance: GtdsInstance) -> tuple[NormalFormInstance, ValueMap]:
    """Scale weights to integers and shift the least one to 0.

    Letters are kept, so a word solves the normal form iff it solves the
    original (infinite-word semantics).
    """
    alphabet = instance.alphabet
    scale = math.lcm(*(w.denominator for _, w in alphabet))
    least = alphabet.min_weight
    lv = instance.lam.value
    offset = least * lv ** instance.start_exponent / (1 - lv)
    normal = alphabet.map_weights(lambda w: (w - least) * scale)
    target = (instance.target - offset) * scale
    nf = NormalFormInstance(instance, normal, target, scale, least)
    return nf, ValueMap(scale, offset)


def full_coverage(nf: NormalFormInstance) -> bool:
    ws = nf.alphabet.distinct_weights()
    return all(hi - lo <= nf.bound for lo, hi in zip(ws, ws[1:]))


# -- finite to infinite -------------------------------------------------------


def _fresh_letter(letters: Iterable) -> str:
    used = set(letters)
    if "z" not in used:
        return "z"
    i = 0
    while f"z{i}" in used:
        i += 1
    return f"z{i}"


def zero_letter(alphabet: WeightAlphabet):
    return next((letter for letter, w in alphabet if w == 0), None)


def lift_finite_to_infinite(instance: GtdsInstance) -> tuple[GtdsInstance, Hashable]:
    """Infinite instance whose solutions are ``x·z^ω`` for finite solutions
    ``x``; returns it with the padding letter ``z``."""
    if not instance.is_finite:
        raise ValueError("instance is already in infinite mode")
    alphabet = instance.alphabet
    letters = alphabet.letters
    z = zero_letter(alphabet)
    if z is None:
        z = _fresh_letter(letters)
        alphabet = WeightAlphabet(alphabet.entries + ((z, Fraction(0)),))
    c = instance.constraint
    if c is None:
        nfa = compile_regular(".*", letters)
    elif isinstance(c, Automaton):
        nfa = c.with_alphabet(letters)
    else:
        nfa = compile_regular(c, letters)
    hub = ("pad",)
    edges = list(nfa.edges()) + [(f, z, hub) for f in nfa.accepting] + [(hub, z, hub)]
    buchi = Automaton.build(list(nfa.states) + [hub], nfa.initial, [hub], edges, alphabet.letters)
    lifted = replace(
        instance,
        alphabet=alphabet,
        constraint=buchi.renumbered("q"),
        mode="infinite",
        kind="cgtds",
    )
    return lifted, z


# -- JSON ---------------------------------------------------------------------


def _constraint_from_json(data, finite: bool) -> Constraint:
    if data is None:
        return None
    if isinstance(data, str):
        return data if finite else OmegaRegex.parse(data)
    if "omega_pairs" in data:
        if finite:
            raise ValueError("omega_pairs constraint given for a finite-word instance")
        return OmegaRegex.from_pairs((p["prefix"], p["period"]) for p in data["omega_pairs"])
    if "buchi" in data:
        return Automaton.from_json(data["buchi"])
    if "nfa" in data:
        return Automaton.from_json(data["nfa"])
    if "regex" in data:
        return data["regex"] if finite else OmegaRegex.parse(data["regex"])
    raise ValueError(f"unrecognised constraint {data!r}")


def _constraint_to_json(c: Constraint, finite: bool):
    if c is None:
        return None
    if isinstance(c, OmegaRegex):
        return {"omega_pairs": [{"prefix": u, "period": v} for u, v in c.pairs]}
    if isinstance(c, Automaton):
        return {"nfa" if finite else "buchi": c.to_json()}
    return {"regex": c}


def instance_from_json(data: Mapping) -> GtdsInstance:
    kind = data.get("kind", "cgtds")
    if kind not in KINDS:
        raise ValueError(f"unknown instance kind {kind!r}; expected one of {KINDS}")
    if "lambda" not in data or "target" not in data:
        raise ValueError("instance needs 'lambda' and 'target'")
    lam = DiscountFactor.of(data["lambda"])
    target = parse_rational(data["target"])
    raw = data.get("weights")
    if raw is None:
        if kind != "tds01":
            raise ValueError(f"instance kind {kind!r} needs 'weights'")
        alphabet = WeightAlphabet.digits(0, 1)
    else:
        alphabet = WeightAlphabet.of((w["letter"], w["weight"]) for w in raw)
    if kind in ("tds", "tds01", "ctds", "tds_f") and len(alphabet) != 2:
        raise ValueError(f"instance kind {kind!r} takes exactly two weights")
    if kind == "tds01" and sorted(alphabet.weights.values()) != [0, 1]:
        raise ValueError("tds01 weights must be 0 and 1")
    finite = kind in FINITE_KINDS
    constraint = _constraint_from_json(data.get("constraint"), finite)
    if constraint is not None and kind in ("tds", "tds01", "gtds", "tds_f"):
        raise ValueError(f"instance kind {kind!r} does not take a constraint")
    start = int(data.get("start_exponent", 1 if kind == "tds01" else 0))
    return GtdsInstance(
        lam,
        target,
        alphabet,
        constraint,
        mode="finite" if finite else "infinite",
        start_exponent=start,
        kind=kind,
    )


def instance_to_json(instance: GtdsInstance) -> dict:
    out = {
        "kind": instance.kind,
        "lambda": format_rational(instance.lam.value),
        "target": format_rational(instance.target),
        "weights": [
            {"letter": str(letter), "weight": format_rational(w)} for letter, w in instance.alphabet
        ],
        "start_exponent": instance.start_exponent,
    }
    c = _constraint_to_json(instance.constraint, instance.is_finite)
    if c is not None:
        out["constraint"] = c
    return out
