"""Exact rational helpers and closed-form discounted sums.

Every value in the package is a :class:`fractions.Fraction`; floats never
enter a verdict-relevant computation.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

Rational = Fraction
Letter = Hashable

__all__ = [
    "Rational",
    "DiscountFactor",
    "LassoWord",
    "parse_rational",
    "format_rational",
    "discounted_sum_finite",
    "lasso_value",
]


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"num/den"`` or a bare integer into a reduced fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"expected a rational string, got {text!r}")
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        if sep:
            n, d = int(num), int(den)
            if d == 0:
                raise ValueError(f"zero denominator in {text!r}")
            return Fraction(n, d)
        return Fraction(int(s))
    except ValueError as exc:
        raise ValueError(f"malformed rational {text!r}") from exc


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class DiscountFactor:
    """A rational discount factor ``0 < value < 1`` stored as ``Q/P``."""

    value: Fraction

    def __post_init__(self) -> None:
        v = Fraction(self.value)
        if not 0 < v < 1:
            raise ValueError(f"discount factor must lie in (0, 1), got {v}")
        object.__setattr__(self, "value", v)

    @classmethod
    def of(cls, x: str | int | Fraction) -> "DiscountFactor":
        return cls(parse_rational(x))

    @property
    def Q(self) -> int:
        return self.value.numerator

    @property
    def P(self) -> int:
        return self.value.denominator

    def base(self) -> Fraction:
        return Fraction(self.P, self.Q)

    def __str__(self) -> str:
        return format_rational(self.value)


@dataclass(frozen=True)
class LassoWord:
    """The word ``prefix · period^ω``, or the finite word ``prefix`` when
    ``period`` is empty."""

    prefix: tuple = ()
    period: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "period", tuple(self.period))

    @property
    def is_finite(self) -> bool:
        return not self.period

    def __len__(self) -> int:
        return len(self.prefix) + len(self.period)

    def letter_at(self, i: int) -> Letter:
        if i < len(self.prefix):
            return self.prefix[i]
        if not self.period:
            raise IndexError(i)
        return self.period[(i - len(self.prefix)) % len(self.period)]

    def take(self, n: int) -> tuple:
        if self.is_finite:
            return self.prefix[:n]
        return tuple(self.letter_at(i) for i in range(n))

    def canonical(self) -> "LassoWord":
        """Shortest representation of the same (infinite) word."""
        if self.is_finite:
            return self
        v = self.period
        for k in range(1, len(v) + 1):
            if len(v) % k == 0 and v[:k] * (len(v) // k) == v:
                v = v[:k]
                break
        u = self.prefix
        while u and u[-1] == v[-1]:
            u = u[:-1]
            v = v[-1:] + v[:-1]
        return LassoWord(u, v)

    def same_word(self, other: "LassoWord") -> bool:
        return self.canonical() == other.canonical()

    def render(self, omega: str = "ω") -> str:
        def join(part: Sequence) -> str:
            items = [str(x) for x in part]
            sep = "" if all(len(s) == 1 for s in items) else " "
            return sep.join(items)

        if self.is_finite:
            return join(self.prefix) if self.prefix else "ε"
        return f"{join(self.prefix)}({join(self.period)})^{omega}"

    def __str__(self) -> str:
        return self.render()


def _weight(weights: Mapping, letter: Letter) -> Fraction:
    try:
        return Fraction(weights[letter])
    except KeyError:
        raise ValueError(f"letter {letter!r} has no weight") from None


def discounted_sum_finite(
    word: Iterable[Letter],
    weights: Mapping,
    lam: DiscountFactor,
    start_exponent: int = 0,
) -> Fraction:
    total = Fraction(0)
    power = lam.value ** start_exponent
    for letter in word:
        total += _weight(weights, letter) * power
        power *= lam.value
    return total


def lasso_value(
    w: LassoWord,
    digits: Mapping,
    lam: DiscountFactor,
    start_exponent: int = 1,
) -> Fraction:
    """Exact value of ``u v^ω`` as a discounted sum.

    With ``start_exponent=1`` this is the base-``1/λ`` expansion
    ``0.u(v)^ω``; with ``0`` the sum starts at ``λ^0``.
    """
    head = discounted_sum_finite(w.prefix, digits, lam, start_exponent)
    if w.is_finite:
        return head
    cycle = discounted_sum_finite(w.period, digits, lam, 0)
    shift = lam.value ** (start_exponent + len(w.prefix))
    return head + shift * cycle / (1 - lam.value ** len(w.period))
