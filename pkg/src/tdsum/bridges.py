"""Piecewise-affine maps and middle-kth Cantor sets, both tied to 0/1
target discounted sums."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .expansion import decide_tds01
from .numerics import DiscountFactor, format_rational, parse_rational
from .verdict import Verdict


class DomainError(ValueError):
    def __init__(self, point):
        super().__init__(f"orbit left the domain of the map at {point}")
        self.point = point


@dataclass(frozen=True)
class Piece:
    """``slope·x + offset`` on an interval; ``None`` bounds are infinite."""

    lo: Fraction | None
    hi: Fraction | None
    lo_closed: bool
    hi_closed: bool
    slope: Fraction
    offset: Fraction

    def __post_init__(self) -> None:
        if self.slope == 0:
            raise ValueError("affine pieces need a non-zero slope")

    def contains(self, x: Fraction) -> bool:
        if self.lo is not None and (x < self.lo or (x == self.lo and not self.lo_closed)):
            return False
        if self.hi is not None and (x > self.hi or (x == self.hi and not self.hi_closed)):
            return False
        return True

    def apply(self, x: Fraction) -> Fraction:
        return self.slope * x + self.offset

    def describe(self) -> str:
        left = "(-inf" if self.lo is None else ("[" if self.lo_closed else "(") + format_rational(self.lo)
        right = "inf)" if self.hi is None else format_rational(self.hi) + ("]" if self.hi_closed else ")")
        return f"{left}, {right}: {format_rational(self.slope)}·x + {format_rational(self.offset)}"

    def to_json(self) -> dict:
        fmt = lambda v: None if v is None else format_rational(v)  # noqa: E731
        return {
            "lower": fmt(self.lo),
            "upper": fmt(self.hi),
            "lower_closed": self.lo_closed,
            "upper_closed": self.hi_closed,
            "slope": format_rational(self.slope),
            "offset": format_rational(self.offset),
        }


@dataclass(frozen=True)
class Pam:
    pieces: tuple

    def __post_init__(self) -> None:
        # adjacent pieces must not overlap
        ordered = sorted(self.pieces, key=lambda p: (p.lo is not None, p.lo))
        for p, q in zip(ordered, ordered[1:]):
            if p.hi is None or q.lo is None:
                raise ValueError("overlapping pieces")
            if p.hi > q.lo or (p.hi == q.lo and p.hi_closed and q.lo_closed):
                raise ValueError(f"pieces {p.describe()} and {q.describe()} overlap")

    def piece_at(self, x) -> Piece:
        x = Fraction(x)
        for p in self.pieces:
            if p.contains(x):
                return p
        raise DomainError(x)

    def __call__(self, x) -> Fraction:
        return self.piece_at(x).apply(Fraction(x))

    def to_json(self) -> list:
        return [p.to_json() for p in self.pieces]


def build_pam_from_tds01(lam: DiscountFactor, t) -> Pam | None:
    """Map whose orbit from ``t`` reaches 1 iff the 0/1 instance ``(λ, t)``
    has no solution.  Returns None (no solution, nothing to build) when
    ``t`` lies outside ``[0, λ/(1−λ)]``."""
    lv = lam.value
    if lv >= Fraction(1, 2):
        raise ValueError("the construction needs λ < 1/2")
    t = parse_rational(t)
    top = lv / (1 - lv)
    if t < 0 or t > top:
        return None
    p, q, b = lam.Q, lam.P, t.denominator
    F = Fraction
    return Pam(
        (
            Piece(None, lv, False, False, 1 / lv, F(0)),
            Piece(lv, top, True, True, 1 / lv, F(-1)),
            Piece(top, F(1), False, False, F(b * q), F(0)),
            Piece(F(1), F(1), True, True, F(1), F(0)),
            Piece(F(1), F(2), False, False, F(p), F(0)),
            Piece(F(2), None, True, False, F(1), F(-1)),
        )
    )


@dataclass(frozen=True)
class Orbit:
    status: str  # "reached", "diverged" (certified by a revisited value) or "unknown"
    steps: int
    points: tuple = field(repr=False)


def pam_orbit(f: Pam, start, target, budget: int = 100_000) -> Orbit:
    x = parse_rational(start)
    target = parse_rational(target)
    points = [x]
    seen = {x}
    for n in range(budget + 1):
        if x == target:
            return Orbit("reached", n, tuple(points))
        if n == budget:
            break
        x = f(x)
        if x in seen:
            _check_orbit(f, points + [x])
            return Orbit("diverged", n + 1, tuple(points + [x]))
        seen.add(x)
        points.append(x)
    return Orbit("unknown", budget, tuple(points))


def _check_orbit(f: Pam, points: Sequence) -> None:
    for x, y in zip(points, points[1:]):
        if f(x) != y:
            raise AssertionError(f"orbit step {x} -> {y} disagrees with the map")


def tds01_via_pam(lam: DiscountFactor, t, budget: int = 100_000) -> Orbit | None:
    """Orbit of ``t`` towards 1, with the identity piece on ``(1, 2)``
    guarded when ``λ = 1/n``: an orbit must never sit there."""
    f = build_pam_from_tds01(lam, t)
    if f is None:
        return None
    orbit = pam_orbit(f, t, 1, budget)
    _check_orbit(f, orbit.points)
    if lam.Q == 1:
        for x in orbit.points:
            if 1 < x < 2:
                raise AssertionError(f"orbit entered (1, 2) at {x} with the identity piece")
    return orbit


# -- Cantor sets ------------------------------------------------------------------


def cantor_discount(k: int) -> DiscountFactor:
    return DiscountFactor(Fraction(k - 1, 2 * k))


def cantor_membership(k: int, t, budget: int | None = None) -> Verdict:
    """Membership of ``t`` in the middle-kth Cantor set; total for ``k = 3``."""
    if k < 3:
        raise ValueError(f"k must be at least 3, got {k}")
    t = parse_rational(t)
    if not 0 <= t <= 1:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    return decide_tds01(cantor_discount(k), t * Fraction(k - 1, k + 1), budget)


def first_level_removed_fraction(k: int) -> Fraction:
    """Share of ``[0, 1]`` removed at the first level, computed from the
    0/1 sums: words starting with 0 and with 1 cover two intervals."""
    lam = cantor_discount(k).value
    top = lam / (1 - lam)
    return (lam - lam * top) / top


def ternary_cantor_member(t) -> bool:
    """Middle-third Cantor membership from the base-3 expansion."""
    x = parse_rational(t)
    if not 0 <= x <= 1:
        raise ValueError(f"t must lie in [0, 1], got {x}")
    if x == 1:
        return True
    seen = set()
    while x not in seen:
        seen.add(x)
        y = 3 * x
        digit = int(y)
        x = y - digit
        if digit == 1:
            # 0.…1000… equals 0.…0222…
            return x == 0
    return True
