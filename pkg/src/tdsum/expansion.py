"""Gap-based exploration of expansions in a rational base ``β = 1/λ``.

A gap is the normalized remainder of the target still to be produced.
Emitting digit ``m`` maps gap ``g`` to ``β·g − m``; a branch survives while
the gap stays in ``[0, bound]``, where ``bound`` is the value of the all-max
tail.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .numerics import DiscountFactor, LassoWord, format_rational, parse_rational
from .problem import GtdsInstance, NormalFormInstance, WeightAlphabet, normalize
from .verdict import Answer, Reason, Verdict

DEFAULT_BUDGET = 10_000


def gap_step(g, m, lam: DiscountFactor) -> Fraction:
    return Fraction(g) / lam.value - m


def greedy_digit(g, lam: DiscountFactor, weights: Iterable) -> Fraction:
    """Largest weight ``m`` with ``β·g − m ≥ 0``."""
    g = Fraction(g)
    if g < 0:
        raise ValueError(f"negative gap {g}: no digit keeps the exploration alive")
    scaled = g / lam.value
    return max(m for m in weights if m <= scaled)


def lazy_digit(g, lam: DiscountFactor, weights: Iterable, bound) -> Fraction:
    """Smallest weight ``m`` with ``β·g − m ≤ bound``."""
    scaled = Fraction(g) / lam.value
    ok = [m for m in weights if scaled - m <= bound]
    if not ok:
        raise ValueError(f"gap {g} is above the bound: no eligible digit")
    return min(ok)


def eligible_digits(g, lam: DiscountFactor, weights: Iterable, bound) -> set:
    scaled = Fraction(g) / lam.value
    return {m for m in weights if 0 <= scaled - m <= bound}


@dataclass(frozen=True)
class Outcome:
    kind: str  # "TooBig", "Repeat" or "BudgetExhausted"
    j: int | None = None
    i: int | None = None

    def __str__(self) -> str:
        if self.kind == "Repeat":
            return f"Repeat(j={self.j}, i={self.i})"
        if self.kind == "TooBig":
            return f"TooBig(at={self.i})"
        return self.kind


@dataclass
class ExplorationTrace:
    """Greedy digits and gaps; ``gaps[0]`` is the initial gap and
    ``gaps[n+1] = β·gaps[n] − digits[n]``."""

    lam: DiscountFactor
    digits: list = field(default_factory=list)
    letters: list = field(default_factory=list)
    gaps: list = field(default_factory=list)
    outcome: Outcome = Outcome("BudgetExhausted")

    def verify(self) -> bool:
        return all(
            self.gaps[n + 1] == gap_step(self.gaps[n], self.digits[n], self.lam)
            for n in range(len(self.digits))
        )

    def lasso(self) -> LassoWord | None:
        if self.outcome.kind != "Repeat":
            return None
        j, i = self.outcome.j, self.outcome.i
        return LassoWord(tuple(self.letters[:j]), tuple(self.letters[j:i]))

    def dump(self) -> str:
        """One ``step n: gap=... digit=...`` line per step (1-based), then
        the outcome tag."""
        lines = []
        for n, g in enumerate(self.gaps):
            if n < len(self.digits):
                lines.append(f"step {n + 1}: gap={format_rational(g)} digit={format_rational(self.digits[n])}")
            elif self.outcome.kind == "TooBig":
                lines.append(f"step {n + 1}: gap={format_rational(g)} digit=-")
        o = self.outcome
        if o.kind == "Repeat":
            lines.append(f"Repeat: gap at step {o.i + 1} equals gap at step {o.j + 1}")
        elif o.kind == "TooBig":
            lines.append(f"TooBig at step {o.i + 1}")
        else:
            lines.append(f"BudgetExhausted after {len(self.digits)} steps")
        return "\n".join(lines)


def greedy_explore(nf: NormalFormInstance, max_steps: int) -> ExplorationTrace:
    """Deterministic greedy run until the gap leaves ``[0, bound]``, a gap
    repeats, or ``max_steps`` digits have been emitted."""
    lam = nf.lam
    bound = nf.bound
    by_weight: dict = {}
    for letter, w in nf.alphabet.sorted_by_weight():
        by_weight.setdefault(w, letter)
    weights = sorted(by_weight)
    trace = ExplorationTrace(lam)
    g = nf.first_gap
    seen: dict = {}
    # once the numerator over D stops being integral no gap can repeat
    D = nf.d if nf.start_exponent == 1 else nf.d * lam.P
    for n in range(max_steps + 1):
        trace.gaps.append(g)
        if g < 0 or g > bound:
            trace.outcome = Outcome("TooBig", i=n)
            return trace
        if (g * D).denominator == 1:
            if g in seen:
                trace.outcome = Outcome("Repeat", j=seen[g], i=n)
                return trace
            seen[g] = n
        if n == max_steps:
            break
        m = greedy_digit(g, lam, weights)
        trace.digits.append(m)
        trace.letters.append(by_weight[m])
        g = gap_step(g, m, lam)
    trace.outcome = Outcome("BudgetExhausted")
    return trace


# -- TDS01 ----------------------------------------------------------------------


def tds01_instance(lam: DiscountFactor, t) -> GtdsInstance:
    """``Σ_{i≥1} w_i λ^i = t`` over digits 0 and 1."""
    return GtdsInstance(
        lam,
        parse_rational(t),
        WeightAlphabet.digits(0, 1),
        None,
        start_exponent=1,
        kind="tds01",
    )


def _first_non_divisible(trace: ExplorationTrace, d: int, Q: int) -> int | None:
    for n, g in enumerate(trace.gaps):
        x = g * d
        if x.denominator != 1 or x.numerator % Q:
            return n
    return None


def decide_tds01(lam: DiscountFactor, t, budget: int | None = None) -> Verdict:
    """Decide whether ``t = Σ_{i≥1} w_i λ^i`` for some ``w ∈ {0,1}^ω``.

    Total for ``λ ≥ 1/2`` and for ``λ = 1/n``.  Otherwise greedy is
    complete (at most one digit is ever eligible), so a gap that leaves the
    range refutes, a repeated gap yields the lasso, and anything else is
    Unknown once the budget runs out.
    """
    from .omega.solve import solve_cgtds

    t = parse_rational(t)
    d = t.denominator
    if budget is None:
        budget = max(d, DEFAULT_BUDGET)
    if budget < d:
        raise ValueError(f"budget {budget} is below the classification bound d = {d}")
    inst = tds01_instance(lam, t)
    bound = lam.value / (1 - lam.value)
    if t < 0 or t > bound:
        return Verdict(
            Answer.NO,
            Reason.GAP_EXCEEDED_BOUND,
            details={"gap": t, "bound": bound, "step": 0},
        )
    if lam.Q == 1:
        return decide_integral_base(inst)
    if lam.value >= Fraction(1, 2):
        v = solve_cgtds(inst)
        return Verdict(v.answer, v.reason, v.certificate, {**v.details, "branch": "lambda>=1/2"})

    nf, _ = normalize(inst)
    trace = greedy_explore(nf, budget)
    assert trace.verify()
    no_ev = _first_non_divisible(trace, d, lam.Q)
    details = {"trace": trace, "steps": len(trace.digits), "budget": budget}
    if no_ev is not None:
        details["no_ev_periodic_at"] = no_ev
    kind = trace.outcome.kind
    if kind == "TooBig":
        return Verdict(Answer.NO, Reason.GAP_EXCEEDED_BOUND, details=details)
    if kind == "Repeat":
        cert = trace.lasso()
        assert len(cert) <= d, "eventually-periodic witness longer than d"
        assert inst.is_solution(cert)
        return Verdict(Answer.YES, Reason.GAP_REPETITION, cert, details)
    reason = Reason.NO_EV_PERIODIC_EXISTS if no_ev is not None else Reason.BUDGET_EXHAUSTED
    return Verdict(Answer.UNKNOWN, reason, details=details)


def decide_integral_base(instance: GtdsInstance, budget_states: int | None = None) -> Verdict:
    """Total decision for ``λ = 1/n``: every gap keeps the denominator of the
    first one, so the gap graph is finite and complete."""
    from .omega.solve import solve_cgtds

    if instance.lam.Q != 1:
        raise ValueError(f"discount factor {instance.lam} is not of the form 1/n")
    v = solve_cgtds(instance, budget_states=budget_states)
    assert not v.is_unknown or v.reason is Reason.BUDGET_EXHAUSTED
    return v


# -- growth rate --------------------------------------------------------------


@dataclass(frozen=True)
class GrowthViolation:
    position: int  # where the offending block ends (1-based)
    block: str  # "0" for a run of zeros, "1" for a run of ones
    previous: int  # position of the preceding opposite digit, 0 if none
    claimed_denominator: int

    @property
    def length(self) -> int:
        return self.position - self.previous - 1


def _block_too_long(prev: int, pos: int, P: int, Q: int, d: int) -> bool:
    """Whether the next 1 at ``pos`` after the one at ``prev`` (or the first
    1, when ``prev == 0``) is too late for a value with denominator ``d``.

    The remainder after position ``prev`` is a positive multiple of
    ``1/(d·P^prev)`` yet at most ``λ^pos/(1−λ)``.
    """
    if prev == 0:
        return P**pos * (P - Q) > d * P * Q**pos
    return P**pos * (P - Q) > d * P ** (prev + 1) * Q**pos


def _positions_and_complement(ones: Iterator[int], horizon: int) -> Iterator[tuple[int, int]]:
    """Yield ``(position, digit)`` for every position up to ``horizon``."""
    pos = 1
    for one in ones:
        if one < pos:
            raise ValueError("digit positions must be strictly increasing and ≥ 1")
        while pos < one and pos <= horizon:
            yield pos, 0
            pos += 1
        if pos > horizon:
            return
        yield pos, 1
        pos += 1
    while pos <= horizon:
        yield pos, 0
        pos += 1


def growth_rate_falsifier(
    digit_positions: Iterable[int],
    lam: DiscountFactor,
    claimed_denominator: int,
    horizon: int,
) -> GrowthViolation | None:
    """First block of a {0,1}-word that is too long for its value to be
    ``c/d`` with ``d = claimed_denominator``.

    Runs of zeros are checked directly; runs of ones through the complement
    word, whose value has denominator dividing ``d·(P−Q)``.  Violations are
    monotone in ``d``: a violation for ``d`` is one for every smaller
    denominator.  Returns None when the scan reaches ``horizon`` or the
    positions run out.
    """
    P, Q = lam.P, lam.Q
    if Fraction(P, Q) <= 2:
        raise ValueError("growth-rate bound needs base P/Q > 2")
    d = claimed_denominator
    d_comp = d * (P - Q)
    last = {1: 0, 0: 0}
    for pos, digit in _positions_and_complement(iter(digit_positions), horizon):
        dd = d if digit == 1 else d_comp
        if _block_too_long(last[digit], pos, P, Q, dd):
            return GrowthViolation(pos, "0" if digit == 1 else "1", last[digit], d)
        last[digit] = pos
    return None


def powers_positions(base: int) -> Iterator[int]:
    """1-based positions ``base^0, base^1, ...``."""
    p = 1
    while True:
        yield p
        p *= base


def periodic_positions(u: Sequence[int], v: Sequence[int]) -> Iterator[int]:
    """Positions of 1s in the {0,1}-word ``u v^ω``."""
    for i, x in enumerate(u, start=1):
        if x:
            yield i
    if not any(v):
        return
    base = len(u) + 1
    while True:
        for i, x in enumerate(v):
            if x:
                yield base + i
        base += len(v)
