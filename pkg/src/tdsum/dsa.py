"""Discounted-sum automata over finite and infinite words."""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

from .numerics import DiscountFactor, LassoWord, format_rational, parse_rational
from .omega.automaton import Automaton
from .omega.solve import refute_gtds, solve_cgtds_f
from .omega.gaps import find_lasso
from .problem import GtdsInstance, WeightAlphabet, normalize
from .verdict import Answer, Reason, Verdict


class NotFunctional(ValueError):
    """Raised when a procedure needs a functional automaton."""


class NoAcceptingRun(ValueError):
    pass


@dataclass(frozen=True)
class Transition:
    src: Hashable
    letter: Hashable
    dst: Hashable
    weight: Fraction


@dataclass(frozen=True)
class Dsa:
    lam: DiscountFactor
    states: tuple
    initial: Hashable
    accepting: frozenset
    transitions: tuple
    mode: str = "finite"
    functional: bool = False
    alphabet: tuple = ()

    def __post_init__(self) -> None:
        if self.mode not in ("finite", "infinite"):
            raise ValueError(f"mode must be 'finite' or 'infinite', got {self.mode!r}")
        states = tuple(dict.fromkeys(self.states))
        if self.initial not in states:
            raise ValueError(f"initial state {self.initial!r} is not a state")
        trans = tuple(
            t if isinstance(t, Transition) else Transition(t[0], t[1], t[2], parse_rational(t[3]))
            for t in self.transitions
        )
        for t in trans:
            if t.src not in states or t.dst not in states:
                raise ValueError(f"transition {t} uses an unknown state")
        letters = list(self.alphabet)
        for t in trans:
            if t.letter not in letters:
                letters.append(t.letter)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "transitions", trans)
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "alphabet", tuple(letters))
        out: dict = {q: [] for q in states}
        for i, t in enumerate(trans):
            out[t.src].append(i)
        object.__setattr__(self, "_out", out)

    def out(self, q) -> list:
        return [self.transitions[i] for i in self._out[q]]

    def out_indexed(self, q) -> list:
        return [(i, self.transitions[i]) for i in self._out[q]]

    def state_index(self, q) -> int:
        return self.states.index(q)

    @property
    def weight_set(self) -> list:
        return sorted({t.weight for t in self.transitions})

    # JSON ----------------------------------------------------------------

    @classmethod
    def from_json(cls, data: Mapping) -> "Dsa":
        try:
            trans = [
                Transition(t["from"], t["letter"], t["to"], parse_rational(t["weight"]))
                for t in data.get("transitions", [])
            ]
            mode = data.get("mode", "finite")
            accepting = data.get("accepting")
            if accepting is None:
                accepting = data["states"] if mode == "infinite" else []
            return cls(
                DiscountFactor.of(data["lambda"]),
                tuple(data["states"]),
                data["initial"],
                frozenset(accepting),
                tuple(trans),
                mode,
                bool(data.get("functional", False)),
            )
        except KeyError as exc:
            raise ValueError(f"automaton JSON is missing field {exc}") from None

    def to_json(self) -> dict:
        return {
            "lambda": format_rational(self.lam.value),
            "mode": self.mode,
            "functional": self.functional,
            "states": [str(q) for q in self.states],
            "initial": str(self.initial),
            "accepting": [str(q) for q in self.states if q in self.accepting],
            "transitions": [
                {"from": str(t.src), "letter": str(t.letter), "to": str(t.dst), "weight": format_rational(t.weight)}
                for t in self.transitions
            ],
        }

    # structure -------------------------------------------------------------

    def reachable(self) -> set:
        seen = {self.initial}
        queue = deque(seen)
        while queue:
            q = queue.popleft()
            for t in self.out(q):
                if t.dst not in seen:
                    seen.add(t.dst)
                    queue.append(t.dst)
        return seen

    def co_reachable(self) -> set:
        good = set(self.accepting)
        changed = True
        while changed:
            changed = False
            for t in self.transitions:
                if t.dst in good and t.src not in good:
                    good.add(t.src)
                    changed = True
        return good

    def trimmed(self) -> "Dsa":
        keep = self.reachable() & self.co_reachable()
        if self.initial not in keep:
            raise NoAcceptingRun("no accepting state is reachable from the initial state")
        return Dsa(
            self.lam,
            tuple(q for q in self.states if q in keep),
            self.initial,
            self.accepting & keep,
            tuple(t for t in self.transitions if t.src in keep and t.dst in keep),
            self.mode,
            self.functional,
            self.alphabet,
        )


def loop_automaton(lam, weights: Mapping, mode: str = "finite") -> Dsa:
    """One accepting state with a self-loop per letter."""
    trans = tuple(("q", a, "q", parse_rational(w)) for a, w in weights.items())
    return Dsa(DiscountFactor.of(lam) if not isinstance(lam, DiscountFactor) else lam,
               ("q",), "q", frozenset({"q"}), trans, mode, True)


# -- values of finite words -----------------------------------------------------


def run_values(A: Dsa, word: Sequence) -> dict:
    """State -> set of values of runs on ``word`` ending there."""
    current = {A.initial: {Fraction(0)}}
    power = Fraction(1)
    for letter in word:
        nxt: dict = {}
        for q, vals in current.items():
            for t in A.out(q):
                if t.letter == letter:
                    nxt.setdefault(t.dst, set()).update(v + power * t.weight for v in vals)
        current = nxt
        power *= A.lam.value
    return current


def word_value(A: Dsa, word: Sequence) -> Fraction | None:
    """Least value over accepting runs; None when no run accepts."""
    if A.mode != "finite":
        raise ValueError("word_value is defined for finite-word automata")
    current = {A.initial: Fraction(0)}
    power = Fraction(1)
    for letter in word:
        nxt: dict = {}
        for q, v in current.items():
            for t in A.out(q):
                if t.letter == letter:
                    val = v + power * t.weight
                    if t.dst not in nxt or val < nxt[t.dst]:
                        nxt[t.dst] = val
        current = nxt
        power *= A.lam.value
    vals = [v for q, v in current.items() if q in A.accepting]
    return min(vals) if vals else None


def accepting_run_values(A: Dsa, word: Sequence) -> set:
    out = set()
    for q, vals in run_values(A, word).items():
        if q in A.accepting:
            out |= vals
    return out


class FunctionalityViolation(AssertionError):
    def __init__(self, word, values):
        super().__init__(f"accepting runs on {word!r} disagree: {sorted(values)}")
        self.word = word
        self.values = values


def random_accepted_word(A: Dsa, rng: random.Random, max_len: int = 12) -> tuple | None:
    """Random walk in the trimmed automaton that stops at an accepting state."""
    try:
        T = A.trimmed()
    except NoAcceptingRun:
        return None
    q, word = T.initial, []
    for _ in range(max_len):
        if q in T.accepting and rng.random() < 0.3:
            break
        outs = T.out(q)
        if not outs:
            break
        t = rng.choice(outs)
        word.append(t.letter)
        q = t.dst
    tail = _shortest_to_accepting(T, q)
    return tuple(word) + tuple(tail)


def check_functional(A: Dsa, samples: int = 500, seed: int = 0) -> None:
    """Sample accepted words and check all accepting runs agree in value."""
    rng = random.Random(seed)
    for _ in range(samples):
        w = random_accepted_word(A, rng)
        if w is None:
            return
        vals = accepting_run_values(A, w)
        if len(vals) > 1:
            raise FunctionalityViolation(w, vals)


def _shortest_to_accepting(A: Dsa, q) -> list:
    parent = {q: None}
    queue = deque([q])
    while queue:
        p = queue.popleft()
        if p in A.accepting:
            word = []
            while parent[p] is not None:
                p, a = parent[p]
                word.append(a)
            return word[::-1]
        for t in A.out(p):
            if t.dst not in parent:
                parent[t.dst] = (p, t.letter)
                queue.append(t.dst)
    raise NoAcceptingRun(f"no accepting state reachable from {q!r}")


# -- exact value ------------------------------------------------------------------


def _require_functional(A: Dsa) -> None:
    if not A.functional:
        raise NotFunctional("automaton is not declared functional; refusing")
    if A.mode != "finite":
        raise ValueError("this procedure works on finite-word automata")


def exact_value(A: Dsa, t, budget_states: int | None = None) -> Verdict:
    """Is there a finite word ``w`` with ``A(w) = t``?

    Transitions become letters, so accepting paths form a regular
    language; the weights of the letters are the transition weights.
    """
    _require_functional(A)
    t = parse_rational(t)
    names = [f"t{i}" for i in range(len(A.transitions))]
    nfa = Automaton.build(
        A.states,
        A.initial,
        A.accepting,
        [(tr.src, names[i], tr.dst) for i, tr in enumerate(A.transitions)],
        names,
    )
    if not names:
        alphabet = WeightAlphabet((("_", Fraction(0)),))
        nfa = nfa.with_alphabet(("_",))
    else:
        alphabet = WeightAlphabet(tuple((names[i], tr.weight) for i, tr in enumerate(A.transitions)))
    inst = GtdsInstance(A.lam, t, alphabet, nfa, mode="finite", kind="cgtds_f")
    v = solve_cgtds_f(inst, budget_states)
    if not v.is_yes:
        return v
    by_name = dict(zip(names, A.transitions))
    word = tuple(by_name[n].letter for n in v.certificate.prefix)
    assert word_value(A, word) == t
    return Verdict(v.answer, v.reason, LassoWord(word), {**v.details, "path": v.certificate.prefix})


# -- supremum by policy iteration -----------------------------------------------


STOP = "stop"


@dataclass(frozen=True)
class SupValue:
    value: Fraction
    attained: bool
    values: dict = field(compare=False)  # state -> V(q)
    policy: dict = field(compare=False)  # state -> STOP or transition index


def _action_key(A: Dsa, action) -> tuple:
    if action == STOP:
        return (0,)
    t = A.transitions[action]
    letter_rank = A.alphabet.index(t.letter)
    return (1, letter_rank, A.state_index(t.dst), action)


def _evaluate(A: Dsa, policy: dict) -> dict:
    """Exact value of each state under a positional policy."""
    lam = A.lam.value
    values: dict = {}
    for start in A.states:
        if start in values:
            continue
        path, pos = [], {}
        q = start
        while q not in values and q not in pos and policy[q] != STOP:
            pos[q] = len(path)
            path.append(q)
            q = A.transitions[policy[q]].dst
        if q in values:
            tail = values[q]
        elif policy[q] == STOP and q not in pos:
            values[q] = Fraction(0)
            tail = Fraction(0)
        else:
            cyc = path[pos[q]:]
            ws = [A.transitions[policy[p]].weight for p in cyc]
            n = len(ws)
            total = sum(w * lam**i for i, w in enumerate(ws))
            base = total / (1 - lam**n)
            # values around the cycle, computed backwards from the entry point
            for k in range(n - 1, -1, -1):
                p = cyc[k]
                nxt = cyc[(k + 1) % n]
                if k == n - 1:
                    values[p] = ws[k] + lam * base
                else:
                    values[p] = ws[k] + lam * values[nxt]
            path = path[: pos[q]]
            tail = values[q]
        for p in reversed(path):
            tail = A.transitions[policy[p]].weight + lam * tail
            values[p] = tail
    return values


def _action_value(A: Dsa, action, values: dict) -> Fraction:
    if action == STOP:
        return Fraction(0)
    t = A.transitions[action]
    return t.weight + A.lam.value * values[t.dst]


def _actions(A: Dsa, q) -> list:
    acts = [STOP] if q in A.accepting else []
    acts += [i for i, _ in A.out_indexed(q)]
    return sorted(acts, key=lambda a: _action_key(A, a))


def sup_value(A: Dsa) -> SupValue:
    """``sup_w A(w)`` over finite words and whether some word attains it."""
    if A.mode != "finite":
        raise ValueError("sup_value works on finite-word automata")
    T = A.trimmed()
    policy = {q: _actions(T, q)[0] for q in T.states}
    while True:
        values = _evaluate(T, policy)
        changed = False
        for q in T.states:
            current = _action_value(T, policy[q], values)
            best, best_val = policy[q], current
            for a in _actions(T, q):
                v = _action_value(T, a, values)
                if v > best_val:
                    best, best_val = a, v
            if best != policy[q]:
                policy[q] = best
                changed = True
        if not changed:
            break
    attained = _attainable(T, values)
    # express the policy in terms of the original transition indices
    index = {tr: i for i, tr in enumerate(A.transitions)}
    orig = {q: a if a == STOP else index[T.transitions[a]] for q, a in policy.items()}
    return SupValue(values[T.initial], attained, values, orig)


def bellman_residual(A: Dsa, values: Mapping) -> Fraction:
    T = A.trimmed()
    worst = Fraction(0)
    for q in T.states:
        best = max(_action_value(T, a, values) for a in _actions(T, q))
        worst = max(worst, abs(best - values[q]))
    return worst


def _tight_actions(A: Dsa, values: dict, q) -> list:
    return [a for a in _actions(A, q) if _action_value(A, a, values) == values[q]]


def _attainable(T: Dsa, values: dict) -> bool:
    seen = {T.initial}
    queue = deque(seen)
    while queue:
        q = queue.popleft()
        for a in _tight_actions(T, values, q):
            if a == STOP:
                return True
            dst = T.transitions[a].dst
            if dst not in seen:
                seen.add(dst)
                queue.append(dst)
    return False


def _word_above(A: Dsa, sup: SupValue, t: Fraction) -> tuple:
    """Finite word with value above ``t < sup``: follow the optimal policy
    ``n`` steps, then the shortest way to acceptance, for growing ``n``."""
    T = A.trimmed()
    n = 0
    while True:
        q, word = T.initial, []
        for _ in range(n):
            a = sup.policy[q]
            if a == STOP:
                break
            tr = A.transitions[a]
            word.append(tr.letter)
            q = tr.dst
        word += _shortest_to_accepting(T, q)
        v = word_value(A, word)
        if v is not None and v > t:
            return tuple(word)
        n += 1


# -- universality and inclusion --------------------------------------------------


@dataclass(frozen=True)
class Universality:
    holds: bool
    counterexample: tuple | None = None
    sup: Fraction | None = None
    attained: bool | None = None
    details: dict = field(default_factory=dict, compare=False)


def universality_finite(A: Dsa, t, strict: bool) -> Universality:
    """Whether ``A(w) < t`` (strict) or ``A(w) ≤ t`` for every accepted
    finite word."""
    _require_functional(A)
    t = parse_rational(t)
    try:
        sup = sup_value(A)
    except NoAcceptingRun:
        return Universality(True, details={"vacuous": True})
    S = sup.value
    if strict:
        if S < t:
            return Universality(True, None, S, sup.attained)
        ev = exact_value(A, t)
        if ev.is_yes:
            return Universality(False, ev.certificate.prefix, S, sup.attained, {"witness_value": t})
        if S == t:
            return Universality(True, None, S, sup.attained)
    elif S <= t:
        return Universality(True, None, S, sup.attained)
    w = _word_above(A, sup, t)
    return Universality(False, w, S, sup.attained, {"witness_value": word_value(A, w)})


@dataclass(frozen=True)
class Inclusion:
    holds: bool
    counterexample: tuple | None = None
    a_only: tuple | None = None  # shortest word accepted by A but not B
    b_only: tuple | None = None
    details: dict = field(default_factory=dict, compare=False)


def difference_automaton(A: Dsa, B: Dsa) -> Dsa:
    """Product on common words with weights ``γ_A − γ_B``."""
    if A.lam != B.lam:
        raise ValueError("inclusion needs equal discount factors")
    init = (A.initial, B.initial)
    states, trans = [init], []
    seen = {init}
    queue = deque([init])
    while queue:
        p, r = queue.popleft()
        for ta in A.out(p):
            for tb in B.out(r):
                if ta.letter != tb.letter:
                    continue
                dst = (ta.dst, tb.dst)
                trans.append(Transition((p, r), ta.letter, dst, ta.weight - tb.weight))
                if dst not in seen:
                    seen.add(dst)
                    states.append(dst)
                    queue.append(dst)
    acc = frozenset(s for s in states if s[0] in A.accepting and s[1] in B.accepting)
    letters = tuple(dict.fromkeys(A.alphabet + B.alphabet))
    return Dsa(A.lam, tuple(states), init, acc, tuple(trans), "finite", True, letters)


def _domain_difference(A: Dsa, B: Dsa) -> tuple | None:
    """Shortest word accepted by A and not by B (subset construction on B)."""
    letters = tuple(dict.fromkeys(A.alphabet + B.alphabet))
    start = (frozenset([A.initial]), frozenset([B.initial]))
    parent = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        sa, sb = node
        if sa & A.accepting and not sb & B.accepting:
            word = []
            while parent[node] is not None:
                node, a = parent[node]
                word.append(a)
            return tuple(reversed(word))
        for a in letters:
            na = frozenset(t.dst for q in sa for t in A.out(q) if t.letter == a)
            if not na:
                continue
            nb = frozenset(t.dst for q in sb for t in B.out(q) if t.letter == a)
            nxt = (na, nb)
            if nxt not in parent:
                parent[nxt] = (node, a)
                queue.append(nxt)
    return None


def inclusion_finite(A: Dsa, B: Dsa, strict: bool) -> Inclusion:
    """Whether ``A(w) < B(w)`` (strict) or ``A(w) ≤ B(w)`` on every word
    accepted by both; words accepted by only one side are reported in
    ``a_only`` / ``b_only``."""
    _require_functional(A)
    _require_functional(B)
    C = difference_automaton(A, B)
    u = universality_finite(C, 0, strict)
    return Inclusion(
        u.holds,
        u.counterexample,
        _domain_difference(A, B),
        _domain_difference(B, A),
        {"difference_sup": u.sup},
    )


# -- infinite words -------------------------------------------------------------


def tds_to_universality_gadget(lam: DiscountFactor, t) -> Dsa:
    """Infinite-word automaton with ``A(w) = −|Σ_{i≥0} λ^i w_i − t|`` for
    ``w ∈ {a=0, b=1}^ω``, so it is not ``<0``-universal iff that sum can hit
    ``t`` exactly.

    A fresh initial state branches into the two looping states, the second
    of which carries the negated weights.
    """
    t = parse_rational(t)
    a = -t * (1 - lam.value)
    b = 1 - t * (1 - lam.value)
    trans = []
    for q, sign in (("q1", 1), ("q2", -1)):
        trans += [("q0", "a", q, sign * a), ("q0", "b", q, sign * b)]
        trans += [(q, "a", q, sign * a), (q, "b", q, sign * b)]
    return Dsa(lam, ("q0", "q1", "q2"), "q0", frozenset({"q0", "q1", "q2"}), tuple(trans), "infinite", False)


def gadget_run_values(G: Dsa, prefix: Sequence) -> tuple:
    """Partial values of the two branches of the gadget on a finite prefix."""
    vals = run_values(G, prefix)
    return min(vals.get("q1", {0})), min(vals.get("q2", {0}))


@dataclass(frozen=True)
class SemiUniversality:
    answer: Answer  # YES = holds, NO = fails, UNKNOWN
    witness: LassoWord | None = None
    details: dict = field(default_factory=dict, compare=False)


def semi_universality_infinite(A: Dsa, t, strict: bool = True, budget: int | None = None) -> SemiUniversality:
    """Whether every infinite word with a run has ``A(w) < t`` (or ``≤``).

    The exact refuter runs on the weight set of ``A``.  When it closes,
    every run's value is strictly above or strictly below ``t`` after a
    bounded prefix, so ``strict`` no longer matters, and the question
    becomes inclusion of two safety languages: words with a run versus
    words with a run that ends up below ``t``.
    """
    if A.mode != "infinite":
        raise ValueError("semi_universality_infinite works on infinite-word automata")
    t = parse_rational(t)
    if not A.transitions:
        return SemiUniversality(Answer.YES, details={"vacuous": True})
    weights = A.weight_set
    inst = GtdsInstance(A.lam, t, WeightAlphabet(tuple((w, w) for w in weights)))
    ref = refute_gtds(inst, budget)
    if not ref.is_no:
        return SemiUniversality(Answer.UNKNOWN, details={"refuter": ref.details})
    height = ref.details["height"]
    nf, _ = normalize(inst)
    norm = nf.int_weights  # original weight -> normalized integer
    lam = A.lam.value
    bound = nf.bound

    def classify(g):
        if g < 0:
            return "above"
        if g > bound:
            return "below"
        return g

    def step(c, w):
        if c in ("above", "below"):
            return c
        return classify(c / lam - norm[w])

    root = (A.initial, classify(nf.first_gap))
    edges: list = []
    order = [root]
    seen = {root}
    queue = deque(order)
    while queue:
        node = queue.popleft()
        q, c = node
        for tr in A.out(q):
            dst = (tr.dst, step(c, tr.weight))
            edges.append((node, tr.letter, dst))
            if dst not in seen:
                seen.add(dst)
                order.append(dst)
                queue.append(dst)
    X = _safety_trim(Automaton.build(order, root, order, edges, A.alphabet))
    if X is None:
        return SemiUniversality(Answer.YES, details={"height": height, "vacuous": True})
    # unclassified states cannot cycle (the refuter closed), so infinite
    # runs avoiding "above" end up below the threshold
    Xb = _safety_trim(X, allowed={s for s in X.states if s[1] != "above"})
    word = _safety_counterexample(X, Xb)
    details = {"height": height, "configurations": len(X)}
    if word is None:
        return SemiUniversality(Answer.YES, details=details)
    return SemiUniversality(Answer.NO, word, details)


def _safety_trim(X: Automaton, allowed: set | None = None) -> Automaton | None:
    """Restrict to (allowed) states with an infinite continuation; None when
    the initial state has none."""
    alive = set(X.states) if allowed is None else set(allowed)
    changed = True
    while changed:
        changed = False
        for q in list(alive):
            if not any(t in alive for _, _, t in X._out(q)):
                alive.discard(q)
                changed = True
    if X.initial not in alive:
        return None
    keep = [q for q in X.states if q in alive]
    edges = [(q, a, t) for q, a, t in X.edges() if q in alive and t in alive]
    return Automaton.build(keep, X.initial, keep, edges, X.alphabet)


def _safety_counterexample(X: Automaton, Xb: Automaton | None) -> LassoWord | None:
    """Infinite word with a run in X and none in Xb, if any."""
    start = (frozenset([X.initial]), frozenset([Xb.initial]) if Xb is not None else frozenset())
    parent = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        sx, sb = node
        if sx and not sb:
            prefix = []
            n = node
            while parent[n] is not None:
                n, a = parent[n]
                prefix.append(a)
            prefix.reverse()
            q = min(sx, key=lambda s: X.states.index(s))
            lasso, _ = find_lasso(q, X.alphabet, X.successors, lambda s: True)
            return LassoWord(tuple(prefix) + lasso.prefix, lasso.period).canonical()
        for a in X.alphabet:
            nx = X.step_set(sx, a)
            if not nx:
                continue
            nb = Xb.step_set(sb, a) if Xb is not None else frozenset()
            nxt = (nx, nb)
            if nxt not in parent:
                parent[nxt] = (node, a)
                queue.append(nxt)
    return None
