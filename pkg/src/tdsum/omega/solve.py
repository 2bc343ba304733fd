"""Solvers for constrained generalized target discounted sum."""
from __future__ import annotations

import math
from collections import deque
from fractions import Fraction

from ..numerics import LassoWord
from ..problem import GtdsInstance, full_coverage, normalize
from ..verdict import Answer, Reason, Verdict
from .automaton import Automaton
from .gaps import StateBudgetExceeded, build_gap_automaton, product_and_emptiness
from .regex import compile_regular

DEFAULT_REFUTE_BUDGET = 100_000


def verify_certificate(instance: GtdsInstance, word: LassoWord) -> None:
    """Crash rather than report a wrong certificate."""
    value = instance.value(word)
    if value != instance.target:
        raise AssertionError(f"certificate {word} has value {value}, target is {instance.target}")
    aut = instance.constraint_automaton()
    if aut is not None and not aut.accepts_lasso(word):
        raise AssertionError(f"certificate {word} violates the constraint")


def witness_bound(instance: GtdsInstance) -> Fraction:
    """``2·d·|e|·λ·a_k/(1−λ)`` for the normal form of ``instance``."""
    nf, _ = normalize(instance)
    return 2 * nf.d * instance.constraint_size() * nf.bound


def solve_cgtds(
    instance: GtdsInstance,
    budget_steps: int | None = None,
    budget_states: int | None = None,
) -> Verdict:
    """Eventually-periodic solutions via gap automaton × constraint.

    Yes answers carry a verified lasso, except in the unconstrained
    full-coverage case, where a solution is guaranteed but may be
    non-periodic.  No is definitive when the first gap is out of range,
    when ``λ = 1/n``, or when the exact refuter exhausts its exploration.
    """
    if instance.is_finite:
        raise ValueError("solve_cgtds expects an infinite-word instance")
    nf, _ = normalize(instance)
    g0 = nf.first_gap
    if not 0 <= g0 <= nf.bound:
        return Verdict(
            Answer.NO,
            Reason.GAP_EXCEEDED_BOUND,
            details={"gap": g0, "bound": nf.bound, "step": 0, "eventually_periodic": False},
        )
    try:
        gap = build_gap_automaton(nf, budget_states)
    except StateBudgetExceeded as exc:
        return Verdict(Answer.UNKNOWN, Reason.BUDGET_EXHAUSTED, details={"budget_states": exc.limit})
    constraint = instance.constraint_automaton()
    cert = product_and_emptiness(gap, constraint)
    details = {
        "gap_states": len(gap),
        "witness_bound": witness_bound(instance),
        "eventually_periodic": cert is not None,
    }
    if cert is not None:
        verify_certificate(instance, cert.word)
        if len(cert.word) > cert.product_size:
            raise AssertionError("lasso longer than the product")
        details["product_states"] = cert.product_size
        return Verdict(Answer.YES, Reason.LASSO_FOUND, cert.word.canonical(), details)
    if constraint is None and full_coverage(nf):
        return Verdict(Answer.YES, Reason.COVERAGE_GUARANTEE, details=details)
    if nf.Q == 1:
        return Verdict(Answer.NO, Reason.EMPTY_PRODUCT, details=details)
    refuted = refute_gtds(instance, budget_steps)
    if refuted.is_no:
        return Verdict(Answer.NO, Reason.TREE_EXHAUSTED, details={**details, **refuted.details})
    if refuted.details.get("finite"):
        # every solution would be a lasso in this finite graph, and a lasso
        # only visits integral gaps, which the product search covered
        return Verdict(Answer.NO, Reason.EMPTY_PRODUCT, details={**details, "refuter": refuted.details})
    return Verdict(
        Answer.UNKNOWN,
        Reason.NO_EV_PERIODIC_EXISTS,
        details={**details, "refuter": refuted.details},
    )


def refute_gtds(instance: GtdsInstance, budget: int | None = None) -> Verdict:
    """Explore every eligible digit over exact gaps (paired with constraint
    states when a constraint is present).

    If the reachable set is finite and acyclic every branch dies: No, with
    the height of the exploration tree counted in nodes (a root that is
    already out of range gives height 1).  Otherwise Unknown, either when
    ``budget`` nodes have been expanded or when the finite set contains a
    cycle (``details["cyclic"]``).
    """
    if budget is None:
        budget = DEFAULT_REFUTE_BUDGET
    nf, _ = normalize(instance)
    lam = nf.lam.value
    bound = nf.bound
    weights = nf.int_weights
    letters = nf.alphabet.letters
    constraint = instance.constraint_automaton()
    q0 = None if constraint is None else constraint.initial
    root = (nf.first_gap, q0)

    def alive(node) -> bool:
        return 0 <= node[0] <= bound

    def succ(node):
        g, q = node
        out = []
        for a in letters:
            g2 = g / lam - weights[a]
            qs = (None,) if constraint is None else constraint.successors(q, a)
            out.extend((g2, q2) for q2 in qs)
        return out

    graph: dict = {}
    queue = deque([root])
    while queue:
        node = queue.popleft()
        if node in graph:
            continue
        if len(graph) >= budget:
            return Verdict(Answer.UNKNOWN, Reason.BUDGET_EXHAUSTED, details={"expanded": len(graph)})
        kids = succ(node) if alive(node) else []
        graph[node] = kids
        queue.extend(k for k in kids if k not in graph)

    height = _dag_height(graph, root)
    if height is None:
        # a surviving cycle: a periodic branch lives forever
        return Verdict(
            Answer.UNKNOWN,
            Reason.BUDGET_EXHAUSTED,
            details={"expanded": len(graph), "finite": True, "cyclic": True},
        )
    return Verdict(
        Answer.NO,
        Reason.TREE_EXHAUSTED,
        details={"height": height, "expanded": len(graph)},
    )


def _dag_height(graph: dict, root) -> int | None:
    """Longest root path in nodes, or None if the graph has a cycle."""
    memo: dict = {}
    state: dict = {}
    stack = [(root, False)]
    while stack:
        node, done = stack.pop()
        if done:
            state[node] = 2
            memo[node] = 1 + max((memo[k] for k in graph[node]), default=0)
            continue
        if state.get(node) == 2:
            continue
        if state.get(node) == 1:
            return None
        state[node] = 1
        stack.append((node, True))
        for k in graph[node]:
            if state.get(k) == 1:
                return None
            if state.get(k) != 2:
                stack.append((k, False))
    return memo[root]


# -- finite words ---------------------------------------------------------------


def finite_length_bound(instance: GtdsInstance) -> Fraction:
    """Length bound ``4·d·(P−Q)·(|e|+2)·max(|a_k|,|a_1|)·λ·M/(1−λ)``, with the
    target ``c/d`` and the weights scaled to integers by ``M``."""
    scale = math.lcm(*(w.denominator for _, w in instance.alphabet))
    d = (instance.target * scale).denominator
    lam = instance.lam
    top = max(abs(instance.alphabet.max_weight), abs(instance.alphabet.min_weight)) * scale
    size = instance.constraint_size()
    return 4 * d * (lam.P - lam.Q) * (size + 2) * top * lam.value * scale / (1 - lam.value)


def solve_cgtds_f(instance: GtdsInstance, budget_states: int | None = None) -> Verdict:
    """Finite-word solutions: breadth-first search for gap 0 at an accepting
    constraint state.

    Weights are scaled to integers but not shifted (a shift would depend on
    the word length).  Gaps are integer numerators over ``D = d·P`` confined
    to the tail-value range of the weights, so the search space is finite
    and the answer total; the first hit is a shortest witness.
    """
    if not instance.is_finite:
        raise ValueError("solve_cgtds_f expects a finite-word instance")
    scale = math.lcm(*(w.denominator for _, w in instance.alphabet))
    weights = {a: int(w * scale) for a, w in instance.alphabet}
    letters = instance.alphabet.letters
    lam = instance.lam
    P, Q = lam.P, lam.Q
    target = instance.target * scale
    d = target.denominator
    D = d * P
    first = target * lam.value ** (1 - instance.start_exponent) * D
    assert first.denominator == 1
    x0 = int(first)
    ratio = lam.value / (1 - lam.value)
    lo = ratio * min(0, min(weights.values())) * D
    hi = ratio * max(0, max(weights.values())) * D

    nfa = instance.constraint_automaton()
    if nfa is None:
        nfa = compile_regular(".*", letters)
    details = {"length_bound": finite_length_bound(instance)}
    root = (x0, nfa.initial)
    parent = {root: None}
    queue = deque([root])
    hit = None
    while queue:
        node = queue.popleft()
        x, q = node
        if x == 0 and q in nfa.accepting:
            hit = node
            break
        if x % Q:
            continue
        base = P * x // Q
        for a in letters:
            x2 = base - weights[a] * D
            if not lo <= x2 <= hi:
                continue
            for q2 in nfa.successors(q, a):
                nxt = (x2, q2)
                if nxt not in parent:
                    if budget_states is not None and len(parent) >= budget_states:
                        return Verdict(
                            Answer.UNKNOWN,
                            Reason.BUDGET_EXHAUSTED,
                            details={**details, "budget_states": budget_states},
                        )
                    parent[nxt] = (node, a)
                    queue.append(nxt)
    details["product_states"] = len(parent)
    if hit is None:
        return Verdict(Answer.NO, Reason.NO_FINITE_WITNESS, details=details)
    word = []
    node = hit
    while parent[node] is not None:
        node, a = parent[node]
        word.append(a)
    cert = LassoWord(tuple(reversed(word)))
    verify_certificate(instance, cert)
    return Verdict(Answer.YES, Reason.FINITE_WITNESS, cert, details)


def constraint_accepts(aut: Automaton | None, word: LassoWord) -> bool:
    return aut is None or aut.accepts_lasso(word)
