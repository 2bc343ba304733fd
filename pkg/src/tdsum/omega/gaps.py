"""The gap automaton of a normal-form instance and its product with a
Büchi constraint.

Gaps are integer numerators ``x`` over a fixed denominator ``D``.  Emitting
weight ``m`` from ``x`` is possible only when ``Q`` divides ``x``; the
successor is ``P·x/Q − m·D``.  When ``Q`` does not divide ``x`` the reduced
denominators grow forever along every continuation, so such a gap can
never lie on a cycle; it is kept as a transition-less node.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable

from ..numerics import LassoWord
from ..problem import NormalFormInstance
from .automaton import Automaton


class StateBudgetExceeded(RuntimeError):
    def __init__(self, limit: int):
        super().__init__(f"state budget of {limit} exhausted")
        self.limit = limit


@dataclass(frozen=True)
class GapAutomaton:
    instance: NormalFormInstance
    D: int
    limit: int  # largest admissible numerator, floor(D·bound)
    initial: int
    states: tuple  # reachable in-range numerators, BFS order
    edges: dict  # x -> ((letter, x'), ...) with x' in range
    escapes: dict = field(default_factory=dict)  # x -> ((letter, x'), ...) out of range

    @property
    def P(self) -> int:
        return self.instance.P

    @property
    def Q(self) -> int:
        return self.instance.Q

    @property
    def letters(self) -> tuple:
        return self.instance.alphabet.letters

    @property
    def is_empty(self) -> bool:
        return not self.states

    def __len__(self) -> int:
        return len(self.states)

    def gap(self, x: int) -> Fraction:
        return Fraction(x, self.D)

    def in_range(self, x: int) -> bool:
        return 0 <= x <= self.limit

    def is_recurrent_candidate(self, x: int) -> bool:
        return x % self.Q == 0

    def classify(self, x: int) -> str:
        if not self.in_range(x):
            return "out-of-range"
        return "viable" if self.is_recurrent_candidate(x) else "non-recurrent"

    def successors(self, x: int, letter: Hashable) -> tuple:
        return tuple(t for a, t in self.edges.get(x, ()) if a == letter)

    def all_nodes(self) -> dict:
        """Every numerator the exploration touched, with its class."""
        out = {x: self.classify(x) for x in self.states}
        for moves in self.escapes.values():
            for _, t in moves:
                out[t] = "out-of-range"
        return out

    def pruned(self) -> "GapAutomaton":
        """Drop states with no infinite continuation (iterated dead ends)."""
        alive = set(self.states)
        changed = True
        while changed:
            changed = False
            for x in list(alive):
                if not any(t in alive for _, t in self.edges.get(x, ())):
                    alive.discard(x)
                    changed = True
        edges = {
            x: tuple((a, t) for a, t in self.edges.get(x, ()) if t in alive)
            for x in self.states
            if x in alive
        }
        return GapAutomaton(
            self.instance,
            self.D,
            self.limit,
            self.initial,
            tuple(x for x in self.states if x in alive),
            edges,
            {},
        )

    def as_automaton(self) -> Automaton:
        """Safety automaton: every state accepting."""
        init = self.initial if self.states else "empty"
        edges = [(x, a, t) for x in self.states for a, t in self.edges.get(x, ())]
        return Automaton.build(self.states or (init,), init, self.states, edges, self.letters)


def gap_denominator(nf: NormalFormInstance) -> int:
    return nf.d if nf.start_exponent == 1 else nf.d * nf.P


def build_gap_automaton(nf: NormalFormInstance, budget_states: int | None = None) -> GapAutomaton:
    D = gap_denominator(nf)
    x0 = nf.first_gap * D
    assert x0.denominator == 1
    x0 = int(x0)
    limit = int(nf.bound * D)  # floor: bound ≥ 0
    P, Q = nf.P, nf.Q
    weights = nf.int_weights
    letters = nf.alphabet.letters
    if not 0 <= x0 <= limit:
        return GapAutomaton(nf, D, limit, x0, (), {}, {})
    order = [x0]
    seen = {x0}
    edges: dict = {}
    escapes: dict = {}
    queue = deque(order)
    while queue:
        x = queue.popleft()
        if x % Q:
            continue
        base = P * x // Q
        moves, out = [], []
        for a in letters:
            t = base - weights[a] * D
            if 0 <= t <= limit:
                moves.append((a, t))
                if t not in seen:
                    if budget_states is not None and len(seen) >= budget_states:
                        raise StateBudgetExceeded(budget_states)
                    seen.add(t)
                    order.append(t)
                    queue.append(t)
            else:
                out.append((a, t))
        edges[x] = tuple(moves)
        if out:
            escapes[x] = tuple(out)
    return GapAutomaton(nf, D, limit, x0, tuple(order), edges, escapes)


# -- product and emptiness ------------------------------------------------------


@dataclass(frozen=True)
class LassoCertificate:
    word: LassoWord
    value_check: Fraction
    constraint_check: bool | None  # None when there is no constraint
    product_size: int


def _tarjan(nodes: list, succ) -> dict:
    """Strongly connected component id of each node (iterative Tarjan)."""
    index: dict = {}
    low: dict = {}
    comp: dict = {}
    on_stack: set = set()
    stack: list = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp[w] = v
                    if w == v:
                        break
    return comp


def find_lasso(initial, letters: tuple, succ, accepting) -> tuple[LassoWord | None, int]:
    """Deterministic lasso search on an explicit graph.

    ``succ(node, letter)`` lists successors.  Returns the lasso (or None)
    and the number of reachable nodes; the lasso visits each node at most
    once, so ``|u| + |v|`` is at most that number.
    """
    depth = {initial: 0}
    parent: dict = {initial: None}
    order = [initial]
    queue = deque(order)
    while queue:
        n = queue.popleft()
        for a in letters:
            for m in succ(n, a):
                if m not in depth:
                    depth[m] = depth[n] + 1
                    parent[m] = (n, a)
                    order.append(m)
                    queue.append(m)

    def plain_succ(n):
        return [m for a in letters for m in succ(n, a)]

    comp = _tarjan(order, plain_succ)
    sizes: dict = {}
    for n in order:
        sizes[comp[n]] = sizes.get(comp[n], 0) + 1
    hub = None
    for n in order:
        if not accepting(n):
            continue
        if sizes[comp[n]] > 1 or n in plain_succ(n):
            hub = n
            break
    if hub is None:
        return None, len(order)

    # shortest cycle through the hub, staying inside its component
    back = {}
    queue = deque()
    for a in letters:
        for m in succ(hub, a):
            if comp.get(m) == comp[hub] and m not in back:
                back[m] = (hub, a)
                queue.append(m)
    while hub not in back:
        n = queue.popleft()
        for a in letters:
            for m in succ(n, a):
                if comp.get(m) == comp[hub] and m not in back:
                    back[m] = (n, a)
                    queue.append(m)
    cycle_nodes, cycle_letters = [], []
    n = hub
    while True:
        prev, a = back[n]
        cycle_nodes.append(prev)
        cycle_letters.append(a)
        n = prev
        if n == hub:
            break
    cycle_nodes.reverse()
    cycle_letters.reverse()  # cycle_nodes[i] --cycle_letters[i]--> cycle_nodes[i+1]

    k = min(range(len(cycle_nodes)), key=lambda i: (depth[cycle_nodes[i]], order.index(cycle_nodes[i])))
    entry = cycle_nodes[k]
    period = tuple(cycle_letters[k:] + cycle_letters[:k])
    prefix = []
    n = entry
    while parent[n] is not None:
        n, a = parent[n]
        prefix.append(a)
    prefix.reverse()
    return LassoWord(tuple(prefix), period), len(order)


def product_and_emptiness(gap: GapAutomaton, constraint: Automaton | None) -> LassoCertificate | None:
    """Lasso in the product of the gap automaton and a Büchi constraint
    (all gap states are accepting, so acceptance is the constraint's)."""
    if gap.is_empty:
        return None
    letters = gap.letters
    if constraint is None:
        word, size = find_lasso(gap.initial, letters, gap.successors, lambda n: True)
    else:
        def succ(node, a):
            x, q = node
            return [(x2, q2) for x2 in gap.successors(x, a) for q2 in constraint.successors(q, a)]

        word, size = find_lasso(
            (gap.initial, constraint.initial), letters, succ, lambda n: n[1] in constraint.accepting
        )
    if word is None:
        return None
    nf = gap.instance
    ok = None if constraint is None else constraint.accepts_lasso(word)
    return LassoCertificate(word, nf.value(word), ok, size)
