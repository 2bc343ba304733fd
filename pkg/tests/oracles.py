"""Brute-force reference procedures used to cross-check the solvers.

None of these touch the gap automaton, the product search or policy
iteration; they recompute values from the definitions.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

from tdsum.numerics import LassoWord, lasso_value


def dfs_lasso_oracle(instance, depth: int):
    """First lasso ``u v^ω`` solving ``instance`` with ``|u|+|v| ≤ depth``.

    Walks prefixes whose exact remainders stay within the range of tail
    values (anything else cannot be a prefix of a solution) and proposes
    ``u = x[:j], v = x[j:]`` whenever the remainders after ``x[:j]`` and
    ``x`` coincide.  Candidates are confirmed by direct evaluation and by
    the constraint automaton.
    """
    lam = instance.lam.value
    weights = instance.alphabet.weights
    least = min(weights.values())
    most = max(weights.values())
    letters = instance.alphabet.letters
    aut = instance.constraint_automaton()
    # remainder r_n = (t - value of the first n letters) / λ^(n + s):
    # the value of the tail read from λ^0
    r0 = instance.target / lam**instance.start_exponent
    lo, hi = least / (1 - lam), most / (1 - lam)

    stack = [((), (r0,))]
    while stack:
        word, rems = stack.pop()
        r = rems[-1]
        for j in range(len(word)):
            if rems[j] == r:
                w = LassoWord(word[:j], word[j:])
                if instance.value(w) == instance.target and (aut is None or aut.accepts_lasso(w)):
                    return w
        if len(word) == depth:
            continue
        for a in reversed(letters):
            r2 = (r - weights[a]) / lam
            if lo <= r2 <= hi:
                stack.append((word + (a,), rems + (r2,)))
    return None


def words_upto(letters, n: int):
    for k in range(n + 1):
        yield from itertools.product(letters, repeat=k)


def shortest_values(word_value, letters, n: int) -> dict:
    """Value -> length of the shortest accepted word with that value."""
    out: dict = {}
    for w in words_upto(letters, n):
        v = word_value(w)
        if v is not None and v not in out:
            out[v] = len(w)
    return out


def brute_lassos(letters, n: int):
    """All lassos with ``1 ≤ |v|`` and ``|u|+|v| ≤ n``."""
    for total in range(1, n + 1):
        for k in range(1, total + 1):
            for u in itertools.product(letters, repeat=total - k):
                for v in itertools.product(letters, repeat=k):
                    yield LassoWord(u, v)


def tds01_value(word: LassoWord, lam) -> Fraction:
    return lasso_value(word, {"0": 0, "1": 1}, lam, 1)


class Inconclusive(Exception):
    pass


def remainder_lasso_oracle(instance, limit: int = 20_000):
    """Some lasso solving ``instance``, or None, by a naive graph search.

    Nodes are (exact tail remainder, constraint state).  Every pair of
    reachable accepting node and path back to itself is tried in order;
    the first closed loop yields ``u v^ω``, which is then re-evaluated.
    Raises Inconclusive when more than ``limit`` nodes are reachable (the
    remainder graph need not be finite).
    """
    lam = instance.lam.value
    weights = instance.alphabet.weights
    lo = min(weights.values()) / (1 - lam)
    hi = max(weights.values()) / (1 - lam)
    letters = instance.alphabet.letters
    aut = instance.constraint_automaton()
    r0 = instance.target / lam**instance.start_exponent
    if not lo <= r0 <= hi:
        return None

    def succ(node):
        r, q = node
        for a in letters:
            r2 = (r - weights[a]) / lam
            if not lo <= r2 <= hi:
                continue
            targets = [None] if aut is None else aut.successors(q, a)
            for q2 in targets:
                yield a, (r2, q2)

    def accepting(node):
        return aut is None or node[1] in aut.accepting

    def paths_from(src):
        # shortest letter path from src to every node it reaches
        out = {src: ()}
        frontier = [src]
        while frontier:
            nxt = []
            for n in frontier:
                for a, m in succ(n):
                    if m not in out:
                        if len(out) >= limit:
                            raise Inconclusive(limit)
                        out[m] = out[n] + (a,)
                        nxt.append(m)
            frontier = nxt
        return out

    start = (r0, None if aut is None else aut.initial)
    stems = paths_from(start)
    for node, stem in stems.items():
        if not accepting(node):
            continue
        for a, m in succ(node):
            back = paths_from(m).get(node)
            if back is not None:
                w = LassoWord(stem, (a,) + back)
                assert instance.value(w) == instance.target
                assert aut is None or aut.accepts_lasso(w)
                return w
    return None
