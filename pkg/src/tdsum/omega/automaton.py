"""Explicit nondeterministic automata over finite or infinite words.

The same structure serves as an NFA (finite-word acceptance: the run ends
in ``accepting``) and as a Büchi automaton (the run visits ``accepting``
infinitely often); the caller picks the semantics.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping

from ..numerics import LassoWord

State = Hashable
Letter = Hashable


@dataclass(frozen=True, eq=False)
class Automaton:
    states: tuple
    initial: State
    accepting: frozenset
    transitions: Mapping[State, Mapping[Letter, tuple]]
    alphabet: tuple = ()

    @classmethod
    def build(
        cls,
        states: Iterable[State],
        initial: State,
        accepting: Iterable[State],
        edges: Iterable[tuple[State, Letter, State]],
        alphabet: Iterable[Letter] = (),
    ) -> "Automaton":
        states = list(dict.fromkeys(states))
        if initial not in states:
            states.insert(0, initial)
        table: dict = {q: {} for q in states}
        letters = list(dict.fromkeys(alphabet))
        for src, letter, dst in edges:
            for q in (src, dst):
                if q not in table:
                    table[q] = {}
                    states.append(q)
            row = table[src].setdefault(letter, [])
            if dst not in row:
                row.append(dst)
            if letter not in letters:
                letters.append(letter)
        frozen = {q: {a: tuple(ts) for a, ts in row.items()} for q, row in table.items()}
        acc = frozenset(q for q in accepting if q in table)
        return cls(tuple(states), initial, acc, frozen, tuple(letters))

    def __len__(self) -> int:
        return len(self.states)

    def successors(self, q: State, letter: Letter) -> tuple:
        return self.transitions.get(q, {}).get(letter, ())

    def edges(self):
        for q in self.states:
            for letter, targets in self.transitions.get(q, {}).items():
                for t in targets:
                    yield q, letter, t

    def step_set(self, current: Iterable[State], letter: Letter) -> frozenset:
        out = set()
        for q in current:
            out.update(self.successors(q, letter))
        return frozenset(out)

    def read(self, word: Iterable[Letter], start: Iterable[State] | None = None) -> frozenset:
        current = frozenset([self.initial]) if start is None else frozenset(start)
        for letter in word:
            current = self.step_set(current, letter)
            if not current:
                break
        return current

    def accepts_finite(self, word: Iterable[Letter]) -> bool:
        return bool(self.read(word) & self.accepting)

    def accepts_lasso(self, w: LassoWord) -> bool:
        """Büchi membership of ``u v^ω`` (finite words use NFA acceptance).

        Runs over the graph of (state, offset-in-period) pairs and looks for
        a reachable accepting node that lies on a cycle.
        """
        if w.is_finite:
            return self.accepts_finite(w.prefix)
        start = self.read(w.prefix)
        v = w.period
        n = len(v)

        def succ(node):
            q, i = node
            return [(t, (i + 1) % n) for t in self.successors(q, v[i])]

        reach = set()
        queue = deque((q, 0) for q in start)
        reach.update(queue)
        while queue:
            node = queue.popleft()
            for nxt in succ(node):
                if nxt not in reach:
                    reach.add(nxt)
                    queue.append(nxt)
        for node in reach:
            if node[0] not in self.accepting:
                continue
            seen = set()
            queue = deque(succ(node))
            while queue:
                cur = queue.popleft()
                if cur == node:
                    return True
                if cur in seen:
                    continue
                seen.add(cur)
                queue.extend(succ(cur))
        return False

    # structural clean-up -------------------------------------------------

    def reachable(self) -> list:
        order = [self.initial]
        seen = {self.initial}
        queue = deque(order)
        while queue:
            q = queue.popleft()
            for letter in self.alphabet:
                for t in self.successors(q, letter):
                    if t not in seen:
                        seen.add(t)
                        order.append(t)
                        queue.append(t)
        return order

    def _restrict(self, keep: Iterable[State]) -> "Automaton":
        keep = set(keep) | {self.initial}
        order = [q for q in self.reachable() if q in keep]
        edges = [(q, a, t) for q, a, t in self.edges() if q in keep and t in keep]
        return Automaton.build(order, self.initial, self.accepting & keep, edges, self.alphabet)

    def _co_reachable(self, targets: set) -> set:
        back: dict = {}
        for q, _, t in self.edges():
            back.setdefault(t, set()).add(q)
        good = set(targets)
        queue = deque(good)
        while queue:
            q = queue.popleft()
            for p in back.get(q, ()):
                if p not in good:
                    good.add(p)
                    queue.append(p)
        return good

    def trim_finite(self) -> "Automaton":
        live = set(self.reachable()) & self._co_reachable(set(self.accepting))
        return self._restrict(live)

    def trim_buchi(self) -> "Automaton":
        """Keep only states from which some accepting lasso is reachable."""
        reach = set(self.reachable())
        recurrent = set()
        for a in self.accepting & reach:
            seen = set()
            queue = deque(t for _, _, t in self._out(a))
            while queue:
                q = queue.popleft()
                if q == a:
                    recurrent.add(a)
                    break
                if q in seen:
                    continue
                seen.add(q)
                queue.extend(t for _, _, t in self._out(q))
        return self._restrict(reach & self._co_reachable(recurrent))

    def _out(self, q):
        for letter, targets in self.transitions.get(q, {}).items():
            for t in targets:
                yield q, letter, t

    def reduce_bisimulation(self) -> "Automaton":
        """Quotient by forward bisimulation; preserves both finite and Büchi
        languages since blocks never mix accepting and rejecting states."""
        states = self.reachable()
        block = {q: int(q in self.accepting) for q in states}
        while True:
            sigs: dict = {}
            new_block = {}
            for q in states:
                sig = (
                    block[q],
                    frozenset(
                        (a, block[t])
                        for a, ts in self.transitions.get(q, {}).items()
                        for t in ts
                    ),
                )
                new_block[q] = sigs.setdefault(sig, len(sigs))
            if len(sigs) == len(set(block.values())):
                break
            block = new_block
        block = new_block
        rep: dict = {}
        for q in states:
            rep.setdefault(block[q], q)
        edges = {(rep[block[q]], a, rep[block[t]]) for q, a, t in self.edges() if q in block}
        ordered = sorted(edges, key=lambda e: (states.index(e[0]), self.alphabet.index(e[1]), states.index(e[2])))
        acc = {rep[block[q]] for q in self.accepting if q in block}
        return Automaton.build(
            [rep[b] for b in dict.fromkeys(block[q] for q in states)],
            rep[block[self.initial]],
            acc,
            ordered,
            self.alphabet,
        )

    def renumbered(self, prefix: str = "q") -> "Automaton":
        order = self.reachable()
        order += [q for q in self.states if q not in order]
        names = {q: f"{prefix}{i}" for i, q in enumerate(order)}
        return Automaton.build(
            [names[q] for q in order],
            names[self.initial],
            [names[q] for q in self.accepting],
            [(names[q], a, names[t]) for q, a, t in self.edges()],
            self.alphabet,
        )

    def with_alphabet(self, alphabet: Iterable[Letter]) -> "Automaton":
        alphabet = tuple(alphabet)
        stray = [a for a in self.alphabet if a not in alphabet]
        if stray:
            raise ValueError(f"automaton uses letters outside the alphabet: {stray}")
        return Automaton(self.states, self.initial, self.accepting, self.transitions, alphabet)

    def to_json(self) -> dict:
        return {
            "states": [str(q) for q in self.states],
            "initial": str(self.initial),
            "accepting": [str(q) for q in self.states if q in self.accepting],
            "transitions": [
                {"from": str(q), "letter": str(a), "to": str(t)} for q, a, t in self.edges()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Automaton":
        try:
            edges = [(t["from"], t["letter"], t["to"]) for t in data.get("transitions", [])]
            return cls.build(data["states"], data["initial"], data.get("accepting", []), edges)
        except KeyError as exc:
            raise ValueError(f"automaton JSON is missing field {exc}") from None


BuchiAutomaton = Automaton
