"""Regular and ω-regular expressions.

Syntax: single-character letters (or ``<name>`` for longer ones),
concatenation, ``+`` for union, postfix ``*``, parentheses, ``.`` for any
letter and ``ε`` for the empty word.  An ω-expression is a ``+``-separated
list of terms ``U(V)^ω`` (``^w`` is accepted for ``^ω``).

Expressions compile through the Glushkov position automaton, which is
ε-free and has one state per letter occurrence plus an initial state.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .automaton import Automaton

_SPECIAL = set("+*().<>")
_OMEGA = ("^ω", "^w")


class RegexError(ValueError):
    pass


def _tokenize(text: str) -> list[tuple[str, object]]:
    tokens: list[tuple[str, object]] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch == "<":
            j = text.find(">", i)
            if j < 0:
                raise RegexError(f"unterminated letter name at column {i}")
            tokens.append(("sym", text[i + 1 : j]))
            i = j + 1
        elif ch in "+*()":
            tokens.append((ch, None))
            i += 1
        elif ch == ".":
            tokens.append(("any", None))
            i += 1
        elif ch == "ε":
            tokens.append(("eps", None))
            i += 1
        elif ch in _SPECIAL or ch == "^":
            raise RegexError(f"unexpected {ch!r} at column {i}")
        else:
            tokens.append(("sym", ch))
            i += 1
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def parse(self):
        node = self.union()
        if self.peek() is not None:
            raise RegexError(f"unexpected token {self.peek()!r} at position {self.pos}")
        return node

    def union(self):
        node = self.concat()
        while self.peek() == "+":
            self.pos += 1
            node = ("alt", node, self.concat())
        return node

    def concat(self):
        parts = []
        while self.peek() not in (None, "+", ")"):
            parts.append(self.star())
        if not parts:
            return ("eps",)
        node = parts[0]
        for p in parts[1:]:
            node = ("cat", node, p)
        return node

    def star(self):
        node = self.atom()
        while self.peek() == "*":
            self.pos += 1
            node = ("star", node)
        return node

    def atom(self):
        kind = self.peek()
        if kind is None:
            raise RegexError("unexpected end of expression")
        tok = self.tokens[self.pos]
        self.pos += 1
        if kind == "sym":
            return ("sym", tok[1])
        if kind == "any":
            return ("any",)
        if kind == "eps":
            return ("eps",)
        if kind == "(":
            node = self.union()
            if self.peek() != ")":
                raise RegexError("missing closing parenthesis")
            self.pos += 1
            return node
        raise RegexError(f"unexpected token {kind!r} at position {self.pos - 1}")


def parse_regex(text: str):
    return _Parser(text).parse()


def regex_length(text: str) -> int:
    """Number of tokens; the size measure used for witness bounds."""
    return max(1, len(_tokenize(text)))


@dataclass
class _Glushkov:
    labels: list  # position -> letter or None (wildcard)
    nullable: bool
    first: set
    last: set
    follow: dict


def _glushkov(ast) -> _Glushkov:
    labels: list = []
    follow: dict = {}

    def go(node):
        kind = node[0]
        if kind == "eps":
            return True, set(), set()
        if kind in ("sym", "any"):
            p = len(labels)
            labels.append(node[1] if kind == "sym" else None)
            follow[p] = set()
            return False, {p}, {p}
        if kind == "alt":
            n1, f1, l1 = go(node[1])
            n2, f2, l2 = go(node[2])
            return n1 or n2, f1 | f2, l1 | l2
        if kind == "cat":
            n1, f1, l1 = go(node[1])
            n2, f2, l2 = go(node[2])
            for p in l1:
                follow[p] |= f2
            return n1 and n2, f1 | (f2 if n1 else set()), l2 | (l1 if n2 else set())
        if kind == "star":
            _, f, l = go(node[1])
            for p in l:
                follow[p] |= f
            return True, f, l
        raise AssertionError(kind)

    nullable, first, last = go(ast)
    return _Glushkov(labels, nullable, first, last, follow)


def _expand(label, alphabet: Sequence) -> list:
    if label is None:
        return list(alphabet)
    if label not in alphabet:
        raise RegexError(f"letter {label!r} is not in the alphabet {list(alphabet)}")
    return [label]


def _nfa_parts(text: str, alphabet: Sequence, tag):
    """Glushkov NFA as (initial, edges, finals, nullable, positions)."""
    g = _glushkov(parse_regex(text))
    init = (tag, "i")
    pos = lambda p: (tag, p)  # noqa: E731
    edges = []
    for p in sorted(g.first):
        for a in _expand(g.labels[p], alphabet):
            edges.append((init, a, pos(p)))
    for p in range(len(g.labels)):
        for p2 in sorted(g.follow[p]):
            for a in _expand(g.labels[p2], alphabet):
                edges.append((pos(p), a, pos(p2)))
    finals = {pos(p) for p in g.last}
    if g.nullable:
        finals.add(init)
    states = [init] + [pos(p) for p in range(len(g.labels))]
    return init, edges, finals, g.nullable, states


def compile_regular(text: str, alphabet: Sequence) -> Automaton:
    """NFA (finite-word semantics) for a regular expression."""
    init, edges, finals, _, states = _nfa_parts(text, alphabet, "r")
    nfa = Automaton.build(states, init, finals, edges, alphabet).trim_finite()
    return nfa.reduce_bisimulation().renumbered("r")


def _pair_parts(prefix: str, period: str, alphabet: Sequence, k: int):
    """Entry state and edges of a Büchi automaton for ``prefix · period^ω``;
    the accepting state is the hub ``("hub", k)``."""
    v_init, v_edges, v_finals, v_nullable, _ = _nfa_parts(period, alphabet, ("v", k))
    if v_nullable:
        raise RegexError(f"period {period!r} accepts the empty word")
    hub = ("hub", k)
    edges = []
    for src, a, dst in v_edges:
        src = hub if src == v_init else src
        edges.append((src, a, dst))
        if dst in v_finals:
            edges.append((src, a, hub))
    hub_out = [(a, dst) for src, a, dst in edges if src == hub]

    u_init, u_edges, u_finals, _, _ = _nfa_parts(prefix, alphabet, ("u", k))
    if not u_edges and u_init in u_finals:
        return hub, edges
    edges = list(u_edges) + edges
    for f in sorted(u_finals, key=str):
        for a, dst in hub_out:
            edges.append((f, a, dst))
    return u_init, edges


@dataclass(frozen=True)
class OmegaRegex:
    """A union of ``U · V^ω`` terms."""

    pairs: tuple

    @classmethod
    def parse(cls, text: str) -> "OmegaRegex":
        return cls(tuple(split_omega(text)))

    @classmethod
    def from_pairs(cls, pairs) -> "OmegaRegex":
        return cls(tuple((str(u), str(v)) for u, v in pairs))

    def size(self) -> int:
        return sum(regex_length(u) + regex_length(v) for u, v in self.pairs) if self.pairs else 1

    def __str__(self) -> str:
        def term(u, v):
            body = v if len(_tokenize(v)) == 1 else f"({v})"
            return f"{u}{body}^ω"

        return " + ".join(term(u, v) for u, v in self.pairs)

    def compile(self, alphabet: Sequence) -> Automaton:
        return compile_omega(self, alphabet)


def _top_level_split(text: str, sep: str) -> list[str]:
    parts, depth, start = [], 0, 0
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "<":
            i = text.index(">", i)
        elif ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == sep and depth == 0:
            parts.append(text[start:i])
            start = i + 1
        i += 1
    parts.append(text[start:])
    return parts


def split_omega(text: str) -> list[tuple[str, str]]:
    """Split ``"U1(V1)^ω + U2 a^ω"`` into ``[("U1", "V1"), ("U2", "a")]``."""
    pairs = []
    for raw in _top_level_split(text, "+"):
        term = raw.strip()
        suffix = next((s for s in _OMEGA if term.endswith(s)), None)
        if suffix is None:
            raise RegexError(f"ω-term {term!r} does not end with ^ω")
        body = term[: -len(suffix)].rstrip()
        if not body:
            raise RegexError(f"ω-term {term!r} has no period")
        if body.endswith(")"):
            depth = 0
            for j in range(len(body) - 1, -1, -1):
                if body[j] == ")":
                    depth += 1
                elif body[j] == "(":
                    depth -= 1
                    if depth == 0:
                        break
            else:
                raise RegexError(f"unbalanced parentheses in {term!r}")
            prefix, period = body[:j], body[j + 1 : -1]
        elif body.endswith(">"):
            j = body.rindex("<")
            prefix, period = body[:j], body[j:]
        else:
            prefix, period = body[:-1], body[-1]
        pairs.append((prefix.strip(), period.strip()))
    return pairs


def compile_omega(c: OmegaRegex, alphabet: Sequence) -> Automaton:
    """Büchi automaton accepting exactly the union of ``U·V^ω``."""
    alphabet = tuple(alphabet)
    if not c.pairs:
        return Automaton.build(["q0"], "q0", [], [], alphabet)
    entries, edges = [], []
    for k, (u, v) in enumerate(c.pairs):
        entry, e = _pair_parts(u, v, alphabet, k)
        entries.append(entry)
        edges.extend(e)
    if len(entries) == 1:
        init = entries[0]
    else:
        init = ("init",)
        for entry in entries:
            edges.extend((init, a, dst) for src, a, dst in list(edges) if src == entry)
    accepting = [("hub", k) for k in range(len(c.pairs))]
    states = [init] + [q for e in edges for q in (e[0], e[2])]
    buchi = Automaton.build(states, init, accepting, edges, alphabet).trim_buchi()
    return buchi.reduce_bisimulation().renumbered("q")
