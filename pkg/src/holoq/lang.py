"""Sentences of the epistemic quantum computational language.

Concrete syntax (ASCII)::

    sentence    := knows | understands | xor
    knows       := "K[" ident "@" ident "]" sentence
    understands := "U[" ident "@" ident "]" sentence
    xor         := conj { "(+)" conj }          # left-associative
    conj        := unary { "/\\" unary }         # left-associative, sugar
    unary       := "not" unary | "sqrtid" unary
                 | "T(" sentence "," sentence "," sentence ")"
                 | "t" | "f" | ident | "(" sentence ")"

``a /\\ b`` never survives parsing: it becomes ``T(a, b, f)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

from .errors import ParseError, UnknownOperator

__all__ = [
    "Atom",
    "FALSE",
    "FalseConst",
    "Knows",
    "Not",
    "OccurrencePath",
    "Sentence",
    "SqrtId",
    "SyntacticalTree",
    "TRUE",
    "Toffoli",
    "TrueConst",
    "Understands",
    "Xor",
    "atomic_complexity",
    "atoms_of",
    "build_syntactical_tree",
    "conj",
    "is_atomic",
    "occurrences_of",
    "parse_sentence",
    "print_sentence",
    "subformulas",
]


class Sentence:
    """Base class for AST nodes.  Subclasses are frozen dataclasses."""

    __slots__ = ()

    @property
    def children(self) -> tuple[Sentence, ...]:
        return ()

    def __str__(self):
        return print_sentence(self)


@dataclass(frozen=True)
class Atom(Sentence):
    name: str


@dataclass(frozen=True)
class TrueConst(Sentence):
    pass


@dataclass(frozen=True)
class FalseConst(Sentence):
    pass


TRUE = TrueConst()
FALSE = FalseConst()


@dataclass(frozen=True)
class Not(Sentence):
    child: Sentence

    @property
    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class SqrtId(Sentence):
    child: Sentence

    @property
    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Toffoli(Sentence):
    first: Sentence
    second: Sentence
    third: Sentence

    @property
    def children(self):
        return (self.first, self.second, self.third)


@dataclass(frozen=True)
class Xor(Sentence):
    left: Sentence
    right: Sentence

    @property
    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Understands(Sentence):
    agent: str
    time: str
    child: Sentence

    @property
    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Knows(Sentence):
    agent: str
    time: str
    child: Sentence

    @property
    def children(self):
        return (self.child,)


EPISTEMIC = (Understands, Knows)


def conj(left: Sentence, right: Sentence) -> Toffoli:
    """Conjunction, which is only ever stored as ``T(left, right, f)``."""
    return Toffoli(left, right, FALSE)


def is_atomic(s: Sentence) -> bool:
    return isinstance(s, (Atom, TrueConst, FalseConst))


@lru_cache(maxsize=4096)
def atomic_complexity(s: Sentence) -> int:
    """Number of atomic occurrences, counting ``t`` and ``f``."""
    if is_atomic(s):
        return 1
    return sum(atomic_complexity(c) for c in s.children)


def atoms_of(s: Sentence) -> tuple[Sentence, ...]:
    """Atomic leaves in left-to-right order."""
    if is_atomic(s):
        return (s,)
    out: tuple[Sentence, ...] = ()
    for c in s.children:
        out += atoms_of(c)
    return out


def subformulas(s: Sentence) -> set[Sentence]:
    out = {s}
    for c in s.children:
        out |= subformulas(c)
    return out


# --------------------------------------------------------------------------
# printing

_KEYWORDS = {"t", "f", "not", "sqrtid"}


def _print_unary(s: Sentence) -> str:
    if isinstance(s, Atom):
        return s.name
    if isinstance(s, TrueConst):
        return "t"
    if isinstance(s, FalseConst):
        return "f"
    if isinstance(s, Not):
        return "not " + _print_unary(s.child)
    if isinstance(s, SqrtId):
        return "sqrtid " + _print_unary(s.child)
    if isinstance(s, Toffoli):
        parts = ", ".join(print_sentence(c) for c in s.children)
        return f"T({parts})"
    return "(" + print_sentence(s) + ")"


def print_sentence(s: Sentence) -> str:
    """Canonical text; ``parse_sentence`` inverts it exactly."""
    if isinstance(s, Knows):
        return f"K[{s.agent}@{s.time}] {print_sentence(s.child)}"
    if isinstance(s, Understands):
        return f"U[{s.agent}@{s.time}] {print_sentence(s.child)}"
    if isinstance(s, Xor):
        left = print_sentence(s.left) if isinstance(s.left, Xor) else _print_unary(s.left)
        return f"{left} (+) {_print_unary(s.right)}"
    return _print_unary(s)


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<xor>\(\+\))
  | (?P<and>/\\)
  | (?P<knows>K\[)
  | (?P<und>U\[)
  | (?P<toff>T\()
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[(),@\]])
    """,
    re.VERBOSE,
)


class _Tok(NamedTuple):
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos))
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if kind in ("punct", "knows", "und", "toff"):
                kind = value
            elif kind == "ident":
                nxt = text[m.end() : m.end() + 1]
                if nxt in ("(", "["):
                    raise UnknownOperator(
                        f"unknown operator {value + nxt!r}",
                        _byte_offset(text, pos),
                        {"T(", "K[", "U["},
                    )
                if value in _KEYWORDS:
                    kind = value
            toks.append(_Tok(kind, value, _byte_offset(text, pos)))
        pos = m.end()
    toks.append(_Tok("eof", "", _byte_offset(text, len(text))))
    return toks


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


_UNARY_START = {"not", "sqrtid", "T(", "t", "f", "identifier", "("}


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, label: str | None = None) -> _Tok:
        if self.tok.kind != kind:
            self.fail({label or kind})
        return self.advance()

    def name(self) -> str:
        # agent and time slots take any identifier spelling, keywords included
        if self.tok.kind not in ("ident",) + tuple(_KEYWORDS):
            self.fail({"identifier"})
        return self.advance().text

    def fail(self, expected):
        found = self.tok.text or "end of input"
        raise ParseError(f"unexpected {found!r}", self.tok.offset, expected)

    def sentence(self) -> Sentence:
        kind = self.tok.kind
        if kind in ("K[", "U["):
            self.advance()
            agent = self.name()
            self.expect("@")
            time = self.name()
            self.expect("]")
            body = self.sentence()
            cls = Knows if kind == "K[" else Understands
            return cls(agent, time, body)
        left = self.conj()
        while self.tok.kind == "xor":
            self.advance()
            left = Xor(left, self.conj())
        return left

    def conj(self) -> Sentence:
        left = self.unary()
        while self.tok.kind == "and":
            self.advance()
            left = conj(left, self.unary())
        return left

    def unary(self) -> Sentence:
        tok = self.tok
        if tok.kind in ("not", "sqrtid"):
            self.advance()
            child = self.unary()
            return Not(child) if tok.kind == "not" else SqrtId(child)
        if tok.kind == "T(":
            self.advance()
            a = self.sentence()
            self.expect(",")
            b = self.sentence()
            self.expect(",")
            c = self.sentence()
            self.expect(")")
            return Toffoli(a, b, c)
        if tok.kind == "t":
            self.advance()
            return TRUE
        if tok.kind == "f":
            self.advance()
            return FALSE
        if tok.kind == "ident":
            self.advance()
            return Atom(tok.text)
        if tok.kind == "(":
            self.advance()
            inner = self.sentence()
            self.expect(")")
            return inner
        if tok.kind in ("K[", "U["):
            # an epistemic prefix scopes over a whole sentence, so in operand
            # position it must be parenthesized
            raise ParseError(
                f"epistemic prefix {tok.text!r} needs parentheses here",
                tok.offset,
                _UNARY_START,
            )
        self.fail(_UNARY_START)


def parse_sentence(text: str) -> Sentence:
    p = _Parser(text)
    s = p.sentence()
    if p.tok.kind != "eof":
        p.fail({"(+)", "/\\", "end of input"})
    return s


# --------------------------------------------------------------------------
# syntactical trees


class OccurrencePath(NamedTuple):
    """1-based (level, position) address of an occurrence in a tree."""

    level: int
    position: int


@dataclass(frozen=True)
class SyntacticalTree:
    """Levels of a sentence from itself (level 1) up to its atomic occurrences.

    ``levels[i]`` is level ``i + 1``.  ``spans[i][j]`` is the half-open
    0-based qubit range of occurrence ``(i + 1, j + 1)`` and
    ``children[i][j]`` the 0-based positions, at the next level, of the
    occurrence's immediate parts (an atom's child is its own repetition).
    """

    sentence: Sentence
    levels: tuple[tuple[Sentence, ...], ...]
    spans: tuple[tuple[tuple[int, int], ...], ...]
    children: tuple[tuple[tuple[int, ...], ...], ...]

    @property
    def height(self) -> int:
        return len(self.levels)

    @property
    def n_qubits(self) -> int:
        return atomic_complexity(self.sentence)

    def level(self, i: int) -> tuple[Sentence, ...]:
        return self.levels[i - 1]

    def check_path(self, path) -> OccurrencePath:
        i, j = path
        if not (1 <= i <= self.height and 1 <= j <= len(self.levels[i - 1])):
            raise IndexError(f"no occurrence at level {i}, position {j}")
        return OccurrencePath(i, j)

    def occupant(self, path) -> Sentence:
        i, j = self.check_path(path)
        return self.levels[i - 1][j - 1]

    def span(self, path) -> tuple[int, int]:
        i, j = self.check_path(path)
        return self.spans[i - 1][j - 1]

    def child_paths(self, path) -> list[OccurrencePath]:
        i, j = self.check_path(path)
        if i == self.height:
            return []
        return [OccurrencePath(i + 1, k + 1) for k in self.children[i - 1][j - 1]]

    def paths(self):
        for i, level in enumerate(self.levels, start=1):
            for j in range(1, len(level) + 1):
                yield OccurrencePath(i, j)


def _parts(s: Sentence) -> tuple[Sentence, ...]:
    return (s,) if is_atomic(s) else s.children


def _spans_for(level) -> tuple[tuple[int, int], ...]:
    out = []
    start = 0
    for s in level:
        width = atomic_complexity(s)
        out.append((start, start + width))
        start += width
    return tuple(out)


def build_syntactical_tree(s: Sentence) -> SyntacticalTree:
    levels = [(s,)]
    children = []
    while not all(is_atomic(b) for b in levels[-1]):
        nxt: list[Sentence] = []
        links = []
        for b in levels[-1]:
            parts = _parts(b)
            links.append(tuple(range(len(nxt), len(nxt) + len(parts))))
            nxt.extend(parts)
        children.append(tuple(links))
        levels.append(tuple(nxt))
    children.append(tuple(() for _ in levels[-1]))
    return SyntacticalTree(
        sentence=s,
        levels=tuple(levels),
        spans=tuple(_spans_for(level) for level in levels),
        children=tuple(children),
    )


def occurrences_of(tree: SyntacticalTree, sub: Sentence) -> list[OccurrencePath]:
    """All positions whose occupant structurally equals ``sub``, bottom level last."""
    found = []
    for i in range(tree.height, 0, -1):
        for j, b in enumerate(tree.levels[i - 1], start=1):
            if b == sub:
                found.append(OccurrencePath(i, j))
    return found
