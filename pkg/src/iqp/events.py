"""Finite trajectory spaces, events as bitsets and the event-expression language.

Trajectories over ``m`` labels and ``n`` times are indexed in mixed radix with
time 0 as the most significant digit::

    index = sum over t of label(t) * m**(n - 1 - t)

This encoding is normative: constraint exports, certificates and the CLI all
number trajectories this way.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .system import QuantumSystem, Region, SSet

DEFAULT_TRAJECTORY_CAP = 100_000
CAP_ENV_VAR = "IQP_TRAJECTORY_CAP"


def resolve_trajectory_cap(cap: int | None = None) -> int:
    """Explicit cap if given, else the IQP_TRAJECTORY_CAP env var, else the default."""
    if cap is not None:
        return int(cap)
    raw = os.environ.get(CAP_ENV_VAR)
    if raw is not None:
        try:
            return int(raw)
        except ValueError as exc:
            raise ValueError(f"{CAP_ENV_VAR}={raw!r} is not an integer") from exc
    return DEFAULT_TRAJECTORY_CAP


@dataclass(frozen=True)
class TrajectorySpace:
    """The set of all label sequences over the time grid."""

    m: int
    n: int

    def __post_init__(self) -> None:
        if self.m < 1 or self.n < 1:
            raise ValueError(f"need m >= 1 and n >= 1, got m={self.m}, n={self.n}")
        cap = resolve_trajectory_cap()
        if self.m**self.n > cap:
            raise ValueError(
                f"trajectory count m^n = {self.m ** self.n} exceeds cap {cap}"
            )

    @classmethod
    def for_system(cls, system: QuantumSystem) -> "TrajectorySpace":
        return cls(system.m, system.n)

    @property
    def size(self) -> int:
        return self.m**self.n

    def digits(self, t: int) -> np.ndarray:
        """Label at time t for every trajectory index, vectorized."""
        if not 0 <= t < self.n:
            raise ValueError(f"time index {t} out of range 0..{self.n - 1}")
        return (np.arange(self.size) // self.m ** (self.n - 1 - t)) % self.m

    def index_of(self, trajectory: tuple[int, ...]) -> int:
        if len(trajectory) != self.n:
            raise ValueError(f"trajectory must have {self.n} entries")
        idx = 0
        for x in trajectory:
            if not 0 <= x < self.m:
                raise ValueError(f"label {x} out of range 0..{self.m - 1}")
            idx = idx * self.m + x
        return idx

    def trajectory_of(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.size:
            raise ValueError(f"trajectory index {index} out of range")
        out = []
        for t in range(self.n):
            out.append((index // self.m ** (self.n - 1 - t)) % self.m)
        return tuple(out)


@dataclass(frozen=True)
class Event:
    """A set of trajectories, stored as a boolean membership vector."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        bits = np.asarray(self.bits, dtype=bool)
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    def __len__(self) -> int:
        return int(self.bits.shape[0])

    def _check_same_space(self, other: "Event") -> None:
        if len(other) != len(self):
            raise ValueError(f"event length mismatch: {len(self)} vs {len(other)}")

    def __and__(self, other: "Event") -> "Event":
        self._check_same_space(other)
        return Event(self.bits & other.bits)

    def __or__(self, other: "Event") -> "Event":
        self._check_same_space(other)
        return Event(self.bits | other.bits)

    def __invert__(self) -> "Event":
        return Event(~self.bits)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Event):
            return NotImplemented
        return len(self) == len(other) and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash(self.bits.tobytes())

    @property
    def cardinality(self) -> int:
        return int(np.count_nonzero(self.bits))

    @property
    def is_empty(self) -> bool:
        return self.cardinality == 0

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def contains(self, other: "Event") -> bool:
        self._check_same_space(other)
        return bool(np.all(self.bits | ~other.bits))

    @classmethod
    def none(cls, space: TrajectorySpace) -> "Event":
        return cls(np.zeros(space.size, dtype=bool))

    @classmethod
    def all(cls, space: TrajectorySpace) -> "Event":
        return cls(np.ones(space.size, dtype=bool))


def sset_event(space: TrajectorySpace, s: SSet) -> Event:
    """Trajectories whose label at ``s.time`` lies in ``s.region``."""
    if s.region.m != space.m:
        raise ValueError(f"region defined over {s.region.m} labels, space has {space.m}")
    member = np.array([bool(s.region.mask >> x & 1) for x in range(space.m)])
    return Event(member[space.digits(s.time)])


def combine(a: Event, b: Event | None, op: str) -> Event:
    """Bitwise combination; ``op`` is one of 'and', 'or', 'not' ('not' ignores b)."""
    if op == "not":
        return ~a
    if b is None:
        raise ValueError(f"operator {op!r} needs two events")
    if op == "and":
        return a & b
    if op == "or":
        return a | b
    raise ValueError(f"unknown operator {op!r}")


def event_probability(probs: np.ndarray, a: Event) -> float:
    """Total measure of the event under an explicit probability vector."""
    vec = np.asarray(probs, dtype=float)
    if vec.shape != (len(a),):
        raise ValueError(f"measure has length {vec.shape}, event has {len(a)}")
    return float(vec[a.bits].sum())


# --- event-expression mini-language -------------------------------------
#
# expr  := orexpr
# orexpr := andexpr ('|' andexpr)*
# andexpr := term ('&' term)*
# term  := '!' term | '(' expr ')' | atom
# atom  := '(' 't=' INT ',' '{' INT (',' INT)* '}' ')'
#
# '&' binds tighter than '|'; whitespace is insignificant.


class ParseError(ValueError):
    """Syntax or range error in an event expression, with source position."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class Atom:
    time: int
    labels: tuple[int, ...]

    def text(self) -> str:
        return f"(t={self.time},{{{','.join(str(x) for x in self.labels)}}})"


@dataclass(frozen=True)
class Not:
    child: "EventExpr"

    def text(self) -> str:
        return f"!{self.child.text()}" if isinstance(self.child, Atom) else f"!({self.child.text()})"


@dataclass(frozen=True)
class And:
    left: "EventExpr"
    right: "EventExpr"

    def text(self) -> str:
        return f"({self.left.text()} & {self.right.text()})"


@dataclass(frozen=True)
class Or:
    left: "EventExpr"
    right: "EventExpr"

    def text(self) -> str:
        return f"({self.left.text()} | {self.right.text()})"


EventExpr = Atom | Not | And | Or


def evaluate_expr(expr: EventExpr, space: TrajectorySpace) -> Event:
    if isinstance(expr, Atom):
        region = Region.from_labels(expr.labels, space.m)
        return sset_event(space, SSet(expr.time, region))
    if isinstance(expr, Not):
        return ~evaluate_expr(expr.child, space)
    if isinstance(expr, And):
        return evaluate_expr(expr.left, space) & evaluate_expr(expr.right, space)
    if isinstance(expr, Or):
        return evaluate_expr(expr.left, space) | evaluate_expr(expr.right, space)
    raise TypeError(f"not an event expression: {expr!r}")


class _Parser:
    def __init__(self, src: str, space: TrajectorySpace) -> None:
        self.src = src
        self.space = space
        self.pos = 0

    def _skip_ws(self) -> None:
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip_ws()
        return self.src[self.pos] if self.pos < len(self.src) else ""

    def _expect(self, ch: str) -> None:
        if self._peek() != ch:
            got = self._peek() or "end of input"
            raise ParseError(f"expected {ch!r}, found {got!r}", self.pos)
        self.pos += 1

    def _int(self) -> tuple[int, int]:
        self._skip_ws()
        start = self.pos
        while self.pos < len(self.src) and self.src[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            got = self.src[start] if start < len(self.src) else "end of input"
            raise ParseError(f"expected integer, found {got!r}", start)
        return int(self.src[start : self.pos]), start

    def parse(self) -> EventExpr:
        expr = self._orexpr()
        self._skip_ws()
        if self.pos != len(self.src):
            raise ParseError(f"unexpected trailing input {self.src[self.pos]!r}", self.pos)
        return expr

    def _orexpr(self) -> EventExpr:
        node = self._andexpr()
        while self._peek() == "|":
            self.pos += 1
            node = Or(node, self._andexpr())
        return node

    def _andexpr(self) -> EventExpr:
        node = self._term()
        while self._peek() == "&":
            self.pos += 1
            node = And(node, self._term())
        return node

    def _term(self) -> EventExpr:
        ch = self._peek()
        if ch == "!":
            self.pos += 1
            return Not(self._term())
        if ch == "(":
            # lookahead: '(' 't' '=' starts an atom, anything else a grouped expr
            save = self.pos
            self.pos += 1
            if self._peek() == "t":
                self.pos = save
                return self._atom()
            node = self._orexpr()
            self._expect(")")
            return node
        got = ch or "end of input"
        raise ParseError(f"expected '!', '(' or atom, found {got!r}", self.pos)

    def _atom(self) -> EventExpr:
        self._expect("(")
        self._skip_ws()
        if not self.src.startswith("t", self.pos):
            raise ParseError("expected 't' in atom", self.pos)
        self.pos += 1
        self._expect("=")
        t, t_pos = self._int()
        if not 0 <= t < self.space.n:
            raise ParseError(
                f"time index {t} out of range 0..{self.space.n - 1}", t_pos
            )
        self._expect(",")
        self._expect("{")
        labels = []
        while True:
            x, x_pos = self._int()
            if not 0 <= x < self.space.m:
                raise ParseError(
                    f"label {x} out of range 0..{self.space.m - 1}", x_pos
                )
            labels.append(x)
            if self._peek() == ",":
                self.pos += 1
                continue
            break
        self._expect("}")
        self._expect(")")
        return Atom(t, tuple(sorted(set(labels))))


def parse_expr(src: str, space: TrajectorySpace) -> EventExpr:
    """Parse an event expression into its syntax tree."""
    return _Parser(src, space).parse()


def parse_event(src: str, space: TrajectorySpace) -> Event:
    """Parse an event expression and evaluate it to a trajectory bitset."""
    return evaluate_expr(parse_expr(src, space), space)


def sset_expr_text(s: SSet) -> str:
    """Canonical expression text of an sset, parseable by the grammar."""
    return s.text()
