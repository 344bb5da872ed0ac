"""Turing machines: representation, numbering, text format and exact simulation.

Machines are total transition tables over ``n_states`` states and
``n_symbols`` symbols (symbol 0 is blank).  Every entry is either a step
``(write, move, next)`` or a halt ``(write, move)``; a halt entry writes,
moves and counts as one step.

Codes are class-blocked: classes are ordered by ``n_states + n_symbols`` and
then by descending ``n_states``, so ``(1,2)`` precedes ``(2,2)`` precedes
``(1,3)`` precedes ``(3,2)``.  Inside a class the table is read as a
mixed-radix number, entry ``(A,0)`` most significant.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterator, NamedTuple

import numpy as np

LEFT = -1
RIGHT = 1
HALT = -1

_LETTERS = "ABCDEFGHIJKLMNOPQRSTUVWXY"


class Transition(NamedTuple):
    write: int
    move: int  # LEFT or RIGHT
    next: int  # HALT or a state index

    @property
    def halts(self) -> bool:
        return self.next == HALT

    def to_string(self) -> str:
        nxt = "Z" if self.next == HALT else _LETTERS[self.next]
        return f"{self.write}{'R' if self.move == RIGHT else 'L'}{nxt}"


@dataclass(frozen=True)
class Machine:
    n_states: int
    n_symbols: int
    table: tuple[Transition, ...]

    def __post_init__(self) -> None:
        if self.n_states < 1 or self.n_states > len(_LETTERS):
            raise ValueError(f"n_states must be in 1..{len(_LETTERS)}")
        if self.n_symbols < 2 or self.n_symbols > 10:
            raise ValueError("n_symbols must be in 2..10")
        if len(self.table) != self.n_states * self.n_symbols:
            raise ValueError("table must have one entry per (state, symbol)")
        for t in self.table:
            if not 0 <= t.write < self.n_symbols:
                raise ValueError(f"written symbol out of range: {t}")
            if t.move not in (LEFT, RIGHT):
                raise ValueError(f"bad move: {t}")
            if t.next != HALT and not 0 <= t.next < self.n_states:
                raise ValueError(f"next state out of range: {t}")

    def transition(self, state: int, symbol: int) -> Transition:
        return self.table[state * self.n_symbols + symbol]

    @cached_property
    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(write, move, next) as int64 arrays indexed by ``state*n_symbols+symbol``."""
        write = np.array([t.write for t in self.table], dtype=np.int64)
        move = np.array([t.move for t in self.table], dtype=np.int64)
        nxt = np.array([t.next for t in self.table], dtype=np.int64)
        return write, move, nxt

    def __str__(self) -> str:
        return format_machine(self)

    @classmethod
    def from_string(cls, text: str) -> Machine:
        return parse_machine(text)


# -- text format -------------------------------------------------------------


def format_machine(m: Machine) -> str:
    rows = []
    for q in range(m.n_states):
        row = m.table[q * m.n_symbols:(q + 1) * m.n_symbols]
        rows.append("".join(t.to_string() for t in row))
    return "_".join(rows)


def parse_machine(text: str) -> Machine:
    """Parse the ``1RB1LB_1LA1RZ`` format; ``Z`` is the halt target."""
    rows = text.strip().split("_")
    n_states = len(rows)
    if not rows[0] or len(rows[0]) % 3:
        raise ValueError(f"malformed machine text: {text!r}")
    n_symbols = len(rows[0]) // 3
    table = []
    for row in rows:
        if len(row) != 3 * n_symbols:
            raise ValueError(f"ragged machine text: {text!r}")
        for k in range(0, len(row), 3):
            w, d, s = row[k], row[k + 1], row[k + 2]
            if not w.isdigit() or d not in "LR":
                raise ValueError(f"bad transition {row[k:k + 3]!r}")
            if s == "Z":
                nxt = HALT
            elif s in _LETTERS:
                nxt = _LETTERS.index(s)
            else:
                raise ValueError(f"bad target state {s!r}")
            table.append(Transition(int(w), RIGHT if d == "R" else LEFT, nxt))
    return Machine(n_states, n_symbols, tuple(table))


# -- numbering ---------------------------------------------------------------


def transitions_per_entry(n_states: int, n_symbols: int) -> int:
    return 2 * n_symbols * (n_states + 1)


def class_size(n_states: int, n_symbols: int) -> int:
    return transitions_per_entry(n_states, n_symbols) ** (n_states * n_symbols)


def iter_classes() -> Iterator[tuple[int, int]]:
    """All (n_states, n_symbols) classes in numbering order (infinite)."""
    total = 3
    while True:
        for n in range(total - 2, 0, -1):
            yield n, total - n
        total += 1


@lru_cache(maxsize=None)
def class_offset(n_states: int, n_symbols: int) -> int:
    """Code of the first machine of the class."""
    offset = 0
    for cls in iter_classes():
        if cls == (n_states, n_symbols):
            return offset
        offset += class_size(*cls)


def class_range(n_states: int, n_symbols: int) -> range:
    start = class_offset(n_states, n_symbols)
    return range(start, start + class_size(n_states, n_symbols))


def _digit(t: Transition, n_states: int) -> int:
    nxt = n_states if t.next == HALT else t.next
    return (t.write * 2 + (t.move == RIGHT)) * (n_states + 1) + nxt


def _undigit(d: int, n_states: int) -> Transition:
    rest, nxt = divmod(d, n_states + 1)
    write, right = divmod(rest, 2)
    return Transition(write, RIGHT if right else LEFT, HALT if nxt == n_states else nxt)


def encode_machine(m: Machine) -> int:
    base = transitions_per_entry(m.n_states, m.n_symbols)
    local = 0
    for t in m.table:
        local = local * base + _digit(t, m.n_states)
    return class_offset(m.n_states, m.n_symbols) + local


def decode_machine(code: int) -> Machine:
    if code < 0:
        raise ValueError("machine codes are naturals")
    for n, k in iter_classes():
        size = class_size(n, k)
        if code < size:
            break
        code -= size
    base = transitions_per_entry(n, k)
    digits = []
    for _ in range(n * k):
        code, d = divmod(code, base)
        digits.append(d)
    return Machine(n, k, tuple(_undigit(d, n) for d in reversed(digits)))


# -- simulation --------------------------------------------------------------


@dataclass(frozen=True)
class Configuration:
    tape: dict[int, int] = field(default_factory=dict)
    head: int = 0
    state: int = 0
    steps_taken: int = 0

    @classmethod
    def initial(cls, input: int = 0) -> Configuration:
        """Blank tape with ``input`` ones right of the head."""
        return cls({pos: 1 for pos in range(1, input + 1)})

    def score(self) -> int:
        return sum(1 for s in self.tape.values() if s)

    def symbol(self) -> int:
        return self.tape.get(self.head, 0)


@dataclass(frozen=True)
class HaltedAt:
    config: Configuration


def step(m: Machine, c: Configuration) -> Configuration | HaltedAt:
    t = m.transition(c.state, c.tape.get(c.head, 0))
    tape = dict(c.tape)
    if t.write:
        tape[c.head] = t.write
    else:
        tape.pop(c.head, None)
    nxt = Configuration(tape, c.head + t.move, c.state if t.halts else t.next,
                        c.steps_taken + 1)
    return HaltedAt(nxt) if t.halts else nxt


@dataclass(frozen=True)
class Halted:
    steps: int
    score: int
    output: int


@dataclass(frozen=True)
class FuelExhausted:
    steps: int


@dataclass(frozen=True)
class NonHalting:
    certificate: object


SimOutcome = Halted | FuelExhausted | NonHalting


def run(m: Machine, input: int = 0, fuel: int = 1000) -> Halted | FuelExhausted:
    """Run ``m`` on ``input`` for at most ``fuel`` steps.

    The output convention is the Rado score: the number of non-blank cells
    left on the tape at halt.
    """
    if fuel < 1:
        raise ValueError("fuel must be >= 1")
    tape = {pos: 1 for pos in range(1, input + 1)}
    head, state = 0, 0
    table, k = m.table, m.n_symbols
    for steps in range(1, fuel + 1):
        write, move, nxt = table[state * k + tape.get(head, 0)]
        if write:
            tape[head] = write
        else:
            tape.pop(head, None)
        head += move
        if nxt == HALT:
            return Halted(steps, len(tape), len(tape))
        state = nxt
    return FuelExhausted(fuel)
