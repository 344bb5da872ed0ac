"""Non-halting deciders and their certificates.

Deciders run compiled loop detection; :func:`check_certificate` re-derives the
claim with a separate plain-Python replay, so a decider bug shows up as a
rejected certificate rather than a wrong classification.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from . import _accel
from .tm import HALT, RIGHT, Machine, Transition


@dataclass(frozen=True)
class Cycler:
    """The configuration at ``start_step + period`` equals the one at ``start_step``."""

    start_step: int
    period: int

    def to_dict(self) -> dict:
        return {"kind": "cycler", "start_step": self.start_step, "period": self.period}


@dataclass(frozen=True)
class TranslatedCycler:
    """Recurrence at a tape edge, up to a translation of the tape by ``shift``."""

    start_step: int
    period: int
    shift: int

    def to_dict(self) -> dict:
        return {"kind": "translated_cycler", "start_step": self.start_step,
                "period": self.period, "shift": self.shift}


@dataclass(frozen=True)
class BackwardReasoning:
    """No halting run lasts longer than ``depth`` steps, and none that short exists.

    Reasoning backwards from every halting transition of a reachable state,
    each chain of predecessor configurations becomes contradictory within
    ``depth`` steps.
    """

    depth: int

    def to_dict(self) -> dict:
        return {"kind": "backward_reasoning", "depth": self.depth}


@dataclass(frozen=True)
class NGramCPS:
    """A closed set of head-local configurations with ``radius`` cells per side
    contains the initial one and no halting one."""

    radius: int

    def to_dict(self) -> dict:
        return {"kind": "ngram_cps", "radius": self.radius}


@dataclass(frozen=True)
class ClosedTapeLanguage:
    """Two DFAs reading each half tape from its blank end towards the head.

    The tuples (left DFA state, machine state, head symbol, right DFA state)
    reachable from the initial configuration form a closed set containing no
    halting entry.  Transitions are flat tuples: ``dfa[q * n_symbols + s]``.
    """

    left: tuple[int, ...]
    right: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"kind": "ctl", "left": list(self.left), "right": list(self.right)}


@dataclass(frozen=True)
class PushdownClosure:
    """A DFA reads the tape left of the head from its blank end; the tape right
    of the head is kept exactly, as the stack of a pushdown system whose
    control is (DFA state, machine state).  The saturated set of reachable
    stacks contains no halting entry.  ``mirrored`` applies the argument to
    the machine with left and right exchanged.
    """

    left: tuple[int, ...]
    mirrored: bool = False

    def to_dict(self) -> dict:
        return {"kind": "pushdown", "left": list(self.left), "mirrored": self.mirrored}


Certificate = Union[Cycler, TranslatedCycler, BackwardReasoning, NGramCPS,
                    ClosedTapeLanguage, PushdownClosure]


def certificate_from_dict(d: dict) -> Certificate:
    if d["kind"] == "cycler":
        return Cycler(d["start_step"], d["period"])
    if d["kind"] == "translated_cycler":
        return TranslatedCycler(d["start_step"], d["period"], d["shift"])
    if d["kind"] == "backward_reasoning":
        return BackwardReasoning(d["depth"])
    if d["kind"] == "ngram_cps":
        return NGramCPS(d["radius"])
    if d["kind"] == "ctl":
        return ClosedTapeLanguage(tuple(d["left"]), tuple(d["right"]))
    if d["kind"] == "pushdown":
        return PushdownClosure(tuple(d["left"]), bool(d["mirrored"]))
    raise ValueError(f"unknown certificate kind {d['kind']!r}")


def decide_cycler(m: Machine, fuel: int, input: int = 0) -> Cycler | None:
    if fuel < 1:
        raise ValueError("fuel must be >= 1")
    found, start, period = _accel.find_cycler(*m.arrays, m.n_symbols, input, fuel)
    return Cycler(int(start), int(period)) if found else None


def decide_translated_cycler(m: Machine, fuel: int, input: int = 0) -> TranslatedCycler | None:
    if fuel < 1:
        raise ValueError("fuel must be >= 1")
    found, start, period, shift = _accel.find_translated_cycler(
        *m.arrays, m.n_symbols, input, fuel)
    return TranslatedCycler(int(start), int(period), int(shift)) if found else None


def reachable_states(m: Machine) -> set[int]:
    seen, todo = {0}, [0]
    while todo:
        p = todo.pop()
        for s in range(m.n_symbols):
            q = m.transition(p, s).next
            if q != HALT and q not in seen:
                seen.add(q)
                todo.append(q)
    return seen


def _halts_within(m: Machine, steps: int, input: int) -> bool:
    sim = _Replay(m, input)
    return not all(sim.advance() for _ in range(steps))


def decide_backward_reasoning(m: Machine, fuel: int, input: int = 0,
                              max_depth: int = 40,
                              max_width: int = 2_000) -> BackwardReasoning | None:
    """Depth-first backward search from the halting transitions.

    Gives up (returns None) on chains longer than ``max_depth``, more than
    ``max_width`` live constraints, or a depth exceeding ``fuel``.
    """
    states = reachable_states(m)
    preds: dict[int, list[tuple[int, int, int, int]]] = {q: [] for q in states}
    for p in states:
        for r in range(m.n_symbols):
            t = m.transition(p, r)
            if t.next != HALT:
                preds[t.next].append((p, r, t.write, t.move))

    # (state, head, tape items, depth); the tape maps offsets to known symbols
    stack = [(q, 0, ((0, s),), 0) for q in sorted(states) for s in range(m.n_symbols)
             if m.transition(q, s).halts]
    deepest, visited = 0, 0
    while stack:
        state, head, tape, depth = stack.pop()
        deepest = max(deepest, depth)
        visited += 1
        if depth >= max_depth or visited > max_width:
            return None
        known = dict(tape)
        for p, r, w, mv in preds[state]:
            prev = head - mv
            if known.get(prev, w) != w:
                continue
            earlier = dict(known)
            earlier[prev] = r
            stack.append((p, prev, tuple(sorted(earlier.items())), depth + 1))
    depth = deepest + 1
    if depth > fuel or _halts_within(m, depth, input):
        return None
    return BackwardReasoning(depth)


def _right_ngrams(input: int, n: int) -> set[tuple[int, ...]]:
    cells = [1] * input + [0] * n
    return {tuple(cells[i:i + n]) for i in range(input + 1)}


def _initial_position(input: int, n: int):
    right = tuple(1 if i < input else 0 for i in range(n))
    return (0, (0,) * n, 0, right)


def _ngram_closure(m: Machine, n: int, input: int, limit: int) -> bool | None:
    """True if the closure avoids every halting entry, False if it meets one,
    None if it outgrows ``limit`` positions."""
    # a position is (state, left window, head symbol, right window); windows
    # list cells from the head outwards
    grams = ({(0,) * n}, _right_ngrams(input, n))  # left, right
    waiting: tuple[dict, dict] = ({}, {})  # prefix -> positions popping that side
    start = _initial_position(input, n)
    seen = {start}
    todo = [start]
    while todo:
        pos = todo.pop()
        state, left, sym, right = pos
        t = m.transition(state, sym)
        if t.halts:
            return False
        side = 0 if t.move == RIGHT else 1  # side receiving the written cell
        near = (left, right)
        pushed = (t.write,) + near[side][:-1]
        far = near[1 - side]
        if pushed not in grams[side]:
            grams[side].add(pushed)
            todo.extend(waiting[side].get(pushed[:-1], ()))  # revisit with the new gram
        prefix = far[1:]
        waiting[1 - side].setdefault(prefix, set()).add(pos)
        for gram in [g for g in grams[1 - side] if g[:-1] == prefix]:
            if side == 0:
                nxt = (t.next, pushed, far[0], gram)
            else:
                nxt = (t.next, gram, far[0], pushed)
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
                if len(seen) > limit:
                    return None
    return True


def decide_ngram_cps(m: Machine, fuel: int, input: int = 0, max_radius: int = 4,
                     limit: int = 20_000) -> NGramCPS | None:
    """Try closed position sets of radius 1..``max_radius``."""
    for n in range(1, max_radius + 1):
        if _ngram_closure(m, n, input, limit):
            return NGramCPS(n)
    return None


def iter_dfas(n_states: int, n_symbols: int):
    """DFAs with exactly ``n_states`` states, up to relabeling, with 0 -0-> 0.

    States are numbered in order of first appearance in the flat table.
    """
    size = n_states * n_symbols
    table = [0] * size

    def fill(i: int, used: int):
        if i == size:
            if used == n_states:
                yield tuple(table)
            return
        if used < i // n_symbols + 1:  # state i // n_symbols never referenced
            return
        for q in range(min(used + 1, n_states)):
            table[i] = q
            yield from fill(i + 1, max(used, q + 1))

    yield from fill(1, 1)


@lru_cache(maxsize=None)
def _dfa_array(n_states: int, n_symbols: int, limit: int | None = None) -> np.ndarray:
    rows = list(itertools.islice(iter_dfas(n_states, n_symbols), limit))
    return np.array(rows, dtype=np.int64).reshape(len(rows), n_states * n_symbols)


def mirror(m: Machine) -> Machine:
    """The machine with left and right moves exchanged."""
    return Machine(m.n_states, m.n_symbols,
                   tuple(Transition(t.write, -t.move, t.next) for t in m.table))


def decide_pushdown(m: Machine, fuel: int, input: int = 0, max_dfa_states: int = 5,
                    max_dfas: int = 25_000) -> PushdownClosure | None:
    """Try left DFAs of 1..``max_dfa_states`` states, each also on the mirror image.

    At most ``max_dfas`` DFAs are tried per side.  The mirror image is only
    used from blank tape.
    """
    sides = [(False, m.arrays)]
    if input == 0:
        sides.append((True, mirror(m).arrays))
    budget = {False: max_dfas, True: max_dfas}
    for n in range(1, max_dfa_states + 1):
        for mirrored, (write, move, nxt) in sides:
            if budget[mirrored] <= 0:
                continue
            dfas = _dfa_array(n, m.n_symbols, max_dfas)
            row, tried = _accel.pushdown_scan(write, move, nxt, m.n_symbols, input, dfas,
                                              budget[mirrored])
            if row >= 0:
                return PushdownClosure(tuple(int(v) for v in dfas[row]), mirrored)
            budget[mirrored] -= tried
    return None


def decide_ctl(m: Machine, fuel: int, input: int = 0, max_dfa_states: int = 4,
               max_pairs: int = 1_000_000) -> ClosedTapeLanguage | None:
    """Search DFA pairs in order of size for a closed tape language.

    At most ``max_pairs`` candidate pairs are checked.
    """
    sizes = sorted(((a, b) for a in range(1, max_dfa_states + 1)
                    for b in range(1, max_dfa_states + 1)),
                   key=lambda ab: (max(ab), sum(ab), ab[0]))
    write, move, nxt = m.arrays
    budget = max_pairs
    for n_left, n_right in sizes:
        lefts = _dfa_array(n_left, m.n_symbols)
        rights = _dfa_array(n_right, m.n_symbols)
        i, j, tried = _accel.ctl_scan(write, move, nxt, m.n_symbols, input, lefts, rights,
                                      budget)
        if i >= 0:
            return ClosedTapeLanguage(tuple(int(v) for v in lefts[i]),
                                      tuple(int(v) for v in rights[j]))
        budget -= tried
        if budget <= 0:
            return None
    return None


DECIDERS = {
    "cycler": decide_cycler,
    "translated_cycler": decide_translated_cycler,
    "backward_reasoning": decide_backward_reasoning,
    "ngram_cps": decide_ngram_cps,
    "ctl": decide_ctl,
    "pushdown": decide_pushdown,
}


class _Replay:
    """Mutable plain-dict simulator used only for certificate checking."""

    def __init__(self, m: Machine, input: int) -> None:
        self.m = m
        self.tape = {pos: 1 for pos in range(1, input + 1)}
        self.head = 0
        self.state = 0

    def advance(self) -> bool:
        """One step; False if the machine halted."""
        t = self.m.transition(self.state, self.tape.get(self.head, 0))
        if t.write:
            self.tape[self.head] = t.write
        else:
            self.tape.pop(self.head, None)
        self.head += t.move
        if t.next == HALT:
            return False
        self.state = t.next
        return True

    def window(self, lo: int, hi: int) -> list[int]:
        return [self.tape.get(i, 0) for i in range(lo, hi + 1)]


def _check_backward(m: Machine, depth: int, input: int) -> bool:
    """Level-by-level predecessor sets must be empty at ``depth``."""
    if depth < 0 or _halts_within(m, depth, input):
        return False
    live = reachable_states(m)
    level = {(q, 0, frozenset({(0, s)}))
             for q in live for s in range(m.n_symbols) if m.transition(q, s).halts}
    for _ in range(depth):
        if not level:
            return True
        nxt = set()
        for state, head, tape in level:
            cells = dict(tape)
            for p in live:
                for r in range(m.n_symbols):
                    t = m.transition(p, r)
                    if t.next != state:
                        continue
                    prev = head - t.move
                    if cells.get(prev, t.write) != t.write:
                        continue
                    nxt.add((p, prev, frozenset({**cells, prev: r}.items())))
        level = nxt
    return not level


def _check_ngram(m: Machine, n: int, input: int) -> bool:
    """Recompute the closed position set by plain sweeps to a fixpoint."""
    if n < 1:
        return False
    lgrams, rgrams = {(0,) * n}, _right_ngrams(input, n)
    positions = {_initial_position(input, n)}
    while True:
        before = (len(positions), len(lgrams), len(rgrams))
        for state, left, sym, right in list(positions):
            t = m.transition(state, sym)
            if t.halts:
                return False
            if t.move == RIGHT:
                new_left = (t.write,) + left[:-1]
                lgrams.add(new_left)
                for g in list(rgrams):
                    if g[:-1] == right[1:]:
                        positions.add((t.next, new_left, right[0], g))
            else:
                new_right = (t.write,) + right[:-1]
                rgrams.add(new_right)
                for g in list(lgrams):
                    if g[:-1] == left[1:]:
                        positions.add((t.next, g, left[0], new_right))
        if (len(positions), len(lgrams), len(rgrams)) == before:
            return True


def _check_ctl(m: Machine, c: ClosedTapeLanguage, input: int) -> bool:
    """Check closure level by level from the initial tuple."""
    k = m.n_symbols
    if len(c.left) % k or len(c.right) % k or not c.left or not c.right:
        return False
    n_left, n_right = len(c.left) // k, len(c.right) // k
    if c.left[0] != 0 or c.right[0] != 0:
        return False
    if not all(0 <= q < n_left for q in c.left) or not all(0 <= q < n_right for q in c.right):
        return False
    r0 = 0
    for _ in range(input):
        r0 = c.right[r0 * k + 1]
    frontier = {(0, 0, 0, r0)}
    reached = set(frontier)
    while frontier:
        new = set()
        for l, state, sym, r in frontier:
            t = m.transition(state, sym)
            if t.halts:
                return False
            for b in range(k):
                if t.move == RIGHT:
                    for r2 in range(n_right):
                        if c.right[r2 * k + b] == r:
                            new.add((c.left[l * k + t.write], t.next, b, r2))
                else:
                    for l2 in range(n_left):
                        if c.left[l2 * k + b] == l:
                            new.add((l2, t.next, b, c.right[r * k + t.write]))
        frontier = new - reached
        reached |= frontier
    return True


def _check_pushdown(m: Machine, c: PushdownClosure, input: int) -> bool:
    """Saturate by plain rounds over an explicit rule list until nothing changes.

    Automaton states are tagged tuples; ``None`` labels an empty move.
    """
    k = m.n_symbols
    if c.mirrored:
        if input:
            return False
        m = mirror(m)
    dfa = c.left
    if not dfa or len(dfa) % k or dfa[0] != 0:
        return False
    n_left = len(dfa) // k
    if not all(0 <= q < n_left for q in dfa):
        return False
    bottom = "bottom"
    # rules: (control, top) -> (control', pushed word)
    rules = []
    for l in range(n_left):
        for state in range(m.n_states):
            for top in list(range(k)) + [bottom]:
                t = m.transition(state, 0 if top == bottom else top)
                if t.halts:
                    rules.append(((l, state), top, None, None))
                    continue
                keep = (bottom,) if top == bottom else ()
                if t.move == RIGHT:
                    rules.append(((l, state), top, (dfa[l * k + t.write], t.next), keep))
                else:
                    for l2 in range(n_left):
                        for cell in range(k):
                            if dfa[l2 * k + cell] == l:
                                rules.append(((l, state), top, (l2, t.next),
                                              (cell, t.write) + keep))
    start = ("ctl", (0, 0))
    edges = set()
    prev = start
    if input:
        edges.add((prev, 0, ("input", -1)))
        prev = ("input", -1)
    for j in range(input):
        edges.add((prev, 1, ("input", j)))
        prev = ("input", j)
    edges.add((prev, bottom, ("final",)))
    while True:
        before = len(edges)
        # close under empty moves
        changed = True
        while changed:
            changed = False
            for p, g, q in [e for e in edges if e[1] is None]:
                for q1, g2, q2 in list(edges):
                    if q1 == q and g2 is not None and (p, g2, q2) not in edges:
                        edges.add((p, g2, q2))
                        changed = True
        for ctl, top, target, word in rules:
            src = ("ctl", ctl)
            for p, g, q in list(edges):
                if p != src or g != top:
                    continue
                if target is None:
                    return False
                dst = ("ctl", target)
                if not word:
                    edges.add((dst, None, q))
                    continue
                node = dst
                for i, sym in enumerate(word[:-1]):
                    nxt = ("push", target, word[:i + 1])
                    edges.add((node, sym, nxt))
                    node = nxt
                edges.add((node, word[-1], q))
        if len(edges) == before:
            return True


def check_certificate(m: Machine, c: Certificate, input: int = 0) -> bool:
    """Replay ``m`` and confirm the recurrence ``c`` claims."""
    if isinstance(c, BackwardReasoning):
        return _check_backward(m, c.depth, input)
    if isinstance(c, NGramCPS):
        return _check_ngram(m, c.radius, input)
    if isinstance(c, ClosedTapeLanguage):
        return _check_ctl(m, c, input)
    if isinstance(c, PushdownClosure):
        return _check_pushdown(m, c, input)
    if c.start_step < 0 or c.period < 1:
        return False
    sim = _Replay(m, input)
    for _ in range(c.start_step):
        if not sim.advance():
            return False

    if isinstance(c, Cycler):
        before = (sim.state, sim.head, dict(sim.tape))
        for _ in range(c.period):
            if not sim.advance():
                return False
        return before == (sim.state, sim.head, sim.tape)

    if not isinstance(c, TranslatedCycler) or c.shift == 0:
        return False
    right = c.shift > 0

    def edge_blank() -> bool:
        if right:
            return all(p <= sim.head for p in sim.tape)
        return all(p >= sim.head for p in sim.tape)

    if not edge_blank():
        return False
    state0, head0 = sim.state, sim.head
    reach = 0  # furthest excursion away from the moving edge
    for _ in range(c.period):
        if not sim.advance():
            return False
        reach = max(reach, head0 - sim.head if right else sim.head - head0)
    if sim.state != state0 or sim.head - head0 != c.shift or not edge_blank():
        return False
    # the earlier window was overwritten; replay again to read it
    again = _Replay(m, input)
    for _ in range(c.start_step):
        again.advance()
    if right:
        return again.window(head0 - reach, head0) == sim.window(sim.head - reach, sim.head)
    return again.window(head0, head0 + reach) == sim.window(sim.head, sim.head + reach)
