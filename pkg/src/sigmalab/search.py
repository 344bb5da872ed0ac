"""Exhaustive busy beaver search over tree-normal-form machines.

The tree is explored depth first.  A node is a partial table; it is simulated
from blank until it reaches an undefined transition (then it spawns one
halting leaf and one child per possible definition), or until it runs out of
fuel (then the deciders get a turn, and failing that the next fuel stage).

The tree is cut into work units at a fixed depth so that a class can be
processed in pieces, in parallel, or resumed; concatenating the units'
records in unit order reproduces the sequential stream exactly.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Union

import numpy as np

from . import _accel
from .deciders import (DECIDERS, Certificate, Cycler, TranslatedCycler,
                       certificate_from_dict)
from .tm import (HALT, RIGHT, LEFT, Machine, Transition, encode_machine,
                 format_machine, parse_machine)

log = logging.getLogger(__name__)

#: write 1, move right, halt: the completion used for undefined transitions
HALT_TRANSITION = Transition(1, RIGHT, HALT)


class ResourceBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchPolicy:
    """How hard to try before giving up on a machine.

    ``fuel`` is the staged schedule; the loop detectors run after every stage
    whose fuel is at most ``decider_fuel_cap``, the other deciders (which do
    not depend on fuel) only after the first such stage.  ``split_depth`` is the number of defined
    transitions at which the tree is cut into work units.
    """

    fuel: tuple[int, ...] = (1_000, 100_000)
    deciders: tuple[str, ...] = ("cycler", "translated_cycler", "backward_reasoning",
                                 "ngram_cps", "ctl", "pushdown")
    decider_fuel_cap: int = 100_000
    split_depth: int = 3
    max_nodes: int | None = None

    @cached_property
    def heavy_stage(self) -> int | None:
        """Index of the stage after which the fuel-independent deciders run."""
        eligible = [i for i, f in enumerate(self.fuel) if f <= self.decider_fuel_cap]
        return eligible[0] if eligible else None

    def __post_init__(self) -> None:
        if not self.fuel or any(f < 1 for f in self.fuel):
            raise ValueError("fuel stages must be >= 1")
        if list(self.fuel) != sorted(self.fuel):
            raise ValueError("fuel stages must be non-decreasing")
        unknown = set(self.deciders) - set(DECIDERS)
        if unknown:
            raise ValueError(f"unknown deciders: {sorted(unknown)}")
        if self.split_depth < 1:
            raise ValueError("split_depth must be >= 1")


# -- classifications ---------------------------------------------------------


@dataclass(frozen=True)
class Halts:
    steps: int
    score: int


@dataclass(frozen=True)
class NeverHalts:
    certificate: Certificate


@dataclass(frozen=True)
class Holdout:
    fuel_used: int


Verdict = Union[Halts, NeverHalts, Holdout]


@dataclass(frozen=True)
class Classification:
    code: int
    machine: Machine
    verdict: Verdict

    def to_record(self) -> dict:
        v = self.verdict
        rec = {"code": str(self.code), "machine": format_machine(self.machine)}
        if isinstance(v, Halts):
            rec.update(classification="halts", steps=v.steps, score=v.score, certificate=None)
        elif isinstance(v, NeverHalts):
            rec.update(classification="never_halts", steps=None, score=None,
                       certificate=v.certificate.to_dict())
        else:
            rec.update(classification="holdout", steps=None, score=None,
                       certificate=None, fuel_used=v.fuel_used)
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> Classification:
        kind = rec["classification"]
        if kind == "halts":
            verdict: Verdict = Halts(rec["steps"], rec["score"])
        elif kind == "never_halts":
            verdict = NeverHalts(certificate_from_dict(rec["certificate"]))
        elif kind == "holdout":
            verdict = Holdout(rec["fuel_used"])
        else:
            raise ValueError(f"unknown classification {kind!r}")
        return cls(int(rec["code"]), parse_machine(rec["machine"]), verdict)


def _run_deciders(machine, arrays, names, fuel, input=0, heavy=True):
    """First certificate any named decider finds; ``arrays`` may be a partial table.

    With ``heavy`` False only the loop detectors are tried.
    """
    write, move, nxt = arrays
    n_symbols = machine.n_symbols
    for name in names:
        if name == "cycler":
            found, start, period = _accel.find_cycler(write, move, nxt, n_symbols, input, fuel)
            if found:
                return Cycler(int(start), int(period))
        elif name == "translated_cycler":
            found, start, period, shift = _accel.find_translated_cycler(
                write, move, nxt, n_symbols, input, fuel)
            if found:
                return TranslatedCycler(int(start), int(period), int(shift))
        elif heavy:
            cert = DECIDERS[name](machine, fuel, input)
            if cert is not None:
                return cert
    return None


def classify(m: Machine, policy: SearchPolicy = SearchPolicy(), input: int = 0) -> Verdict:
    """Halts if a run halts within fuel, else NeverHalts if a decider certifies, else Holdout."""
    write, move, nxt = m.arrays
    for stage, fuel in enumerate(policy.fuel):
        buf = np.zeros(_accel.tape_size(fuel, input), dtype=np.int8)
        status, steps, _, _, score = _accel.simulate(write, move, nxt, m.n_symbols,
                                                     input, fuel, buf)
        if status == _accel.HALTED:
            return Halts(int(steps), int(score))
        if fuel <= policy.decider_fuel_cap:
            cert = _run_deciders(m, m.arrays, policy.deciders, fuel, input,
                                 stage == policy.heavy_stage)
            if cert is not None:
                return NeverHalts(cert)
    return Holdout(policy.fuel[-1])


# -- tree normal form --------------------------------------------------------


@dataclass
class _Node:
    write: np.ndarray
    move: np.ndarray
    nxt: np.ndarray
    used: int  # states introduced so far
    depth: int  # defined transitions
    stage: int = 0


def _root(n_states: int, n_symbols: int) -> _Node:
    size = n_states * n_symbols
    return _Node(np.zeros(size, np.int64), np.zeros(size, np.int64),
                 np.full(size, _accel.UNDEF, np.int64), 1, 0)


def _complete(node: _Node, n_states: int, n_symbols: int,
              halt_at: int | None = None) -> Machine:
    table = []
    for i in range(n_states * n_symbols):
        if node.nxt[i] == _accel.UNDEF or i == halt_at:
            table.append(HALT_TRANSITION)
        else:
            table.append(Transition(int(node.write[i]), int(node.move[i]), int(node.nxt[i])))
    return Machine(n_states, n_symbols, tuple(table))


def _children(node: _Node, index: int, n_states: int, n_symbols: int) -> list[_Node]:
    moves = (RIGHT,) if node.depth == 0 else (LEFT, RIGHT)  # mirror symmetry
    out = []
    for w in range(n_symbols):
        for mv in moves:
            for q in range(min(node.used + 1, n_states)):
                write, move, nxt = node.write.copy(), node.move.copy(), node.nxt.copy()
                write[index], move[index], nxt[index] = w, mv, q
                out.append(_Node(write, move, nxt, max(node.used, q + 1),
                                 node.depth + 1, node.stage))
    return out


class _Explorer:
    def __init__(self, n_states: int, n_symbols: int, policy: SearchPolicy) -> None:
        self.n, self.k, self.policy = n_states, n_symbols, policy
        self.buffers = {f: np.zeros(_accel.tape_size(f, 0), np.int8) for f in policy.fuel}
        self.nodes = 0

    def _leaf(self, machine: Machine, verdict: Verdict) -> Classification:
        return Classification(encode_machine(machine), machine, verdict)

    def visit(self, node: _Node) -> tuple[list[Classification], list[_Node]]:
        """Process one node: its own leaf records, and its children."""
        self.nodes += 1
        if self.policy.max_nodes is not None and self.nodes > self.policy.max_nodes:
            raise ResourceBudgetExceeded(f"more than {self.policy.max_nodes} tree nodes")
        k = self.k
        while True:
            fuel = self.policy.fuel[node.stage]
            status, steps, state, symbol, score = _accel.simulate(
                node.write, node.move, node.nxt, k, 0, fuel, self.buffers[fuel])
            if status == _accel.UNDEFINED:
                index = int(state) * k + int(symbol)
                halting = _complete(node, self.n, k, halt_at=index)
                leaf = self._leaf(halting, Halts(int(steps) + 1, int(score) + (symbol == 0)))
                return [leaf], _children(node, index, self.n, k)
            if status == _accel.HALTED:  # pragma: no cover - partial tables never halt
                raise AssertionError("explicit halt inside a partial table")
            machine = _complete(node, self.n, k)
            if fuel <= self.policy.decider_fuel_cap:
                cert = _run_deciders(machine, (node.write, node.move, node.nxt),
                                     self.policy.deciders, fuel,
                                     heavy=node.stage == self.policy.heavy_stage)
                if cert is not None:
                    return [self._leaf(machine, NeverHalts(cert))], []
            if node.stage + 1 == len(self.policy.fuel):
                return [self._leaf(machine, Holdout(fuel))], []
            node.stage += 1

    def subtree(self, node: _Node) -> Iterator[Classification]:
        stack = [node]
        while stack:
            leaves, children = self.visit(stack.pop())
            yield from leaves
            stack.extend(reversed(children))


@dataclass(frozen=True)
class WorkUnit:
    """A node of the tree; ``expand`` False means only the node's own leaf."""

    node: _Node
    expand: bool


def work_units(n_states: int, n_symbols: int,
               policy: SearchPolicy = SearchPolicy()) -> list[WorkUnit]:
    """Deterministic partition of the class's tree into units, in stream order."""
    explorer = _Explorer(n_states, n_symbols, policy)
    units: list[WorkUnit] = []
    stack = [_root(n_states, n_symbols)]
    while stack:
        node = stack.pop()
        if node.depth >= policy.split_depth:
            units.append(WorkUnit(node, True))
            continue
        probe = _Node(node.write, node.move, node.nxt, node.used, node.depth, node.stage)
        leaves, children = explorer.visit(probe)
        if children:
            units.append(WorkUnit(node, False))
            stack.extend(reversed(children))
        else:
            units.append(WorkUnit(node, True))
    return units


def process_unit(n_states: int, n_symbols: int, policy: SearchPolicy,
                 unit: WorkUnit) -> list[Classification]:
    explorer = _Explorer(n_states, n_symbols, policy)
    node = _Node(unit.node.write, unit.node.move, unit.node.nxt, unit.node.used,
                 unit.node.depth, unit.node.stage)
    if unit.expand:
        return list(explorer.subtree(node))
    leaves, _ = explorer.visit(node)
    return leaves


def _process_packed(args):
    n, k, policy, unit = args
    return process_unit(n, k, policy, unit)


def classify_units(n_states: int, n_symbols: int, policy: SearchPolicy,
                   units: Iterable[WorkUnit], workers: int = 1) -> Iterator[list[Classification]]:
    """Records per unit, in unit order, whatever the worker count."""
    if workers <= 1:
        for unit in units:
            yield process_unit(n_states, n_symbols, policy, unit)
        return
    with ProcessPoolExecutor(workers) as pool:
        yield from pool.map(_process_packed,
                            ((n_states, n_symbols, policy, u) for u in units), chunksize=4)


def enumerate_class(n_states: int, n_symbols: int, policy: SearchPolicy = SearchPolicy(),
                    cursor: int = 0) -> Iterator[Machine]:
    """One machine per tree-normal-form leaf, starting at work unit ``cursor``."""
    if n_states < 1 or n_symbols < 2:
        raise ValueError("need n_states >= 1 and n_symbols >= 2")
    units = work_units(n_states, n_symbols, policy)[cursor:]
    for records in classify_units(n_states, n_symbols, policy, units):
        for rec in records:
            yield rec.machine


def search_class(n_states: int, n_symbols: int, policy: SearchPolicy = SearchPolicy(),
                 workers: int = 1) -> Iterator[Classification]:
    units = work_units(n_states, n_symbols, policy)
    for records in classify_units(n_states, n_symbols, policy, units, workers):
        yield from records


# -- reports -----------------------------------------------------------------


@dataclass
class ChampionReport:
    n_states: int
    n_symbols: int
    S: int = 0
    Sigma: int = 0
    steps_champion: Machine | None = None
    score_champion: Machine | None = None
    halting: int = 0
    non_halting: int = 0
    holdout: int = 0
    holdouts: list[Classification] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return self.holdout == 0

    def add(self, c: Classification) -> None:
        v = c.verdict
        if isinstance(v, Halts):
            self.halting += 1
            if v.steps > self.S:
                self.S, self.steps_champion = v.steps, c.machine
            if v.score > self.Sigma:
                self.Sigma, self.score_champion = v.score, c.machine
        elif isinstance(v, NeverHalts):
            self.non_halting += 1
        else:
            self.holdout += 1
            self.holdouts.append(c)

    def merge(self, other: ChampionReport) -> ChampionReport:
        """Fold ``other`` (a later part of the stream) into a new report."""
        out = ChampionReport(self.n_states, self.n_symbols, self.S, self.Sigma,
                             self.steps_champion, self.score_champion,
                             self.halting + other.halting,
                             self.non_halting + other.non_halting,
                             self.holdout + other.holdout,
                             self.holdouts + other.holdouts)
        if other.S > out.S:
            out.S, out.steps_champion = other.S, other.steps_champion
        if other.Sigma > out.Sigma:
            out.Sigma, out.score_champion = other.Sigma, other.score_champion
        return out

    def to_dict(self) -> dict:
        def text(m):
            return None if m is None else format_machine(m)

        return {
            "class": [self.n_states, self.n_symbols],
            "S": self.S,
            "Sigma": self.Sigma,
            "exact": self.exact,
            "steps_champion": text(self.steps_champion),
            "score_champion": text(self.score_champion),
            "counts": {"halting": self.halting, "non_halting": self.non_halting,
                       "holdout": self.holdout},
            "holdouts": [h.to_record() for h in self.holdouts],
        }


def report_from(n_states: int, n_symbols: int,
                records: Iterable[Classification]) -> ChampionReport:
    report = ChampionReport(n_states, n_symbols)
    for rec in records:
        report.add(rec)
    return report


def busy_beaver(n_states: int, n_symbols: int, policy: SearchPolicy = SearchPolicy(),
                workers: int = 1) -> ChampionReport:
    """S(n,m) and Sigma(n,m) by exhaustive search; inexact if holdouts remain."""
    report = report_from(n_states, n_symbols, search_class(n_states, n_symbols, policy, workers))
    log.info("class (%d,%d): S=%d Sigma=%d exact=%s", n_states, n_symbols,
             report.S, report.Sigma, report.exact)
    return report
