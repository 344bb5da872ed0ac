"""Symbolic consistency progressions over notations, branch checks and
bounded verification of universal statements.

A progression assigns a theory to each notation::

    T_0       = base
    T_succ(a) = T_a + Cons(T_a)
    T_lim(e)  = union over n of T_phi_e(n)

No proof system is built: ``Cons`` is an annotation.  What is computed is
the skeleton of these equations, with limit sequences evaluated by the
kernel.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Union

from . import kernel
from .ordinals import (
    UNKNOWN, CycleFound, EvalExhausted, Junk, Registry, Succ, Zero,
    decode_notation, describe, precedes, well_founded_probe,
)
from .tm import Halted, Machine, decode_machine, class_range, parse_machine, run


class TheoryLabel(NamedTuple):
    base: str
    notation: int

    def __str__(self) -> str:
        return f"{self.base}[{describe(self.notation)}]"


@dataclass
class ProgressionNode:
    label: TheoryLabel
    kind: str                      # "base", "successor", "limit", "junk" or "truncated"
    children: list["ProgressionNode"] = field(default_factory=list)
    prefix: tuple[int, ...] = ()   # phi_e(0..k-1) for limit nodes
    suspicious: bool = False
    recurs: bool = False           # notation already occurs among the ancestors

    def walk(self) -> Iterator["ProgressionNode"]:
        yield self
        for c in self.children:
            yield from c.walk()

    @property
    def any_suspicious(self) -> bool:
        return any(n.suspicious for n in self.walk())

    def to_dict(self) -> dict:
        d = {"theory": self.label.base, "notation": str(self.label.notation),
             "term": describe(self.label.notation), "kind": self.kind}
        if self.kind == "limit":
            d["prefix"] = [str(x) for x in self.prefix]
        if self.suspicious:
            d["suspicious"] = True
        if self.recurs:
            d["recurs"] = True
        if self.children:
            d["children"] = [c.to_dict() for c in self.children]
        return d


def expand_progression(base: str, a: int, limit_prefix: int = 3, depth: int = 4,
                       fuel: int = 1_000_000, probe_fuel: int = 1_000_000) -> ProgressionNode:
    """Unfold the defining equations from ``T_a`` down to ``depth`` edges.

    Limit nodes show the first ``limit_prefix`` sequence elements.  Nodes
    whose notation fails the well-foundedness probe are flagged suspicious.
    """
    probes: dict[int, bool] = {}

    def suspicious(code: int) -> bool:
        if code not in probes:
            probes[code] = isinstance(well_founded_probe(code, probe_fuel), CycleFound)
        return probes[code]

    def build(code: int, left: int, ancestors: frozenset[int]) -> ProgressionNode:
        label = TheoryLabel(base, code)
        d = decode_notation(code)
        grounded = isinstance(d, (Zero, Junk))
        node = ProgressionNode(label, "base", suspicious=not grounded and suspicious(code),
                               recurs=code in ancestors)
        if isinstance(d, Zero):
            return node
        if isinstance(d, Junk):
            node.kind = "junk"
            return node
        if left == 0 or node.recurs:
            node.kind = "truncated"
            return node
        below = ancestors | {code}
        if isinstance(d, Succ):
            node.kind = "successor"
            node.children = [build(d.pred, left - 1, below)]
            return node
        node.kind = "limit"
        prefix = []
        for n in range(limit_prefix):
            r = kernel.evaluate(d.prog, n, fuel)
            if not isinstance(r, kernel.Converged):
                raise EvalExhausted(f"phi_{d.prog}({n}) exhausted {fuel} fuel")
            prefix.append(r.value)
        node.prefix = tuple(prefix)
        node.children = [build(x, left - 1, below) for x in prefix]
        return node

    return build(a, depth, frozenset())


def format_outline(tree: ProgressionNode) -> str:
    """Indented outline, one theory per line."""
    lines: list[str] = []

    def emit(node: ProgressionNode, indent: int) -> None:
        pad = "  " * indent
        name = str(node.label)
        if node.kind == "base":
            text = f"{name} = {node.label.base}"
        elif node.kind == "successor":
            child = node.children[0].label
            text = f"{name} = {child} + Cons({child})"
        elif node.kind == "limit":
            text = f"{name} = union of {len(node.prefix)} listed theories, ..."
        elif node.kind == "junk":
            text = f"{name} (not a notation)"
        else:
            text = f"{name} (not expanded)"
        if node.recurs:
            text += " [recurs]"
        if node.suspicious:
            text += " [suspicious]"
        lines.append(pad + text)
        for c in node.children:
            emit(c, indent + 1)
        if node.kind == "limit":
            lines.append(pad + "  ...")

    emit(tree, 0)
    return "\n".join(lines)


def tree_json(tree: ProgressionNode) -> str:
    return json.dumps(tree.to_dict(), indent=2)


# -- branches ------------------------------------------------------------------


class LinearlyOrdered(NamedTuple):
    pass


class Incomparable(NamedTuple):
    pair: tuple[int, int]


class BranchUnknown(NamedTuple):
    pair: tuple[int, int]


BranchResult = Union[LinearlyOrdered, Incomparable, BranchUnknown]


def branch_check(notations: list[int], fuel: int = 1_000_000,
                 registry: Registry | None = None) -> BranchResult:
    """Pairwise comparability; a definite incomparability outranks an unknown."""
    first_unknown = None
    for i, a in enumerate(notations):
        for b in notations[i + 1:]:
            if a == b:
                continue
            ab = precedes(a, b, fuel, registry)
            if ab is True:
                continue
            ba = precedes(b, a, fuel, registry)
            if ba is True:
                continue
            if ab is UNKNOWN or ba is UNKNOWN:
                first_unknown = first_unknown or (a, b)
                continue
            return Incomparable((a, b))
    return BranchUnknown(first_unknown) if first_unknown else LinearlyOrdered()


# -- bounded verification ------------------------------------------------------


@dataclass(frozen=True)
class Pi1Statement:
    """``searcher`` halts iff the statement has a counterexample, which it outputs."""

    searcher: Machine
    description: str = ""


@dataclass(frozen=True)
class ClassScoreStatement:
    """"No (n, m) machine halts from blank with score above ``max_score``".

    The searcher is the enumeration of the raw class, each member run for the
    bound; the counterexample is the code of an offending machine.
    """

    n_states: int
    n_symbols: int
    max_score: int
    description: str = ""


class Verified(NamedTuple):
    pass


class CounterexampleFound(NamedTuple):
    x: int
    at_step: int
    witness: str = ""


class BoundInsufficient(NamedTuple):
    bound: int


VerifyOutcome = Union[Verified, CounterexampleFound, BoundInsufficient]


def verify_pi1_with_bound(stmt: Pi1Statement | ClassScoreStatement, bound: int,
                          trusted: bool = True) -> VerifyOutcome:
    """Run the search for ``bound`` steps.

    With a trusted bound (at least the halting time of any halting searcher),
    not halting within it means never halting, so the statement is Verified.
    An untrusted bound that is exhausted gives BoundInsufficient instead.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    if isinstance(stmt, Pi1Statement):
        r = run(stmt.searcher, 0, bound)
        if isinstance(r, Halted):
            return CounterexampleFound(r.output, r.steps, str(stmt.searcher))
        return Verified() if trusted else BoundInsufficient(bound)
    survivors = 0
    for code in class_range(stmt.n_states, stmt.n_symbols):
        m = decode_machine(code)
        r = run(m, 0, bound)
        if isinstance(r, Halted):
            if r.score > stmt.max_score:
                return CounterexampleFound(code, r.steps, str(m))
        else:
            survivors += 1
    if survivors and not trusted:
        return BoundInsufficient(bound)
    return Verified()


def outcome_record(stmt: Pi1Statement | ClassScoreStatement, bound: int, trusted: bool,
                   outcome: VerifyOutcome) -> dict:
    rec = {"statement": stmt.description, "bound": bound, "trusted": trusted,
           "outcome": type(outcome).__name__}
    if isinstance(outcome, CounterexampleFound):
        rec.update(x=str(outcome.x), at_step=outcome.at_step, witness=outcome.witness)
    return rec


def parse_statements(text: str) -> list[Pi1Statement | ClassScoreStatement]:
    """One JSON object per line.

    ``{"searcher": "1RB1LB_1LA1RZ", "description": ...}`` or
    ``{"class": [2, 2], "max_score": 4, "description": ...}``.
    """
    out: list[Pi1Statement | ClassScoreStatement] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rec = json.loads(line)
        desc = rec.get("description", "")
        if "searcher" in rec:
            out.append(Pi1Statement(parse_machine(rec["searcher"]), desc))
        elif "class" in rec:
            n, m = rec["class"]
            out.append(ClassScoreStatement(int(n), int(m), int(rec["max_score"]), desc))
        else:
            raise ValueError(f"statement needs 'searcher' or 'class': {line!r}")
    return out
