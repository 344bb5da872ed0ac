"""Notations for constructive ordinals, a registry of certified fundamental
sequences, fueled comparison and a well-foundedness probe.

A notation is a natural.  ``0`` is zero, ``<a, 0>`` is the successor of
``a`` and ``<e, 1>`` is the limit of the sequence computed by kernel program
``e``, where ``<a, b> = 2^b * (2a + 1)``.  This pairing never yields 0, so the
successor of zero differs from zero, and successor codes grow only linearly
in bit length (``succ^n(0) = 2^n - 1``).  Codes with a higher tag (multiples
of 4) decode to :class:`Junk`, which lies outside the notation system.

The order is the one generated by ``a < succ(a)`` and ``phi_e(n) < lim(e)``.
It is not even semi-decidable, so :func:`precedes` is fueled and answers
True, False or UNKNOWN.  Definite False answers need valuations, which exist
only for notations whose limits are in a :class:`Registry`.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Union

from . import kernel
from .cnf import OMEGA, CnfOrdinal, format_cnf, parse_cnf
from .kernel import Converged, Instr, Prog, encode_prog


class UnregisteredLimit(LookupError):
    pass


class NotANotation(ValueError):
    pass


class EvalExhausted(RuntimeError):
    pass


class NonBooleanCheck(ValueError):
    pass


class RegistrationFailed(ValueError):
    pass


class _UnknownType:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Unknown"

    def __bool__(self) -> bool:
        raise TypeError("UNKNOWN has no truth value")


UNKNOWN = _UnknownType()
Answer = Union[bool, _UnknownType]


# -- codes -------------------------------------------------------------------


class Zero(NamedTuple):
    pass


class Succ(NamedTuple):
    pred: int


class Lim(NamedTuple):
    prog: int


class Junk(NamedTuple):
    code: int


Decoded = Union[Zero, Succ, Lim, Junk]


def npair(a: int, tag: int) -> int:
    return (2 * a + 1) << tag


def zero() -> int:
    return 0


def succ(a: int) -> int:
    return npair(a, 0)


def lim(e: int) -> int:
    return npair(e, 1)


def succ_n(a: int, n: int) -> int:
    for _ in range(n):
        a = succ(a)
    return a


def decode_notation(a: int) -> Decoded:
    if a < 0:
        raise NotANotation("notation codes are naturals")
    if a == 0:
        return Zero()
    if a & 1:
        return Succ(a >> 1)
    if a & 3 == 2:
        return Lim(a >> 2)
    return Junk(a)


def describe(a: int, width: int = 24) -> str:
    """Readable term, e.g. ``S^3(L[e])``; long program indices are elided."""
    n = 0
    d = decode_notation(a)
    while isinstance(d, Succ):
        n += 1
        a = d.pred
        d = decode_notation(a)
    if isinstance(d, Zero):
        core = "0"
    else:
        text = str(d.prog if isinstance(d, Lim) else d.code)
        if len(text) > width:
            text = f"{text[:8]}..{len(text)}d"
        core = f"L[{text}]" if isinstance(d, Lim) else f"junk[{text}]"
    if n == 0:
        return core
    return f"S({core})" if n == 1 else f"S^{n}({core})"


# -- kernel programs producing notations --------------------------------------


def iterate_succ_program(start: int) -> Prog:
    """``n -> succ^n(start)``."""
    return Prog((
        Instr("set", (1, start)),        # 0
        Instr("jz", (0, 6)),             # 1
        Instr("dec", (0,)),              # 2
        Instr("add", (1, 1, 1)),         # 3
        Instr("inc", (1,)),              # 4  r1 := 2 r1 + 1
        Instr("jmp", (1,)),              # 5
        Instr("add", (0, 1, 0)),         # 6  r0 is 0 here
        Instr("set", (1, 0)),            # 7
    ))


def plus_omega_family() -> Prog:
    """``<b, n> -> succ^n(b)`` (kernel pairing); ``smn`` at ``b`` enumerates b, b+1, ..."""
    return Prog((
        Instr("unpair", (1, 0, 0)),      # 0  r1 = b, r0 = n
        Instr("jz", (0, 6)),             # 1
        Instr("dec", (0,)),              # 2
        Instr("add", (1, 1, 1)),         # 3
        Instr("inc", (1,)),              # 4
        Instr("jmp", (1,)),              # 5
        Instr("add", (0, 1, 0)),         # 6
        Instr("set", (1, 0)),            # 7
    ))


def plus_omega_index(b: int) -> int:
    """Program index of ``n -> succ^n(b)``, so ``lim`` of it denotes ``|b| + omega``."""
    return kernel.smn(encode_prog(plus_omega_family()), b)


# -- registry ----------------------------------------------------------------


@dataclass(frozen=True)
class RegistryEntry:
    prog: int
    claimed_value: CnfOrdinal
    probe_bound: int
    totality_checked: bool = True
    increase_checked: bool = True

    @property
    def notation(self) -> int:
        return lim(self.prog)

    def to_dict(self) -> dict:
        return {"prog": str(self.prog), "claimed": format_cnf(self.claimed_value),
                "probe_bound": self.probe_bound}


@dataclass
class Registry:
    """Append-only map from program index to certified limit entries."""

    entries: dict[int, RegistryEntry] = field(default_factory=dict)
    fuel: int = 10**6

    def __contains__(self, e: int) -> bool:
        return e in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, e: int) -> RegistryEntry | None:
        return self.entries.get(e)

    def snapshot(self) -> "Registry":
        return Registry(dict(self.entries), self.fuel)

    def register(self, prog: int, claimed: CnfOrdinal, probe_bound: int = 20) -> RegistryEntry:
        """Probe totality and strict increase on ``n <= probe_bound``, then record.

        The claimed value must be a limit ordinal above the valuations of every
        probed element.  Re-registering an index with the same claim is a no-op.
        """
        if prog in self.entries:
            old = self.entries[prog]
            if old.claimed_value != claimed:
                raise RegistrationFailed(f"{prog} already registered as {old.claimed_value}")
            return old
        if not claimed.is_limit:
            raise RegistrationFailed(f"claimed value {claimed} is not a limit")
        values = [sequence_element(prog, n, self.fuel) for n in range(probe_bound + 2)]
        for n in range(probe_bound + 1):
            a, b = values[n], values[n + 1]
            if precedes(a, b, self.fuel, self) is not True:
                raise RegistrationFailed(f"phi_{prog}({n}) < phi_{prog}({n + 1}) not confirmed")
            try:
                vb = ordinal_value(b, self)
            except (UnregisteredLimit, NotANotation) as exc:
                raise RegistrationFailed(str(exc)) from exc
            if not vb < claimed:
                raise RegistrationFailed(f"element {n + 1} has value {vb} >= {claimed}")
        entry = RegistryEntry(prog, claimed, probe_bound)
        self.entries[prog] = entry
        return entry

    def add_unchecked(self, entry: RegistryEntry) -> None:
        self.entries.setdefault(entry.prog, entry)

    def save(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            for e in sorted(self.entries):
                fh.write(json.dumps(self.entries[e].to_dict()) + "\n")

    @classmethod
    def load(cls, path: str | Path, verify: bool = False) -> "Registry":
        reg = cls()
        with open(path) as fh:
            for line in fh:
                if not line.strip():
                    continue
                rec = json.loads(line)
                prog, claimed = int(rec["prog"]), parse_cnf(rec["claimed"])
                if verify:
                    reg.register(prog, claimed, int(rec["probe_bound"]))
                else:
                    reg.add_unchecked(RegistryEntry(prog, claimed, int(rec["probe_bound"])))
        return reg


def sequence_element(e: int, n: int, fuel: int) -> int:
    r = kernel.evaluate(e, n, fuel)
    if not isinstance(r, Converged):
        raise EvalExhausted(f"phi_{e}({n}) exhausted {fuel} fuel")
    return r.value


def canonical_omega(registry: Registry | None = None, probe_bound: int = 20) -> RegistryEntry:
    """Register ``n -> succ^n(0)`` with value omega."""
    registry = registry if registry is not None else Registry()
    return registry.register(encode_prog(iterate_succ_program(0)), OMEGA, probe_bound)


def ordinal_value(a: int, registry: Registry) -> CnfOrdinal:
    steps = 0
    d = decode_notation(a)
    while isinstance(d, Succ):
        steps += 1
        d = decode_notation(d.pred)
    if isinstance(d, Zero):
        return CnfOrdinal.of(steps)
    if isinstance(d, Junk):
        raise NotANotation(f"code {d.code} is not a notation")
    entry = registry.get(d.prog)
    if entry is None:
        raise UnregisteredLimit(f"limit program {d.prog} is not registered")
    return entry.claimed_value + steps


def _value_or_none(a: int, registry: Registry | None) -> CnfOrdinal | None:
    if registry is None:
        return None
    try:
        return ordinal_value(a, registry)
    except (UnregisteredLimit, NotANotation):
        return None


# -- comparison ----------------------------------------------------------------


class _OutOfFuel(Exception):
    pass


class _Budget:
    def __init__(self, fuel: int) -> None:
        self.left = fuel
        self.cache: dict[tuple[int, int], int] = {}

    def burn(self, n: int = 1) -> None:
        self.left -= n
        if self.left < 0:
            raise _OutOfFuel

    def element(self, e: int, n: int) -> int:
        key = (e, n)
        if key not in self.cache:
            self.burn()
            r = kernel.evaluate(e, n, max(self.left, 1))
            if not isinstance(r, Converged):
                raise _OutOfFuel
            self.burn(r.fuel_used)
            self.cache[key] = r.value
        return self.cache[key]


class _Capped:
    """Marker: the search hit the per-limit width before deciding."""


_CAPPED = _Capped()


def _precedes(a: int, b: int, budget: _Budget, registry: Registry | None,
              width: int) -> Answer | _Capped:
    # walk down successors of b: a < S(c) iff a = c or a < c
    while True:
        budget.burn()
        d = decode_notation(b)
        if isinstance(d, (Zero, Junk)):
            return False
        if isinstance(d, Succ):
            if a == d.pred:
                return True
            b = d.pred
            continue
        break
    e = d.prog
    entry = registry.get(e) if registry is not None else None
    va = _value_or_none(a, registry) if entry is not None else None
    if entry is not None and va is not None and va >= entry.claimed_value:
        return False
    capped = False
    for n in itertools.count():
        # with a valuation the cut-off below ends the loop; otherwise deepen
        if n >= width and (va is None or capped):
            return _CAPPED
        x = budget.element(e, n)
        if a == x:
            return True
        sub = _precedes(a, x, budget, registry, width)
        if sub is True:
            return True
        if sub is _CAPPED:
            capped = True
        if va is not None and not capped:
            vx = _value_or_none(x, registry)
            # predecessors of any notation are linearly ordered, so once the
            # sequence reaches |a| without passing a, a is not below the limit
            if vx is not None and vx >= va:
                return False


def precedes(a: int, b: int, fuel: int = 1_000_000, registry: Registry | None = None) -> Answer:
    """Fueled three-valued test of ``a < b`` in the generated order.

    Limits are searched by iterative deepening on the number of sequence
    elements tried, so every derivation of ``a < b`` is reached with enough fuel.
    """
    if fuel < 1:
        raise ValueError("fuel must be >= 1")
    budget = _Budget(fuel)
    width = 1
    try:
        while True:
            r = _precedes(a, b, budget, registry, width)
            if r is not _CAPPED:
                return r
            width *= 2
    except _OutOfFuel:
        return UNKNOWN


# -- well-foundedness probe ---------------------------------------------------


class Ok(NamedTuple):
    explored: int


class CycleFound(NamedTuple):
    path: tuple[int, ...]


class ProbeUnknown(NamedTuple):
    reason: str


ProbeResult = Union[Ok, CycleFound, ProbeUnknown]


def well_founded_probe(a: int, fuel: int = 1_000_000, width: int = 3) -> ProbeResult:
    """Depth-first search of the descent graph from ``a``.

    Successors descend to their predecessor; a limit descends to the first
    ``width`` elements of its sequence.  A notation revisited on the current
    path is a descending cycle, impossible in a well-founded order.
    """
    budget = _Budget(fuel)
    done: set[int] = set()
    on_path: dict[int, int] = {}
    path: list[int] = []
    # iterative DFS: frames are (code, children, next child position)
    stack: list[tuple[int, list[int] | None, int]] = [(a, None, 0)]
    try:
        while stack:
            code, kids, pos = stack.pop()
            if kids is None:
                budget.burn()
                if code in on_path:
                    start = on_path[code]
                    return CycleFound(tuple(path[start:]) + (code,))
                if code in done:
                    continue
                d = decode_notation(code)
                if isinstance(d, Junk):
                    return ProbeUnknown(f"code {code} is not a notation")
                if isinstance(d, Zero):
                    kids = []
                elif isinstance(d, Succ):
                    kids = [d.pred]
                else:
                    kids = [budget.element(d.prog, n) for n in range(width)]
                on_path[code] = len(path)
                path.append(code)
            if pos < len(kids):
                stack.append((code, kids, pos + 1))
                stack.append((kids[pos], None, 0))
            else:
                path.pop()
                del on_path[code]
                done.add(code)
    except _OutOfFuel:
        return ProbeUnknown(f"fuel {fuel} exhausted")
    return Ok(len(done))


# -- the pathological limit --------------------------------------------------


def pathological_transformer() -> Prog:
    """``p -> index of the constant program returning succ(lim(p))``."""
    proj1 = encode_prog(kernel.projection(0))
    return Prog((
        Instr("add", (0, 0, 0)),
        Instr("inc", (0,)),
        Instr("add", (0, 0, 0)),         # lim(p) = 2(2p + 1)
        Instr("add", (0, 0, 0)),
        Instr("inc", (0,)),              # succ(lim(p))
        Instr("set", (1, proj1)),
        Instr("smn", (0, 1, 0)),
        Instr("set", (1, 0)),
    ))


@dataclass(frozen=True)
class PathologicalReport:
    e: int
    phi_e_0: int
    expected: int
    probe: ProbeResult
    limit_below_first: Answer
    first_below_limit: Answer

    @property
    def matches(self) -> bool:
        return self.phi_e_0 == self.expected


def pathological_limit(fuel: int = 100_000) -> PathologicalReport:
    """A program e whose sequence starts with succ(lim(e)), via the recursion theorem."""
    e = kernel.fixpoint(encode_prog(pathological_transformer()), fuel)
    first = sequence_element(e, 0, fuel)
    ell = lim(e)
    return PathologicalReport(
        e=e,
        phi_e_0=first,
        expected=succ(ell),
        probe=well_founded_probe(ell, fuel),
        limit_below_first=precedes(ell, first, fuel),
        first_below_limit=precedes(first, ell, fuel),
    )


# -- point-wise notations ------------------------------------------------------


class AllChecksPassed(NamedTuple):
    probe_bound: int


class FailedAt(NamedTuple):
    i: int


Verdict = Union[AllChecksPassed, FailedAt]


def pointwise_program(a: int, check: int) -> Prog:
    """``<p, n> -> succ^n(a)`` if ``check(i) = 1`` for all ``i <= n``, else ``succ(lim(p))``."""
    return Prog((
        Instr("unpair", (1, 2, 0)),      # 0  r1 = p, r2 = n
        Instr("unpair", (1, 7, 0)),      # 1  r7 = n, counted down
        Instr("set", (4, check)),        # 2
        Instr("set", (3, 0)),            # 3  r3 = i
        Instr("eval", (5, 4, 3)),        # 4  r5 = check(i)
        Instr("jz", (5, 19)),            # 5
        Instr("dec", (5,)),              # 6
        Instr("jz", (5, 9)),             # 7
        Instr("jmp", (19,)),             # 8
        Instr("jz", (7, 13)),            # 9  all i <= n passed
        Instr("dec", (7,)),              # 10
        Instr("inc", (3,)),              # 11
        Instr("jmp", (4,)),              # 12
        Instr("set", (0, a)),            # 13 r0 = succ^n(a)
        Instr("jz", (2, 24)),            # 14
        Instr("dec", (2,)),              # 15
        Instr("add", (0, 0, 0)),         # 16
        Instr("inc", (0,)),              # 17
        Instr("jmp", (14,)),             # 18
        Instr("add", (0, 1, 1)),         # 19 failure: r0 = succ(lim(p))
        Instr("inc", (0,)),              # 20
        Instr("add", (0, 0, 0)),         # 21
        Instr("add", (0, 0, 0)),         # 22
        Instr("inc", (0,)),              # 23
    ))


@dataclass(frozen=True)
class PointwiseResult:
    a: int
    a_x: int
    e_x: int
    verdict: Verdict
    claimed_value: CnfOrdinal | None


def pointwise_notation(a: int, check: int, registry: Registry | None = None,
                       probe_bound: int = 20, fuel: int = 10**6) -> PointwiseResult:
    """Build ``e_x`` with ``phi_{e_x}(n) = succ^n(a)`` while ``check`` holds up to n,
    and ``succ(lim(e_x))`` from the first failure on; ``a_x = succ(lim(e_x))``.

    If the check passes on every ``i <= probe_bound`` and ``|a|`` is computable
    from ``registry``, ``lim(e_x)`` is registered with value ``|a| + omega``.
    """
    h = encode_prog(pointwise_program(a, check))
    transformer = Prog((
        Instr("set", (1, h)),
        Instr("smn", (0, 1, 0)),
        Instr("set", (1, 0)),
    ))
    e_x = kernel.fixpoint(encode_prog(transformer), fuel)
    verdict: Verdict = AllChecksPassed(probe_bound)
    for i in range(probe_bound + 1):
        r = kernel.evaluate(check, i, fuel)
        if not isinstance(r, Converged):
            raise EvalExhausted(f"check({i}) exhausted {fuel} fuel")
        if r.value not in (0, 1):
            raise NonBooleanCheck(f"check({i}) = {r.value}")
        if r.value == 0:
            verdict = FailedAt(i)
            break
    claimed = None
    if isinstance(verdict, AllChecksPassed) and registry is not None:
        base = _value_or_none(a, registry)
        if base is not None:
            claimed = base + OMEGA
            registry.register(e_x, claimed, probe_bound)
    return PointwiseResult(a, succ(lim(e_x)), e_x, verdict, claimed)


def check_program(passes_below: int | None) -> Prog:
    """0/1 check: constant true when ``passes_below`` is None, else ``i < passes_below``."""
    if passes_below is None:
        return kernel.constant(1)
    # r0 := 1 if r0 < k else 0
    return Prog((
        Instr("set", (1, passes_below)),  # 0
        Instr("jz", (1, 7)),              # 1  r1 exhausted first: r0 >= k
        Instr("jz", (0, 9)),              # 2  r0 exhausted first: r0 < k
        Instr("dec", (0,)),               # 3
        Instr("dec", (1,)),               # 4
        Instr("jmp", (1,)),               # 5
        Instr("halt"),                    # 6
        Instr("set", (0, 0)),             # 7
        Instr("jmp", (11,)),              # 8
        Instr("set", (0, 1)),             # 9
        Instr("set", (1, 0)),             # 10
    ))
