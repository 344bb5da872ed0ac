"""A small register language, its numbering, universal evaluation, s-m-n and
the recursion theorem.

Programs are instruction lists over registers r0, r1, ...  The input arrives
in r0 (all other registers zero) and the output is r0 when control reaches
``halt`` or falls off the end.  Jump targets range over ``0..len(program)``;
target ``len(program)`` exits.

Primitive instructions::

    inc r        dec r (saturating)        jz r t        jmp t        halt

Derived instructions, executed natively and charged their nominal expansion
length (one unit plus the bit length of the numbers they touch)::

    set r n            r := n
    pair d a b         d := <a, b>           (Cantor pairing)
    unpair d1 d2 s     (d1, d2) := s
    eval d e x         d := phi_e(x)         (shares the caller's fuel)
    smn d e a          d := smn(e, a)
    add d a b          d := a + b

Numbering: index 0 is the empty program; index ``i > 0`` is read as the
bijective base-3 numeral of ``i - 1``, digit 3 separating the bijective
base-2 numerals of the instruction codes.  Every natural is a program and
every program has exactly one index, and indices grow linearly with program
size.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import isqrt
from typing import NamedTuple


class TransformerDiverged(RuntimeError):
    pass


# -- pairing -----------------------------------------------------------------


def pair(a: int, b: int) -> int:
    s = a + b
    return s * (s + 1) // 2 + b


def unpair(n: int) -> tuple[int, int]:
    w = (isqrt(8 * n + 1) - 1) // 2
    b = n - w * (w + 1) // 2
    return w - b, b


# -- syntax ------------------------------------------------------------------

_ARITY = {"halt": 0, "jmp": 1, "inc": 1, "dec": 1, "jz": 2, "set": 2,
          "pair": 3, "unpair": 3, "eval": 3, "smn": 3, "add": 3}
_FAMILIES = ("inc", "dec", "jz", "set", "pair", "unpair", "eval", "smn", "add")
# which argument positions are registers (the rest are targets or numerals)
_REGISTER_ARGS = {"halt": (), "jmp": (), "inc": (0,), "dec": (0,), "jz": (0,),
                  "set": (0,), "pair": (0, 1, 2), "unpair": (0, 1, 2),
                  "eval": (0, 1, 2), "smn": (0, 1, 2), "add": (0, 1, 2)}


class Instr(NamedTuple):
    op: str
    args: tuple[int, ...] = ()

    def __str__(self) -> str:
        parts = [self.op]
        for i, a in enumerate(self.args):
            parts.append(f"r{a}" if i in _REGISTER_ARGS[self.op] else str(a))
        return " ".join(parts)


def _target(ins: Instr) -> int | None:
    if ins.op == "jmp":
        return ins.args[0]
    if ins.op == "jz":
        return ins.args[1]
    return None


@dataclass(frozen=True)
class Prog:
    instrs: tuple[Instr, ...] = ()

    def __post_init__(self) -> None:
        for ins in self.instrs:
            if ins.op not in _ARITY or len(ins.args) != _ARITY[ins.op]:
                raise ValueError(f"bad instruction {ins!r}")
            if any(a < 0 for a in ins.args):
                raise ValueError(f"negative operand in {ins}")
            t = _target(ins)
            if t is not None and t > len(self.instrs):
                raise ValueError(f"jump target out of range in {ins}")

    def __len__(self) -> int:
        return len(self.instrs)

    @cached_property
    def n_registers(self) -> int:
        regs = [ins.args[i] for ins in self.instrs for i in _REGISTER_ARGS[ins.op]]
        return max(regs, default=0) + 1

    def __str__(self) -> str:
        return "\n".join(str(ins) for ins in self.instrs)

    @property
    def index(self) -> int:
        return encode_prog(self)


def parse_prog(text: str) -> Prog:
    """One instruction per line; blank lines and ``#`` comments are ignored."""
    instrs = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        op, *raw = line.split()
        if op not in _ARITY:
            raise ValueError(f"unknown instruction {op!r}")
        args = []
        for i, tok in enumerate(raw):
            if i in _REGISTER_ARGS[op]:
                if not tok.startswith("r"):
                    raise ValueError(f"expected a register in {line!r}")
                tok = tok[1:]
            args.append(int(tok))
        instrs.append(Instr(op, tuple(args)))
    return Prog(tuple(instrs))


def format_prog(p: Prog) -> str:
    return str(p)


# -- numbering ---------------------------------------------------------------


def _bijective_digits(n: int, base: int) -> list[int]:
    digits = []
    while n:
        n, d = divmod(n - 1, base)
        digits.append(d + 1)
    return digits[::-1]


def _from_bijective(digits: list[int], base: int) -> int:
    n = 0
    for d in digits:
        n = n * base + d
    return n


def _instr_code(ins: Instr, length: int) -> int:
    op, a = ins.op, ins.args
    if op == "halt":
        return 0
    if op == "jmp":
        return 1 + a[0]
    if op in ("inc", "dec"):
        q = a[0]
    elif op == "jz":
        q = a[0] * (length + 1) + a[1]
    elif op == "set":
        q = pair(a[0], a[1])
    else:
        q = pair(a[0], pair(a[1], a[2]))
    return length + 2 + len(_FAMILIES) * q + _FAMILIES.index(op)


def _instr_decode(c: int, length: int) -> Instr:
    if c == 0:
        return Instr("halt")
    if c <= length + 1:
        return Instr("jmp", (c - 1,))
    q, fam = divmod(c - length - 2, len(_FAMILIES))
    op = _FAMILIES[fam]
    if op in ("inc", "dec"):
        return Instr(op, (q,))
    if op == "jz":
        return Instr(op, divmod(q, length + 1))
    if op == "set":
        return Instr(op, unpair(q))
    x, rest = unpair(q)
    return Instr(op, (x, *unpair(rest)))


def encode_prog(p: Prog) -> int:
    if not p.instrs:
        return 0
    digits: list[int] = []
    for i, ins in enumerate(p.instrs):
        if i:
            digits.append(3)
        digits.extend(_bijective_digits(_instr_code(ins, len(p)), 2))
    return _from_bijective(digits, 3) + 1


@lru_cache(maxsize=65536)
def decode_prog(e: int) -> Prog:
    if e < 0:
        raise ValueError("program indices are naturals")
    if e == 0:
        return Prog()
    groups: list[list[int]] = [[]]
    for d in _bijective_digits(e - 1, 3):
        if d == 3:
            groups.append([])
        else:
            groups[-1].append(d)
    length = len(groups)
    return Prog(tuple(_instr_decode(_from_bijective(g, 2), length) for g in groups))


# -- evaluation --------------------------------------------------------------


class Converged(NamedTuple):
    value: int
    fuel_used: int


class OutOfFuel(NamedTuple):
    fuel: int


class _Exhausted(Exception):
    pass


class _Tank:
    __slots__ = ("left",)

    def __init__(self, fuel: int) -> None:
        self.left = fuel

    def burn(self, n: int) -> None:
        self.left -= n
        if self.left < 0:
            raise _Exhausted


def _bits(*values: int) -> int:
    return sum(v.bit_length() for v in values)


def _exec(p: Prog, x: int, tank: _Tank) -> int:
    # nested eval pushes a frame instead of recursing, so depth is bounded by fuel only
    frames: list[tuple[tuple[Instr, ...], list[int], int, int]] = []
    code = p.instrs
    regs = [0] * p.n_registers
    regs[0] = x
    pc = 0
    while True:
        if pc >= len(code):
            if not frames:
                return regs[0]
            value = regs[0]
            code, regs, pc, dest = frames.pop()
            regs[dest] = value
            continue
        op, a = code[pc]
        pc += 1
        if op == "inc":
            tank.burn(1)
            regs[a[0]] += 1
        elif op == "dec":
            tank.burn(1)
            if regs[a[0]]:
                regs[a[0]] -= 1
        elif op == "jz":
            tank.burn(1)
            if not regs[a[0]]:
                pc = a[1]
        elif op == "jmp":
            tank.burn(1)
            pc = a[0]
        elif op == "halt":
            tank.burn(1)
            pc = len(code)
        elif op == "set":
            tank.burn(1 + _bits(a[1]))
            regs[a[0]] = a[1]
        elif op == "pair":
            tank.burn(1 + _bits(regs[a[1]], regs[a[2]]))
            regs[a[0]] = pair(regs[a[1]], regs[a[2]])
        elif op == "unpair":
            tank.burn(1 + _bits(regs[a[2]]))
            regs[a[0]], regs[a[1]] = unpair(regs[a[2]])
        elif op == "add":
            tank.burn(1 + _bits(regs[a[1]], regs[a[2]]))
            regs[a[0]] = regs[a[1]] + regs[a[2]]
        elif op == "eval":
            tank.burn(1)
            callee = decode_prog(regs[a[1]])
            arg = regs[a[2]]
            frames.append((code, regs, pc, a[0]))
            code = callee.instrs
            regs = [0] * callee.n_registers
            regs[0] = arg
            pc = 0
        else:  # smn
            result = smn(regs[a[1]], regs[a[2]])
            tank.burn(1 + _bits(result))
            regs[a[0]] = result


def evaluate(e: int, x: int, fuel: int) -> Converged | OutOfFuel:
    """phi_e(x) within ``fuel`` units."""
    if fuel < 1:
        raise ValueError("fuel must be >= 1")
    tank = _Tank(fuel)
    try:
        value = _exec(decode_prog(e), x, tank)
    except _Exhausted:
        return OutOfFuel(fuel)
    return Converged(value, fuel - tank.left)


def run_prog(p: Prog, x: int, fuel: int) -> Converged | OutOfFuel:
    return evaluate(encode_prog(p), x, fuel)


# -- s-m-n and fixed points --------------------------------------------------


def _shift(p: Prog, by: int) -> tuple[Instr, ...]:
    out = []
    for ins in p.instrs:
        if ins.op == "jmp":
            ins = Instr("jmp", (ins.args[0] + by,))
        elif ins.op == "jz":
            ins = Instr("jz", (ins.args[0], ins.args[1] + by))
        out.append(ins)
    return tuple(out)


@lru_cache(maxsize=4096)
def smn(e: int, a: int) -> int:
    """Index of a program computing ``y -> phi_e(<a, y>)``."""
    prefix = (Instr("set", (1, a)), Instr("pair", (0, 1, 0)), Instr("set", (1, 0)))
    return encode_prog(Prog(prefix + _shift(decode_prog(e), len(prefix))))


def universal_program() -> Prog:
    """``<x, y> -> phi_{phi_x(x)}(y)``."""
    return parse_prog("""
        unpair r1 r2 r0
        eval r3 r1 r1
        eval r0 r3 r2
    """)


def fixpoint(transformer: int, fuel: int = 10_000) -> int:
    """Kleene fixed point: an index p with phi_p = phi_{phi_transformer(p)}.

    ``d(x) = smn(u, x)`` computes ``y -> phi_{phi_x(x)}(y)``; with ``v`` the
    program ``x -> transformer(d(x))`` the fixed point is ``d(v)``.
    Raises TransformerDiverged if the transformer does not converge on p
    within ``fuel``.
    """
    u = encode_prog(universal_program())
    v = encode_prog(Prog((
        Instr("set", (1, u)),
        Instr("smn", (0, 1, 0)),
        Instr("set", (2, transformer)),
        Instr("eval", (0, 2, 0)),
    )))
    p = smn(u, v)
    if isinstance(evaluate(transformer, p, fuel), OutOfFuel):
        raise TransformerDiverged(f"transformer {transformer} exhausted {fuel} fuel at {p}")
    return p


# -- a few programs ----------------------------------------------------------


def identity() -> Prog:
    return Prog()


def constant(n: int) -> Prog:
    return Prog((Instr("set", (0, n)),))


def projection(which: int) -> Prog:
    """``<a, b> -> a`` for ``which == 0``, ``-> b`` otherwise."""
    return Prog((Instr("unpair", (0, 1, 0) if which == 0 else (1, 0, 0)),
                 Instr("set", (1, 0))))


def doubling() -> Prog:
    return parse_prog("""
        jz r0 5
        dec r0
        inc r1
        inc r1
        jmp 0
        jz r1 9
        dec r1
        inc r0
        jmp 5
    """)


def addition() -> Prog:
    """``<a, b> -> a + b``."""
    return parse_prog("""
        unpair r0 r1 r0
        jz r1 5
        dec r1
        inc r0
        jmp 1
    """)


def compose(f: int, g: int) -> Prog:
    """``x -> phi_f(phi_g(x))``."""
    return Prog((
        Instr("set", (1, g)),
        Instr("eval", (0, 1, 0)),
        Instr("set", (1, f)),
        Instr("eval", (0, 1, 0)),
        Instr("set", (1, 0)),
    ))


def constant_transformer(q: int) -> Prog:
    """Ignores its input and returns the index ``q``."""
    return constant(q)


def quine_transformer() -> Prog:
    """``p -> index of a program that outputs p`` (via smn of the first projection)."""
    return Prog((
        Instr("set", (1, encode_prog(projection(0)))),
        Instr("smn", (0, 1, 0)),
        Instr("set", (1, 0)),
    ))
