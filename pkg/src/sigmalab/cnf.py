"""Ordinals below epsilon_0 in Cantor normal form."""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering


@total_ordering
@dataclass(frozen=True)
class CnfOrdinal:
    """``sum of omega^e * k`` with strictly decreasing exponents, ``k >= 1``."""

    terms: tuple[tuple["CnfOrdinal", int], ...] = ()

    def __post_init__(self) -> None:
        for i, (e, k) in enumerate(self.terms):
            if k < 1:
                raise ValueError("coefficients must be >= 1")
            if i and not e < self.terms[i - 1][0]:
                raise ValueError("exponents must strictly decrease")

    @classmethod
    def of(cls, n: int) -> "CnfOrdinal":
        if n < 0:
            raise ValueError("ordinals are non-negative")
        return cls(((ZERO, n),)) if n else ZERO

    @classmethod
    def omega_power(cls, e: "CnfOrdinal", k: int = 1) -> "CnfOrdinal":
        return cls(((e, k),))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_successor(self) -> bool:
        return bool(self.terms) and self.terms[-1][0].is_zero

    @property
    def is_limit(self) -> bool:
        return bool(self.terms) and not self.terms[-1][0].is_zero

    @property
    def finite(self) -> int | None:
        if self.is_zero:
            return 0
        if len(self.terms) == 1 and self.terms[0][0].is_zero:
            return self.terms[0][1]
        return None

    def _key(self, other: "CnfOrdinal") -> int:
        for (e1, k1), (e2, k2) in zip(self.terms, other.terms):
            if e1 != e2:
                return 1 if e1 > e2 else -1
            if k1 != k2:
                return 1 if k1 > k2 else -1
        return (len(self.terms) > len(other.terms)) - (len(self.terms) < len(other.terms))

    def __lt__(self, other: "CnfOrdinal") -> bool:
        if not isinstance(other, CnfOrdinal):
            return NotImplemented
        return self._key(other) < 0

    def __add__(self, other: "CnfOrdinal | int") -> "CnfOrdinal":
        if isinstance(other, int):
            other = CnfOrdinal.of(other)
        if other.is_zero:
            return self
        lead, k = other.terms[0]
        kept = [t for t in self.terms if t[0] > lead]
        same = [c for e, c in self.terms if e == lead]
        head = (lead, k + same[0]) if same else (lead, k)
        return CnfOrdinal(tuple(kept) + (head,) + other.terms[1:])

    def __radd__(self, other: int) -> "CnfOrdinal":
        return CnfOrdinal.of(other) + self

    def __str__(self) -> str:
        return format_cnf(self)

    def __repr__(self) -> str:
        return f"CnfOrdinal({format_cnf(self)!r})"


ZERO = CnfOrdinal()
ONE = CnfOrdinal(((ZERO, 1),))
OMEGA = CnfOrdinal(((ONE, 1),))


def format_cnf(a: CnfOrdinal) -> str:
    if a.is_zero:
        return "0"
    parts = []
    for e, k in a.terms:
        if e.is_zero:
            parts.append(str(k))
            continue
        if e == ONE:
            base = "ω"
        else:
            inner = format_cnf(e)
            atomic = inner.isdigit() or inner == "ω"
            base = f"ω^{inner}" if atomic else f"ω^({inner})"
        parts.append(base if k == 1 else f"{base}*{k}")
    return "+".join(parts)


_TOKEN = re.compile(r"\s*(\d+|ω|w|\^|\*|\+|\(|\))")


def parse_cnf(text: str) -> CnfOrdinal:
    """Inverse of :func:`format_cnf`; ``w`` is accepted for ``ω``.

    Terms need not be in normal form on input (``1+ω`` parses as ``ω``).
    """
    tokens, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"bad ordinal syntax at {text[pos:]!r}")
        tokens.append("ω" if m.group(1) == "w" else m.group(1))
        pos = m.end()
    if not tokens:
        raise ValueError("empty ordinal")

    def expr(i: int) -> tuple[CnfOrdinal, int]:
        total, i = term(i)
        while i < len(tokens) and tokens[i] == "+":
            t, i = term(i + 1)
            total = total + t
        return total, i

    def atom(i: int) -> tuple[CnfOrdinal, int]:
        if i >= len(tokens):
            raise ValueError("truncated ordinal")
        tok = tokens[i]
        if tok.isdigit():
            return CnfOrdinal.of(int(tok)), i + 1
        if tok == "(":
            v, i = expr(i + 1)
            if i >= len(tokens) or tokens[i] != ")":
                raise ValueError("unbalanced parenthesis")
            return v, i + 1
        if tok == "ω":
            if i + 1 < len(tokens) and tokens[i + 1] == "^":
                e, i = atom(i + 2)
                return CnfOrdinal.omega_power(e), i
            return OMEGA, i + 1
        raise ValueError(f"unexpected {tok!r}")

    def term(i: int) -> tuple[CnfOrdinal, int]:
        if i < len(tokens) and tokens[i] == "ω":
            i += 1
            exponent = ONE
            if i < len(tokens) and tokens[i] == "^":
                exponent, i = atom(i + 1)
            value = CnfOrdinal.omega_power(exponent)
        else:
            value, i = atom(i)
            if value.finite is None:
                return value, i
            if i < len(tokens) and tokens[i] == "*":
                raise ValueError("a finite factor cannot be multiplied")
            return value, i
        if i < len(tokens) and tokens[i] == "*":
            if i + 1 >= len(tokens) or not tokens[i + 1].isdigit():
                raise ValueError("coefficient must be a natural")
            k = int(tokens[i + 1])
            i += 2
            value = CnfOrdinal.omega_power(exponent, k) if k else ZERO
        return value, i

    value, i = expr(0)
    if i != len(tokens):
        raise ValueError(f"trailing input in {text!r}")
    return value
