"""Descriptional complexity over the kernel numbering, approximated by
exhaustive index scans under explicit budgets."""
from __future__ import annotations

import json
from typing import IO, Iterable, NamedTuple, Union

from .kernel import Converged, constant, encode_prog, evaluate


class Found(NamedTuple):
    index: int
    fuel_used: int


class NotFoundWithin(NamedTuple):
    index_budget: int
    fuel: int


KResult = Union[Found, NotFoundWithin]


def k_phi(x: int, y: int = 0, index_budget: int = 100_000, fuel: int = 1000) -> KResult:
    """Least ``e <= index_budget`` with ``phi_e(y) = x`` within ``fuel``.

    Raising the budget never changes a Found index.  Raising the fuel can only
    lower it: a smaller program that was cut off may now converge to ``x``.
    """
    if fuel < 1:
        raise ValueError("fuel must be >= 1")
    for e in range(index_budget + 1):
        r = evaluate(e, y, fuel)
        if isinstance(r, Converged) and r.value == x:
            return Found(e, r.fuel_used)
    return NotFoundWithin(index_budget, fuel)


def k_table(xs: Iterable[int], y: int = 0, index_budget: int = 100_000,
            fuel: int = 1000) -> dict[int, KResult]:
    """:func:`k_phi` for many targets with a single scan."""
    todo = set(xs)
    out: dict[int, KResult] = {}
    for e in range(index_budget + 1):
        if not todo:
            break
        r = evaluate(e, y, fuel)
        if isinstance(r, Converged) and r.value in todo:
            out[r.value] = Found(e, r.fuel_used)
            todo.discard(r.value)
    for x in todo:
        out[x] = NotFoundWithin(index_budget, fuel)
    return dict(sorted(out.items()))


def constant_index(x: int) -> int:
    """Index of a program printing ``x``; an upper bound on ``K_phi(x)``."""
    return encode_prog(constant(x))


def incompressibles(bound: int, index_budget: int = 100_000, fuel: int = 1000) -> set[int]:
    """``{x <= bound : K_phi(x) >= x}`` where an unfound x counts as incompressible.

    Truncated scans over-estimate K, so this is a superset of the true set and
    shrinks as either budget grows.
    """
    table = k_table(range(bound + 1), 0, index_budget, fuel)
    return {x for x, r in table.items() if not isinstance(r, Found) or r.index >= x}


class Yes(NamedTuple):
    fuel_used: int


class Unknown(NamedTuple):
    fuel: int


def in_diagonal_halting(n: int, fuel: int = 10_000) -> Yes | Unknown:
    """Semi-decide ``phi_n(n)`` converging."""
    r = evaluate(n, n, fuel)
    return Yes(r.fuel_used) if isinstance(r, Converged) else Unknown(fuel)


def write_k_table(table: dict[int, KResult], y: int, fh: IO[str]) -> None:
    """Line-delimited records ``{x, y, index, fuel_used}``; misses carry null index."""
    for x, r in table.items():
        if isinstance(r, Found):
            rec = {"x": x, "y": y, "index": r.index, "fuel_used": r.fuel_used}
        else:
            rec = {"x": x, "y": y, "index": None, "fuel_used": None,
                   "index_budget": r.index_budget, "fuel": r.fuel}
        fh.write(json.dumps(rec) + "\n")
