"""Code-indexed busy beaver functions.

``sigma_steps(i)`` is the longest halting time from blank tape among machines
with code ``<= i``; ``sigma_value(i)`` the largest output among those machines
on inputs ``<= i``.  Codes are decoded directly (no normal-form reduction),
each run is classified under a :class:`SearchPolicy`, and a value is exact
when no run in its range was left as a holdout.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

from .search import Halts, Holdout, SearchPolicy, Verdict, classify
from .tm import decode_machine


class SigmaRow(NamedTuple):
    i: int
    value: int
    exact: bool


def iter_sigma_steps(code_max: int, policy: SearchPolicy = SearchPolicy()) -> Iterator[SigmaRow]:
    best, exact = 0, True
    for i in range(code_max + 1):
        v = classify(decode_machine(i), policy)
        if isinstance(v, Halts):
            best = max(best, v.steps)
        elif isinstance(v, Holdout):
            exact = False
        yield SigmaRow(i, best, exact)


def sigma_steps(i: int, policy: SearchPolicy = SearchPolicy()) -> SigmaRow:
    for row in iter_sigma_steps(i, policy):
        pass
    return row


@dataclass
class _ValueGrid:
    """Classifications of (code, input) pairs, filled as the square grows."""

    policy: SearchPolicy
    verdicts: dict[tuple[int, int], Verdict] = field(default_factory=dict)

    def get(self, j: int, x: int) -> Verdict:
        key = (j, x)
        if key not in self.verdicts:
            self.verdicts[key] = classify(decode_machine(j), self.policy, x)
        return self.verdicts[key]


def iter_sigma_value(code_max: int, policy: SearchPolicy = SearchPolicy()) -> Iterator[SigmaRow]:
    """Row ``i`` adds machine ``i`` on inputs ``0..i`` and input ``i`` on machines ``< i``."""
    grid = _ValueGrid(policy)
    best, exact = 0, True
    for i in range(code_max + 1):
        cells = [(i, x) for x in range(i + 1)] + [(j, i) for j in range(i)]
        for j, x in cells:
            v = grid.get(j, x)
            if isinstance(v, Halts):
                best = max(best, v.score)
            elif isinstance(v, Holdout):
                exact = False
        yield SigmaRow(i, best, exact)


def sigma_value(i: int, policy: SearchPolicy = SearchPolicy()) -> SigmaRow:
    for row in iter_sigma_value(i, policy):
        pass
    return row


@dataclass(frozen=True)
class RelationReport:
    i: int
    runs: int
    halting_runs: int
    holdouts: int
    score_bound_violations: int     # runs with output > steps + input
    max_excess: int                 # max over halting runs of output - steps - input
    sigma_steps: int
    sigma_value: int
    dominance: bool                 # sigma_value(i) <= sigma_steps(i) + i

    @property
    def exact(self) -> bool:
        return self.holdouts == 0

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__} | {"exact": self.exact}


def relate_sigmas(i: int, policy: SearchPolicy = SearchPolicy()) -> RelationReport:
    """Check the per-run bound ``output <= steps + input`` over codes and inputs
    ``<= i`` and report whether ``sigma_value(i) <= sigma_steps(i) + i``.

    These are observations under this numbering and output convention; they
    do not determine the shifting constant relating the two functions.
    """
    runs = halting = holdouts = violations = 0
    max_excess = None
    s_steps = s_value = 0
    for j in range(i + 1):
        m = decode_machine(j)
        for x in range(i + 1):
            v = classify(m, policy, x)
            runs += 1
            if isinstance(v, Halts):
                halting += 1
                excess = v.score - v.steps - x
                max_excess = excess if max_excess is None else max(max_excess, excess)
                violations += excess > 0
                s_value = max(s_value, v.score)
                if x == 0:
                    s_steps = max(s_steps, v.steps)
            elif isinstance(v, Holdout):
                holdouts += 1
    return RelationReport(i, runs, halting, holdouts, violations,
                          0 if max_excess is None else max_excess,
                          s_steps, s_value, s_value <= s_steps + i)
