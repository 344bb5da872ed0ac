import pytest

from sigmalab.search import Halts, SearchPolicy, busy_beaver, classify
from sigmalab.sigma import (SigmaRow, iter_sigma_steps, iter_sigma_value, relate_sigmas,
                            sigma_steps, sigma_value)
from sigmalab.tm import class_range, decode_machine, run


def test_first_code():
    m = decode_machine(0)
    v = classify(m)
    assert sigma_steps(0) == SigmaRow(0, v.steps if isinstance(v, Halts) else 0, True)
    assert sigma_value(0).i == 0


def test_steps_monotone_on_prefixes():
    rows = list(iter_sigma_steps(999))
    assert [r.i for r in rows] == list(range(1000))
    assert all(a.value <= b.value for a, b in zip(rows, rows[1:]))
    assert all(r.exact for r in rows)


def test_value_monotone_on_prefixes():
    rows = list(iter_sigma_value(120))
    assert all(a.value <= b.value for a, b in zip(rows, rows[1:]))
    assert rows[-1] == sigma_value(120)


def test_steps_over_the_2x2_block():
    last = class_range(2, 2)[-1]
    row = sigma_steps(last)
    assert row == SigmaRow(last, 6, True)
    assert row.value == busy_beaver(2, 2).S


def test_blank_input_scores_over_the_2x2_block():
    best = 0
    for code in class_range(2, 2):
        v = classify(decode_machine(code), SearchPolicy(deciders=("cycler", "translated_cycler")))
        assert not isinstance(v, type(None))
        if isinstance(v, Halts):
            best = max(best, v.score)
    assert best == busy_beaver(2, 2).Sigma == 4


def test_value_tracks_input_then_exceeds_it():
    # from code 8 on, some machine halts keeping its input; code 40 is the first
    # to add a one (recorded from the enumeration)
    rows = list(iter_sigma_value(40))
    assert all(r.value == r.i for r in rows[8:40])
    assert rows[40].value == 41


@pytest.mark.parametrize("i", [0, 5, 63, 100])
def test_relate_sigmas(i):
    rep = relate_sigmas(i)
    assert rep.runs == (i + 1) ** 2
    assert rep.exact
    assert rep.dominance
    assert rep.score_bound_violations == 0
    assert rep.sigma_steps == sigma_steps(i).value
    assert rep.sigma_value == sigma_value(i).value
    assert rep.to_dict()["exact"] is True


def test_inexact_when_holdouts():
    weak = SearchPolicy(fuel=(1,), deciders=())
    rows = list(iter_sigma_steps(200, weak))
    assert not rows[-1].exact
    # exactness is lost for good once a holdout appears
    flags = [r.exact for r in rows]
    assert flags == sorted(flags, reverse=True)


def test_halting_runs_replay():
    for code in range(64, 400):
        m = decode_machine(code)
        v = classify(m)
        if isinstance(v, Halts):
            r = run(m, 0, v.steps)
            assert (r.steps, r.score) == (v.steps, v.score)
