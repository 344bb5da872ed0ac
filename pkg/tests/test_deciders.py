import pytest

from sigmalab.deciders import (BackwardReasoning, ClosedTapeLanguage, Cycler, NGramCPS,
                               PushdownClosure, TranslatedCycler, certificate_from_dict,
                               check_certificate, decide_backward_reasoning, decide_ctl,
                               decide_cycler, decide_ngram_cps, decide_pushdown,
                               decide_translated_cycler, iter_dfas, mirror)
from sigmalab.search import Halts, search_class
from sigmalab.tm import FuelExhausted, parse_machine, run

BOUNCE = parse_machine("1RB1RB_0LA1LA")      # shuttles between two cells
RIGHTWARD = parse_machine("0RA0RA")          # walks right over blanks forever
CHAMPION22 = parse_machine("1RB1LB_1LA1RZ")


def test_cycler_on_bounded_bouncer():
    c = decide_cycler(BOUNCE, 100)
    assert isinstance(c, Cycler) and c.period >= 1
    assert check_certificate(BOUNCE, c)


def test_move_right_is_translated_not_exact():
    assert decide_cycler(RIGHTWARD, 100) is None
    c = decide_translated_cycler(RIGHTWARD, 100)
    assert c == TranslatedCycler(0, 1, 1)
    assert check_certificate(RIGHTWARD, c)


def test_halting_machine_gets_no_certificate():
    for decide in (decide_cycler, decide_translated_cycler, decide_backward_reasoning,
                   decide_ngram_cps, decide_ctl, decide_pushdown):
        assert decide(CHAMPION22, 1000) is None


def test_checker_rejects_false_claims():
    assert not check_certificate(CHAMPION22, Cycler(0, 5))
    assert not check_certificate(CHAMPION22, TranslatedCycler(0, 1, 1))
    assert not check_certificate(CHAMPION22, BackwardReasoning(3))
    assert not check_certificate(CHAMPION22, NGramCPS(2))
    assert not check_certificate(RIGHTWARD, Cycler(0, 1))
    assert not check_certificate(BOUNCE, TranslatedCycler(0, 2, 3))


def test_checker_rejects_wrong_period():
    c = decide_cycler(BOUNCE, 100)
    assert not check_certificate(BOUNCE, Cycler(c.start_step, c.period + 1))


def test_drifting_machine_needs_the_translated_cycler():
    m = parse_machine("1LB0RA_1RA1LB")
    assert isinstance(run(m, 0, 10_000), FuelExhausted)
    assert decide_cycler(m, 2000) is None
    c = decide_translated_cycler(m, 2000)
    assert c is not None and c.period == 3 and c.shift == 1
    assert check_certificate(m, c)


@pytest.mark.parametrize("text, decide, expected", [
    ("0RB0LA_0LC1RA_1LA1RZ", decide_backward_reasoning, BackwardReasoning(2)),
    ("1RB1RZ_0LC1RB_1LA1LC", decide_ngram_cps, NGramCPS(2)),
])
def test_heavier_deciders_on_3x2_machines(text, decide, expected):
    m = parse_machine(text)
    assert isinstance(run(m, 0, 100_000), FuelExhausted)
    assert decide_translated_cycler(m, 1000) is None
    c = decide(m, 1000)
    assert c == expected
    assert check_certificate(m, c)


def test_ctl_on_parity_bouncer():
    m = parse_machine("1RB1LC_1LC1RB_1RZ1LA")
    assert isinstance(run(m, 0, 100_000), FuelExhausted)
    assert decide_ngram_cps(m, 1000) is None
    c = decide_ctl(m, 1000)
    assert isinstance(c, ClosedTapeLanguage)
    assert check_certificate(m, c)
    # the trivial language (everything) contains halting configurations
    assert not check_certificate(m, ClosedTapeLanguage((0, 0), (0, 0)))


def test_certificate_dict_round_trip():
    certs = [Cycler(3, 4), TranslatedCycler(1, 2, -3), BackwardReasoning(5), NGramCPS(2),
             ClosedTapeLanguage((0, 1, 1, 0), (0, 0)), PushdownClosure((0, 1, 1, 0), True)]
    for c in certs:
        assert certificate_from_dict(c.to_dict()) == c


def test_dfa_counts():
    assert [sum(1 for _ in iter_dfas(n, 2)) for n in (1, 2, 3)] == [1, 4, 45]


@pytest.mark.parametrize("name", ["cycler", "translated_cycler"])
def test_certificates_with_input(name):
    from sigmalab.deciders import DECIDERS
    c = DECIDERS[name](RIGHTWARD, 100, 3)
    if c is not None:
        assert check_certificate(RIGHTWARD, c, 3)


# (4,2) counters that no closed tape language with 4-state DFAs settles
COUNTERS = ["0RB1LD_1LC1RD_0RA0LC_1RB1RZ", "0RB0LB_1LC1RB_1LA0LD_1RZ0RB",
            "0RB0LA_1LC1RC_1LA1RD_1RA1RZ", "0RB1RB_1LC1RD_1RA0LA_1RZ1RA"]


@pytest.mark.parametrize("text", COUNTERS)
def test_pushdown_on_counters(text):
    m = parse_machine(text)
    assert isinstance(run(m, 0, 10 ** 5), FuelExhausted)
    assert decide_ctl(m, 1000, max_pairs=10_000) is None
    c = decide_pushdown(m, 1000)
    assert isinstance(c, PushdownClosure)
    assert check_certificate(m, c)


def test_pushdown_leaves_hard_machine_open():
    assert decide_pushdown(parse_machine("0RB1RZ_1LC0RD_1LD0LB_1RB1LA"), 1000) is None


def test_pushdown_never_certifies_halting_machines():
    halting = [r.machine for r in search_class(2, 3) if isinstance(r.verdict, Halts)]
    assert len(halting) > 1000
    for m in halting[::3]:
        assert decide_pushdown(m, 0, max_dfa_states=3) is None


def test_pushdown_checker_rejections():
    m = parse_machine(COUNTERS[0])
    c = decide_pushdown(m, 1000)
    assert not check_certificate(m, PushdownClosure(c.left, not c.mirrored))
    assert not check_certificate(m, PushdownClosure(c.left, True), 2)
    assert not check_certificate(m, PushdownClosure((1, 0, 0, 0)))   # blank end must loop
    assert not check_certificate(m, PushdownClosure((0, 0, 0, 7)))
    assert not check_certificate(CHAMPION22, PushdownClosure((0, 0)))


def test_pushdown_with_input():
    # walks right through the input and then forever over blanks
    assert check_certificate(RIGHTWARD, decide_pushdown(RIGHTWARD, 100, 3), 3)
    # halts on the first input one, runs right forever on blank tape
    stop = parse_machine("1RB1RZ_0RB1RZ")
    assert run(stop, 2, 100).steps == 2
    assert decide_pushdown(stop, 100, 2) is None
    c = decide_pushdown(stop, 100)
    assert check_certificate(stop, c) and not check_certificate(stop, c, 2)


def test_mirror_is_an_involution():
    m = parse_machine(COUNTERS[1])
    assert mirror(mirror(m)) == m
    assert mirror(m) != m
