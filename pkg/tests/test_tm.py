import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import naive_run
from sigmalab import _accel
from sigmalab.tm import (HALT, LEFT, RIGHT, Configuration, FuelExhausted, Halted, HaltedAt,
                         Machine, Transition, class_offset, class_range, class_size,
                         decode_machine, encode_machine, format_machine, iter_classes,
                         parse_machine, run, step)

S22_CHAMPION = "1RB1LB_1LA1RZ"
S32_CHAMPION = "1RB1RZ_1LB0RC_1LC1LA"


def test_decode_zero_is_first_one_state_machine():
    m = decode_machine(0)
    assert (m.n_states, m.n_symbols) == (1, 2)
    assert format_machine(m) == "0LA0LA"


def test_class_order():
    assert list(itertools.islice(iter_classes(), 6)) == [(1, 2), (2, 2), (1, 3), (3, 2), (2, 3), (1, 4)]
    assert class_offset(1, 2) == 0
    assert class_offset(2, 2) == class_size(1, 2) == 64
    assert class_range(2, 2) == range(64, 64 + 12 ** 4)


def test_round_trip_first_codes():
    for i in range(10_000):
        assert encode_machine(decode_machine(i)) == i


def test_encode_injective_on_full_2x2_class():
    codes = set()
    for i in class_range(2, 2):
        m = decode_machine(i)
        assert (m.n_states, m.n_symbols) == (2, 2)
        codes.add(encode_machine(m))
    assert len(codes) == class_size(2, 2)


@given(st.integers(min_value=0, max_value=10 ** 30))
def test_round_trip_large_codes(i):
    assert encode_machine(decode_machine(i)) == i


@given(st.integers(min_value=0, max_value=10 ** 12))
def test_text_round_trip(i):
    m = decode_machine(i)
    text = format_machine(m)
    assert format_machine(parse_machine(text)) == text
    assert parse_machine(text) == m


@pytest.mark.parametrize("bad", ["1RB", "1RB1LB_1LA", "2RA0LA", "1XA0LA", "1RC0LA"])
def test_parse_rejects_malformed(bad):
    with pytest.raises(ValueError):
        parse_machine(bad)


def test_machine_invariants_enforced():
    with pytest.raises(ValueError):
        Machine(1, 2, (Transition(1, RIGHT, 0),))
    with pytest.raises(ValueError):
        Machine(1, 2, (Transition(2, RIGHT, 0), Transition(0, LEFT, 0)))


def test_step_halt_entry():
    m = parse_machine("1RZ1RZ")
    out = step(m, Configuration.initial())
    assert isinstance(out, HaltedAt)
    assert out.config.steps_taken == 1
    assert out.config.score() == 1


def test_step_moves_and_writes():
    m = parse_machine("1RA1RA")
    c = step(m, Configuration.initial())
    assert isinstance(c, Configuration)
    assert (c.head, c.state, c.steps_taken, c.score()) == (1, 0, 1, 1)


def test_sixth_step_of_2x2_champion_halts():
    m = parse_machine(S22_CHAMPION)
    c = Configuration.initial()
    for _ in range(5):
        c = step(m, c)
        assert isinstance(c, Configuration)
    assert isinstance(step(m, c), HaltedAt)


def test_run_examples():
    assert run(parse_machine("0RA0RA"), 0, 100) == FuelExhausted(100)
    assert run(parse_machine("1RZ1RZ"), 0, 10) == Halted(1, 1, 1)
    r = run(parse_machine(S32_CHAMPION), 0, 30)
    assert isinstance(r, Halted) and r.steps == 21 and r.score >= 5


def test_run_with_input():
    # step onto the input, cross it, write one more 1 and halt
    m = parse_machine("0RB1RZ_1RZ1RB")
    assert run(m, 4, 100) == Halted(6, 5, 5)


def test_run_rejects_zero_fuel():
    with pytest.raises(ValueError):
        run(parse_machine("1RZ1RZ"), 0, 0)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=class_range(3, 2).stop), st.integers(0, 5),
       st.integers(1, 200))
def test_run_deterministic_and_fuel_monotone(code, x, fuel):
    m = decode_machine(code)
    r = run(m, x, fuel)
    assert r == run(m, x, fuel)
    if isinstance(r, Halted):
        assert r == run(m, x, fuel + 37)
        assert r.steps <= fuel
        assert r.score <= r.steps + x


def _accel_run(m: Machine, x: int, fuel: int):
    w, mv, nx = m.arrays
    buf = np.zeros(_accel.tape_size(fuel, x), np.int8)
    status, steps, _, _, score = _accel.simulate(w, mv, nx, m.n_symbols, x, fuel, buf)
    assert not buf.any()
    if status == _accel.HALTED:
        return Halted(int(steps), int(score), int(score))
    return FuelExhausted(fuel)


@settings(max_examples=300, deadline=None)
@given(st.integers(min_value=0, max_value=class_range(2, 3).stop), st.integers(0, 4),
       st.integers(1, 300))
def test_accelerated_runner_matches_run(code, x, fuel):
    m = decode_machine(code)
    assert _accel_run(m, x, fuel) == run(m, x, fuel)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=class_range(3, 2).stop), st.integers(0, 3))
def test_run_matches_independent_oracle(code, x):
    m = decode_machine(code)
    table = tuple((t.write, t.move, t.next if t.next != HALT else -1) for t in m.table)
    ref = naive_run(table, m.n_symbols, 200, x)
    r = run(m, x, 200)
    if ref is None:
        assert isinstance(r, FuelExhausted)
    else:
        assert (r.steps, r.score) == ref


def test_score_bound_from_blank_over_2x2():
    for code in class_range(2, 2):
        r = run(decode_machine(code), 0, 50)
        if isinstance(r, Halted):
            assert r.score <= r.steps
