import io
import json

import pytest

from sigmalab.kdesc import (Found, NotFoundWithin, Unknown, Yes, constant_index,
                            in_diagonal_halting, incompressibles, k_phi, k_table,
                            write_k_table)
from sigmalab.kernel import Converged, encode_prog, evaluate, identity, parse_prog

# least indices printing x from input 0, recorded from a brute-force scan
# (budget 200000, fuel 200); see test_table_matches_brute_force
K_TABLE = {0: 0, 1: 5, 2: 168, 3: 473, 4: 501, 5: 1449, 6: 2177, 7: 4013, 8: 5553,
           9: 6477, 10: 10652, 11: 12389, 12: 16728, 13: 18873, 14: 29861, 15: 32453}


@pytest.fixture(scope="module")
def table():
    return k_table(range(16), 0, 200_000, 200)


def test_table_matches_brute_force(table):
    assert {x: r.index for x, r in table.items()} == K_TABLE


def test_found_indices_verify_and_are_minimal(table):
    for x, r in table.items():
        assert evaluate(r.index, 0, 200) == Converged(x, r.fuel_used)
        for e in range(r.index):
            out = evaluate(e, 0, 200)
            assert not (isinstance(out, Converged) and out.value == x)


def test_single_queries_agree_with_table(table):
    for x in (0, 3, 7):
        assert k_phi(x, 0, 200_000, 200) == table[x]


def test_identity_witness():
    e_id = encode_prog(identity())
    for x in (0, 5, 12):
        r = k_phi(x, x, 1000, 100)
        assert isinstance(r, Found) and r.index <= e_id


def test_not_found_with_zero_budget():
    assert k_phi(3, 0, 0, 100) == NotFoundWithin(0, 100)


def test_constant_programs_bound_k(table):
    for x, r in table.items():
        c = constant_index(x)
        assert evaluate(c, 0, 100).value == x
        assert r.index <= c


def test_budget_and_fuel_monotonicity():
    small = k_phi(9, 0, 5000, 200)
    assert isinstance(small, NotFoundWithin)
    assert k_phi(9, 0, 7000, 200) == k_phi(9, 0, 20_000, 200)
    # more fuel never raises the least index
    for x in (2, 4, 6):
        low, high = k_phi(x, 0, 10_000, 2), k_phi(x, 0, 10_000, 500)
        if isinstance(low, Found):
            assert isinstance(high, Found) and high.index <= low.index


def test_incompressibles():
    s = incompressibles(15, 200_000, 200)
    assert 0 in s
    assert s == {x for x, e in K_TABLE.items() if e >= x}
    assert incompressibles(15, 200_000, 400) <= incompressibles(15, 200_000, 3)
    assert incompressibles(15, 1000, 200) >= s


def test_diagonal_halting():
    halt = encode_prog(parse_prog("halt"))
    loop = encode_prog(parse_prog("jmp 0"))
    assert isinstance(in_diagonal_halting(halt, 10), Yes)
    for fuel in (10, 1000, 10 ** 5):
        assert in_diagonal_halting(loop, fuel) == Unknown(fuel)


def test_diagonal_halting_count():
    # recorded by direct evaluation
    assert sum(isinstance(in_diagonal_halting(n, 10 ** 4), Yes) for n in range(50)) == 41


def test_yes_stable_under_more_fuel():
    for n in range(50):
        if isinstance(in_diagonal_halting(n, 100), Yes):
            assert isinstance(in_diagonal_halting(n, 10 ** 4), Yes)


def test_export(table):
    buf = io.StringIO()
    write_k_table(table, 0, buf)
    recs = [json.loads(line) for line in buf.getvalue().splitlines()]
    assert recs[3] == {"x": 3, "y": 0, "index": 473, "fuel_used": 3}
    buf = io.StringIO()
    write_k_table(k_table([10 ** 9], 0, 10, 10), 0, buf)
    assert json.loads(buf.getvalue())["index"] is None
