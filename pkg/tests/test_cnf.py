import pytest
from hypothesis import given
from hypothesis import strategies as st

from sigmalab.cnf import OMEGA, ONE, ZERO, CnfOrdinal, format_cnf, parse_cnf


def _ordinals(depth=2):
    base = st.integers(0, 6).map(CnfOrdinal.of)
    if depth == 0:
        return base

    @st.composite
    def build(draw):
        exps = sorted(set(draw(st.lists(_ordinals(depth - 1), max_size=3))), reverse=True)
        return CnfOrdinal(tuple((e, draw(st.integers(1, 4))) for e in exps))
    return st.one_of(base, build())


def test_formatting():
    assert format_cnf(ZERO) == "0"
    assert format_cnf(OMEGA) == "ω"
    w2 = CnfOrdinal.omega_power(CnfOrdinal.of(2), 3)
    assert format_cnf(w2 + OMEGA + 5) == "ω^2*3+ω+5"
    assert format_cnf(CnfOrdinal.omega_power(OMEGA + 1)) == "ω^(ω+1)"


def test_parse_variants():
    assert parse_cnf("w*2+3") == OMEGA + OMEGA + 3
    assert parse_cnf("1+ω") == OMEGA
    www = parse_cnf("ω^ω^ω")
    assert www == CnfOrdinal.omega_power(CnfOrdinal.omega_power(OMEGA))
    for bad in ("", "ω^", "3+*"):
        with pytest.raises(ValueError):
            parse_cnf(bad)


def test_kinds():
    assert ZERO.is_zero and not ZERO.is_limit
    assert ONE.is_successor and ONE.finite == 1
    assert OMEGA.is_limit and OMEGA.finite is None
    assert (OMEGA + 1).is_successor


def test_addition_absorbs_left():
    assert 3 + OMEGA == OMEGA
    assert OMEGA + 3 > OMEGA
    assert CnfOrdinal.of(2) + CnfOrdinal.of(3) == CnfOrdinal.of(5)


def test_invalid_terms():
    with pytest.raises(ValueError):
        CnfOrdinal(((ZERO, 0),))
    with pytest.raises(ValueError):
        CnfOrdinal(((ZERO, 1), (ONE, 1)))


@given(_ordinals())
def test_round_trip(a):
    assert parse_cnf(format_cnf(a)) == a


@given(_ordinals(), _ordinals(), _ordinals())
def test_order_and_addition_laws(a, b, c):
    assert (a < b) + (a == b) + (b < a) == 1
    assert (a + b) + c == a + (b + c)
    assert a <= a + b and b <= a + b
    assert a < a + 1
    if b < c:
        assert a + b < a + c
