from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from npbrane.errors import ParseError, PoleError
from npbrane.randgen import Gen
from npbrane.scalarfield import Chart, parse_scalar


def test_normalize_cancels():
    ch = Chart(2)
    assert parse_scalar(ch, "x1*x2 - x2*x1").is_zero()


def test_normalize_already_reduced():
    ch = Chart(4)
    f = parse_scalar(ch, "1/(1+x4)")
    assert f.num == ch.one().num and f.den == (ch.one() + ch.coord(4)).num


def test_normalize_gcd():
    ch = Chart(1)
    assert parse_scalar(ch, "(x1^2-1)/(x1-1)") == ch.coord(1) + 1


def test_division_by_zero_polynomial():
    with pytest.raises(ZeroDivisionError):
        parse_scalar(Chart(2), "x1/(x2 - x2)")


@pytest.mark.parametrize("text", ["x1 +", "x9", "2.5*x1", "x1^x2", "sin(x1)"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_scalar(Chart(2), text)


def test_partials():
    ch = Chart(4)
    x1, x2, x4 = ch.coord(1), ch.coord(2), ch.coord(4)
    assert (x1 ** 2 * x2).partial(1) == 2 * x1 * x2
    assert (1 / (1 + x4)).partial(4) == -1 / (1 + x4) ** 2
    assert x1.partial(2).is_zero()


def test_eval():
    ch4, ch3 = Chart(4), Chart(3)
    assert parse_scalar(ch4, "1/(1+x4)").eval([0, 0, 0, 0]) == 1
    assert parse_scalar(ch3, "x1*x2").eval([2, 3, 0]) == 6
    with pytest.raises(PoleError):
        parse_scalar(ch3, "1/x1").eval([0, 1, 1])


def test_str_round_trip():
    ch = Chart(3)
    f = parse_scalar(ch, "(3/2*x1^2 - x3)/(2 + x2*x3)")
    assert parse_scalar(ch, str(f)) == f


seeds = st.integers(min_value=0, max_value=2**32)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_field_axioms(seed):
    G = Gen(seed)
    ch = Chart(3)
    a, b, c = G.rational(ch), G.rational(ch), G.poly(ch)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a / b) * b == a


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_partials_commute(seed, i, j):
    f = Gen(seed).rational(Chart(3), 2)
    assert f.partial(i).partial(j) == f.partial(j).partial(i)


@settings(max_examples=60, deadline=None)
@given(seeds, st.lists(st.fractions(min_value=-10, max_value=10, max_denominator=5), min_size=3, max_size=3))
def test_eval_is_ring_homomorphism(seed, pt):
    G = Gen(seed)
    ch = Chart(3)
    f, g = G.poly(ch), G.poly(ch)
    assert (f * g).eval(pt) == f.eval(pt) * g.eval(pt)
    assert (f - g).eval(pt) == f.eval(pt) - g.eval(pt)
    assert isinstance((f + g).eval(pt), Fraction)
