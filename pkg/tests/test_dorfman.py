import pytest
import sympy
from hypothesis import given, settings, strategies as st

from npbrane.dorfman import (Section, TwistData, anchor, basis_sections, dorfman, factor_b_zeta,
                             leibnizator, pairing, twist_b, twist_zeta, zeta_sharp_matrix)
from npbrane.errors import SingularOperator
from npbrane.exterior import FORM, VECTOR, AltTensor, ext_d, interior_v, lie, schouten
from npbrane.randgen import Gen
from npbrane.scalarfield import Chart
from npbrane.suites import random_section

seeds = st.integers(min_value=0, max_value=2**32)


def vec(ch, i, coeff=1):
    return AltTensor.basis(ch, (i,), VECTOR, coeff)


def form(ch, idx, coeff=1):
    return AltTensor.basis(ch, idx, FORM, coeff)


def sec(ch, p, v=None, f=None):
    return Section.make(ch, p, vec=v, form=f)


def test_pairing_examples():
    ch = Chart(3)
    half = ch.const(1) / 2
    assert pairing(sec(ch, 2, vec(ch, 1)), sec(ch, 2, f=form(ch, (1,)))) == AltTensor.scalar(half, FORM)
    e = sec(ch, 3, vec(ch, 1), form(ch, (2, 3)))
    assert pairing(e, e).is_zero()
    e1 = sec(ch, 3, vec(ch, 1), form(ch, (1, 2)))
    assert pairing(e1, sec(ch, 3, vec(ch, 3))).is_zero()
    assert pairing(e1, sec(ch, 3, vec(ch, 2))) == form(ch, (1,), -half)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_pairing_symmetric(seed):
    G = Gen(seed)
    ch = Chart(3)
    e1, e2 = random_section(G, ch, 3), random_section(G, ch, 3)
    assert pairing(e1, e2) == pairing(e2, e1)


def test_order_mismatch():
    ch = Chart(3)
    with pytest.raises(ValueError):
        pairing(sec(ch, 2), sec(ch, 3))
    with pytest.raises(ValueError):
        dorfman(sec(ch, 2), sec(ch, 2), TwistData(c=form(ch, (1, 2))))


def test_anchor():
    ch = Chart(3)
    a = form(ch, (3,))
    assert anchor(sec(ch, 2, vec(ch, 1), a)) == vec(ch, 1)
    assert anchor(sec(ch, 2, f=a)).is_zero()
    assert anchor(sec(ch, 2, vec(ch, 1, ch.coord(2)), a)) == vec(ch, 1, ch.coord(2))


def test_dorfman_examples():
    ch = Chart(3)
    assert dorfman(sec(ch, 2, vec(ch, 1)), sec(ch, 2, vec(ch, 2))).is_zero()
    out = dorfman(sec(ch, 2, vec(ch, 1)), sec(ch, 2, vec(ch, 2), form(ch, (3,), ch.coord(1))))
    assert out == sec(ch, 2, f=form(ch, (3,)))
    c = form(ch, (1, 2, 3))
    out = dorfman(sec(ch, 2, vec(ch, 1)), sec(ch, 2, vec(ch, 2)), TwistData(c=c))
    assert out == sec(ch, 2, f=form(ch, (3,)))


@settings(max_examples=15, deadline=None)
@given(seeds, st.integers(2, 3))
def test_bracket_formula(seed, p):
    G = Gen(seed)
    ch = Chart(4)
    e1, e2 = random_section(G, ch, p, 1), random_section(G, ch, p, 1)
    out = dorfman(e1, e2)
    assert out.vec == schouten(e1.vec, e2.vec)
    assert out.form == lie(e1.vec, e2.form) - interior_v(e2.vec, ext_d(e1.form))


def test_leibnizator_examples():
    G = Gen(1)
    ch = Chart(4)
    consts = [sec(ch, 2, G.vector(ch, 1, 0), G.form(ch, 1, 0)) for _ in range(3)]
    assert leibnizator(*consts).is_zero()
    tw = TwistData(c=form(ch, (1, 2, 3)))
    es = [random_section(G, ch, 2, 1) for _ in range(3)]
    assert leibnizator(*es, tw).is_zero()
    bad = TwistData(c=form(ch, (2, 3, 4), ch.coord(1)))
    assert not leibnizator(vec_sec(ch, 2), vec_sec(ch, 3), vec_sec(ch, 4), bad).is_zero()


def vec_sec(ch, i):
    return sec(ch, 2, vec(ch, i))


@settings(max_examples=10, deadline=None)
@given(seeds, st.integers(2, 3))
def test_leibniz_iff_closed(seed, p):
    G = Gen(seed)
    ch = Chart(p + 2)
    c = G.closed_form(ch, p + 1, 2)
    es = [random_section(G, ch, p, 1) for _ in range(3)]
    assert leibnizator(*es, TwistData(c=c)).is_zero()
    c_bad = G.form(ch, p + 1, 2, 1.0)
    if ext_d(c_bad).is_zero():
        return
    ch_vecs = [sec(ch, p, vec(ch, i)) for i in range(1, ch.dim + 1)]
    found = any(not leibnizator(a, b, d, TwistData(c=c_bad)).is_zero()
                for a in ch_vecs for b in ch_vecs for d in ch_vecs)
    assert found


def test_twist_examples():
    ch = Chart(3)
    b = form(ch, (1, 2))
    assert twist_b(b, sec(ch, 2, vec(ch, 1))) == sec(ch, 2, vec(ch, 1), form(ch, (2,)))
    z = AltTensor.basis(ch, (1, 2), VECTOR, 1)
    # i_{dx2} (d1 ^ d2) contracts the first slot
    assert twist_zeta(z, sec(ch, 2, f=form(ch, (2,)))) == sec(ch, 2, vec(ch, 1, -1), form(ch, (2,)))


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_twists_invertible(seed):
    G = Gen(seed)
    ch = Chart(4)
    e = random_section(G, ch, 3)
    b, z = G.form(ch, 3), G.vector(ch, 3)
    assert twist_b(-b, twist_b(b, e)) == e
    assert twist_zeta(-z, twist_zeta(z, e)) == e


@settings(max_examples=10, deadline=None)
@given(seeds, st.integers(2, 3))
def test_b_twist_intertwines(seed, p):
    G = Gen(seed)
    ch = Chart(p + 1)
    c, b = G.form(ch, p + 1, 1), G.form(ch, p, 1)
    e1, e2 = random_section(G, ch, p, 1), random_section(G, ch, p, 1)
    lhs = twist_b(b, dorfman(e1, e2, TwistData(c=c + ext_d(b))))
    rhs = dorfman(twist_b(b, e1), twist_b(b, e2), TwistData(c=c))
    assert lhs == rhs


def test_zeta_twist_is_conjugation():
    G = Gen(4)
    ch = Chart(3)
    z = G.vector(ch, 2, 1)
    e1, e2 = random_section(G, ch, 2, 1), random_section(G, ch, 2, 1)
    lhs = twist_zeta(z, dorfman(e1, e2, TwistData(zeta=z)))
    assert lhs == dorfman(twist_zeta(z, e1), twist_zeta(z, e2))


def _sympy_matrix(M):
    x = sympy.symbols("x1:10")
    return sympy.Matrix([[sympy.sympify(str(v), locals={f"x{i + 1}": x[i] for i in range(9)})
                          for v in row] for row in M])


def test_factorization_example():
    ch = Chart(3)
    x3 = ch.coord(3)
    z = AltTensor.basis(ch, (1, 2), VECTOR, 1)
    fac = factor_b_zeta(form(ch, (1, 2), x3), z)
    assert fac.verified
    # first-slot contractions give b_flat zeta_sharp = -x3 on dx1, dx2
    expected = [[v / (1 - x3) for v in row] for row in zeta_sharp_matrix(z)]
    assert fac.zeta_prime == expected
    fac2 = factor_b_zeta(form(ch, (1, 2), -x3), z)
    assert fac2.zeta_prime == [[v / (1 + x3) for v in row] for row in zeta_sharp_matrix(z)]


def test_factorization_limits():
    G = Gen(9)
    ch = Chart(3)
    z, b = G.vector(ch, 2, 1), G.form(ch, 2, 1)
    fac = factor_b_zeta(AltTensor(ch, 2, FORM), z)
    assert fac.zeta_prime == zeta_sharp_matrix(z) and fac.verified
    fac = factor_b_zeta(b, AltTensor(ch, 2, VECTOR))
    assert all(not v for row in fac.zeta_prime for v in row)
    for e in basis_sections(ch, 2):
        assert fac.apply_bz(e) == twist_b(b, e)


@settings(max_examples=8, deadline=None)
@given(seeds)
def test_factorization_matches_sympy_inverse(seed):
    G = Gen(seed)
    ch = Chart(3)
    z, b = G.vector(ch, 2, 1), G.form(ch, 2, 1)
    fac = factor_b_zeta(b, z)
    assert fac.verified
    M = _sympy_matrix(fac.form_block)
    Z = _sympy_matrix(zeta_sharp_matrix(z))
    assert sympy.simplify(_sympy_matrix(fac.zeta_prime) * M - Z) == sympy.zeros(*Z.shape)


def test_factorization_singular():
    ch = Chart(2)
    z = AltTensor.basis(ch, (1, 2), VECTOR, 1)
    b = AltTensor.basis(ch, (1, 2), FORM, 1)
    with pytest.raises(SingularOperator):
        factor_b_zeta(b, z)
