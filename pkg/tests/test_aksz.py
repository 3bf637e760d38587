from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from npbrane import aksz as ak
from npbrane import bvgraded as bv
from npbrane.exterior import FORM, VECTOR, AltTensor
from npbrane.randgen import Gen
from npbrane.scalarfield import Chart
from npbrane.suites import _random_homogeneous

GOLDEN = Path(__file__).parent / "golden"
seeds = st.integers(min_value=0, max_value=2**32)


def V(ch, idx, coeff=1):
    return AltTensor.basis(ch, idx, VECTOR, coeff)


def F(ch, idx, coeff=1):
    return AltTensor.basis(ch, idx, FORM, coeff)


def golden_actions():
    """The three model actions plus the on-shell target, with fixed data."""
    c2, c3, c4 = Chart(2), Chart(3), Chart(4)
    x = c3.coord
    return {
        "poisson": ak.build_action(ak.POISSON_MODEL, 1, c2, pi=V(c2, (1, 2), 1 + c2.coord(1) * c2.coord(2))),
        "membrane": ak.build_action(ak.MEMBRANE_MODEL, 2, c3, pi=V(c3, (1, 2), x(3)), c=F(c3, (1, 2, 3))),
        "pbrane": ak.build_action(ak.PBRANE_MODEL, 3, c4, pi=V(c4, (1, 2, 3), c4.coord(4)),
                                  c=F(c4, (1, 2, 3, 4))),
        "np-sigma": ak.build_action(ak.NP_SIGMA, 3, c4, pi=V(c4, (1, 2, 3), c4.coord(4)),
                                    c=F(c4, (1, 2, 3, 4))),
    }


@pytest.mark.parametrize("name", ["poisson", "membrane", "pbrane", "np-sigma"])
@pytest.mark.parametrize("style", ["plain", "latex"])
def test_golden_emission(name, style):
    A = golden_actions()[name]
    text = ak.emit_text(A, style)
    assert text == ak.emit_text(golden_actions()[name], style)
    suffix = "txt" if style == "plain" else "tex"
    assert text == (GOLDEN / f"{name}.{suffix}").read_text()


def test_emit_empty():
    sa = ak.superalgebra(ak.MEMBRANE_MODEL, 2, Chart(2))
    assert ak.emit_text(ak.ActionPair(sa, sa.zero(), sa.zero())) == ""


@pytest.mark.parametrize("model,p", [(ak.POISSON_MODEL, 1), (ak.MEMBRANE_MODEL, 2), (ak.MEMBRANE_MODEL, 3),
                                     (ak.PBRANE_MODEL, 2), (ak.PBRANE_MODEL, 3)])
def test_D_and_homotopy(model, p):
    G = Gen(p)
    sa = ak.superalgebra(model, p, Chart(3))
    for deg in range(1, p + 3):
        f = _random_homogeneous(G, sa, deg, False)
        assert ak.D(sa, ak.D(sa, f)).is_zero()
        h = ak.homotopy(sa, f)
        assert ak.homotopy(sa, h).is_zero()
        g = _random_homogeneous(G, sa, deg, True)
        # D h + h D = 1 on superfield words
        assert ak.D(sa, ak.homotopy(sa, g)) + ak.homotopy(sa, ak.D(sa, g)) == g


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_D_is_graded_derivation(seed, a, b):
    G = Gen(seed)
    sa = ak.superalgebra(ak.PBRANE_MODEL, 3, Chart(3))
    f, g = _random_homogeneous(G, sa, a, False), _random_homogeneous(G, sa, b, False)
    sign = -1 if a % 2 else 1
    assert ak.D(sa, f * g) == ak.D(sa, f) * g + (f * ak.D(sa, g)).scale(sign)


def test_build_action_shapes():
    c4 = Chart(4)
    A = ak.build_action(ak.PBRANE_MODEL, 3, c4, c=F(c4, (1, 2, 3, 4), c4.coord(1)))
    assert A.boundary.is_zero() and not ak.interaction_part(A).is_zero()
    warn = []
    ak.build_action(ak.PBRANE_MODEL, 3, Chart(6), pi=V(Chart(6), (1, 2, 3)) + V(Chart(6), (4, 5, 6)), warnings=warn)
    assert warn
    with pytest.raises(ValueError):
        ak.build_action(ak.PBRANE_MODEL, 3, c4, c=F(c4, (1, 2, 3)))
    with pytest.raises(ValueError):
        ak.build_action("nonsense", 3, c4)


def test_eom_removes_auxiliary_fields():
    c4 = Chart(4)
    A = ak.eom_substitute(ak.build_action(ak.PBRANE_MODEL, 3, c4, pi=V(c4, (1, 2, 3)), c=F(c4, (1, 2, 3, 4))))
    names = {A.sa.alg.gens[k].name for w in list(A.bulk.terms) + list(A.boundary.terms) for k in w}
    assert not names & {"F", "G", "DF", "DG", "psi", "eta"}


def test_ibp_examples():
    sa = ak.superalgebra(ak.MEMBRANE_MODEL, 2, Chart(3))
    A = ak.ActionPair(sa, sa.s("DX", 1) * sa.s("Dchi", 1), sa.zero())
    r = ak.ibp_normalize(A)
    # D(chi DX) = Dchi DX = DX Dchi, and chi DX = -DX chi
    assert r.bulk.is_zero() and r.boundary == -(sa.s("DX", 1) * sa.s("chi", 1))
    beta = sa.s("chi", 2) * sa.s("DX", 1)
    r = ak.ibp_normalize(ak.ActionPair(sa, sa.zero(), beta))
    assert r.bulk.is_zero() and r.boundary == beta
    sp = ak.superalgebra(ak.PBRANE_MODEL, 3, Chart(4))
    A = ak.ActionPair(sp, sp.s("DX", 1) * sp.s("DX", 2) * sp.s("DA", (1, 2)), sp.zero())
    r = ak.ibp_normalize(A)
    assert r.bulk.is_zero() and r.boundary == sp.s("DX", 1) * sp.s("DX", 2) * sp.s("A", (1, 2))


def test_ibp_idempotent():
    A = golden_actions()["pbrane"]
    once = ak.ibp_normalize(A)
    assert ak.ibp_normalize(once).same_terms(once)


def test_on_shell_equalities():
    c4 = Chart(4)
    pi, c = V(c4, (1, 2, 3), c4.coord(4)), F(c4, (1, 2, 3, 4))
    lhs = ak.eom_substitute(ak.build_action(ak.PBRANE_MODEL, 3, c4, pi=pi, c=c))
    rep = ak.actions_equal(lhs, ak.build_action(ak.NP_SIGMA, 3, c4, pi=pi, c=c))
    assert rep and rep.certificate_a is not None
    c3 = Chart(3)
    pi2, c2 = V(c3, (1, 2), c3.coord(3)), F(c3, (1, 2, 3), c3.coord(1))
    lhs = ak.eom_substitute(ak.build_action(ak.MEMBRANE_MODEL, 2, c3, pi=pi2, c=c2))
    assert ak.actions_equal(lhs, ak.build_action(ak.TP_SIGMA, 2, c3, pi=pi2, c=c2))


def test_perturbed_sign_is_detected():
    c4 = Chart(4)
    pi, c = V(c4, (1, 2, 3), c4.coord(4)), F(c4, (1, 2, 3, 4))
    lhs = ak.eom_substitute(ak.build_action(ak.PBRANE_MODEL, 3, c4, pi=pi, c=c))
    target = ak.build_action(ak.NP_SIGMA, 3, c4, pi=pi, c=c)
    sa = target.sa
    flipped = target.boundary - (sa.s("chi", 1) * sa.s("DX", 1)).scale(2)
    rep = ak.actions_equal(lhs, ak.ActionPair(sa, target.bulk, flipped, target.model))
    assert not rep and not rep.boundary_residue.is_zero()


def test_antisymmetry_on_decomposable():
    G = Gen(12)
    ch = Chart(4)
    assert ak.antisymmetry_violations(G.np_tensor(ch, 3, 1)) == []
    ch6 = Chart(6)
    assert ak.antisymmetry_violations(V(ch6, (1, 2, 3)) + V(ch6, (4, 5, 6)))


@pytest.mark.parametrize("p", [2, 3])
def test_classical_limit(p):
    G = Gen(40 + p)
    ch = Chart(p + 1)
    c = G.form(ch, p + 1, 1)
    A = ak.build_action(ak.PBRANE_MODEL, p, ch, c=c)
    gc = A.sa.gc
    assert ak.interaction_part(A) == A.sa.from_target(bv.gamma(gc, c))
