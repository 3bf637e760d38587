"""Named randomized property suites, shared by the CLI and the tests.

Every instance draws from its own generator derived from
``(seed, suite, instance)``, so reports do not depend on execution order.
A check returns ``None`` on success or a JSON-friendly witness.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import aksz
from . import matrix as mx
from . import bvgraded as bv
from .dorfman import (Section, TwistData, dorfman, factor_b_zeta, leibnizator, pairing,
                      twist_b)
from .errors import SingularOperator
from .exterior import (FORM, VECTOR, AltTensor, apply_vf, decomposable, ext_d, lie, schouten, sharp_matrix,
                       wedge)
from .nambu import (check_alg, check_diff, fi_probe_verdict, fi_report, gauge_transform, graph_verdict,
                    intrinsic_verdict, twisted_poisson_defect)
from .randgen import Gen
from .scalarfield import Chart
from .swflow import ode_defect

MAX_SEED = 2**64


def instance_gen(seed: int, suite: str, k: int) -> Gen:
    if not -(2**63) <= seed < MAX_SEED:
        raise OverflowError("seed must fit in 64 bits")
    h = hashlib.sha256(f"{seed}:{suite}:{k}".encode()).digest()
    return Gen(int.from_bytes(h[:8], "big"))


def random_section(G: Gen, chart: Chart, p: int, poly_degree: int = 2) -> Section:
    return Section(G.vector(chart, 1, poly_degree), G.form(chart, p - 1, poly_degree), p)


def _pick(G: Gen, seq):
    return G.rng.choice(list(seq))


# ----- scalarfield ------------------------------------------------------------------

def scalar_field_axioms(G: Gen):
    ch = Chart(3)
    a, b, c = G.rational(ch), G.rational(ch), G.poly(ch)
    if (a * b) * c != a * (b * c) or a * (b + c) != a * b + a * c or (a + b) - b != a:
        return {"a": str(a), "b": str(b), "c": str(c)}
    return None


def scalar_partials_commute(G: Gen):
    ch = Chart(3)
    f = G.rational(ch, 2)
    i, j = G.rng.randint(1, 3), G.rng.randint(1, 3)
    if f.partial(i).partial(j) != f.partial(j).partial(i):
        return {"f": str(f), "i": i, "j": j}
    return None


def scalar_eval_homomorphism(G: Gen):
    ch = Chart(3)
    f, g = G.poly(ch), G.poly(ch)
    pt = [Fraction(G.coeff(), G.coeff(1, 4)) for _ in range(3)]
    if (f * g).eval(pt) != f.eval(pt) * g.eval(pt) or (f + g).eval(pt) != f.eval(pt) + g.eval(pt):
        return {"f": str(f), "g": str(g), "point": [str(v) for v in pt]}
    return None


# ----- exterior ---------------------------------------------------------------------

def exterior_d_squared(G: Gen):
    ch = Chart(4)
    a = G.form(ch, G.rng.randint(0, 2), 3)
    if not ext_d(ext_d(a)).is_zero():
        return {"form": repr(a)}
    return None


def schouten_jacobi(G: Gen):
    ch = Chart(G.rng.randint(2, 4))
    degs = [G.rng.randint(1, min(3, ch.dim)) for _ in range(3)]
    P, Q, R = (G.vector(ch, d, 2, 0.5) for d in degs)
    a, b, c = degs

    def s(x, y):
        return -1 if ((x - 1) * (y - 1)) % 2 else 1

    total = (schouten(P, schouten(Q, R)) * s(a, c) + schouten(Q, schouten(R, P)) * s(b, a)
             + schouten(R, schouten(P, Q)) * s(c, b))
    if not total.is_zero():
        return {"degrees": degs, "P": repr(P), "Q": repr(Q), "R": repr(R)}
    return None


def lie_leibniz(G: Gen):
    ch = Chart(4)
    var = _pick(G, (FORM, VECTOR))
    X = G.vector(ch, 1)
    A = G.tensor(ch, G.rng.randint(0, 2), var)
    B = G.tensor(ch, G.rng.randint(0, 2), var)
    if lie(X, wedge(A, B)) != wedge(lie(X, A), B) + wedge(A, lie(X, B)):
        return {"X": repr(X), "A": repr(A), "B": repr(B)}
    return None


def decomposable_rank(G: Gen):
    ch = Chart(5)
    T = G.product_tensor(ch, 3, 1) if G.rng.random() < 0.5 else G.vector(ch, 3, 1, 0.5)
    if not decomposable(T):
        return None
    M = sharp_matrix(T, 2)
    for _ in range(5):
        pt = [Fraction(G.coeff(), G.coeff(1, 3)) for _ in range(ch.dim)]
        vals = [[e.eval(pt) for e in row] for row in M]
        if mx.fraction_rank(vals) > 3:
            return {"tensor": repr(T), "point": [str(v) for v in pt]}
    return None


# ----- dorfman ----------------------------------------------------------------------

def dorfman_leibniz(G: Gen):
    """Twisted Jacobi identity holds for closed c; fails for c with dc != 0."""
    p = G.rng.randint(2, 3)
    ch = Chart(p + 2)
    closed = G.rng.random() < 0.7
    c = G.closed_form(ch, p + 1, 1) if closed else G.form(ch, p + 1, 1, 0.8)
    es = [random_section(G, ch, p, 1) for _ in range(3)]
    L = leibnizator(*es, TwistData(c=c))
    if closed and not L.is_zero():
        return {"p": p, "c": repr(c)}
    if not closed and not ext_d(c).is_zero():
        # a single triple can miss dc; the basis triples cannot
        if all(leibnizator(*t, TwistData(c=c)).is_zero() for t in _basis_triples(ch, p)):
            return {"p": p, "c": repr(c), "reason": "non-closed c not detected"}
    return None


def _basis_triples(ch: Chart, p: int):
    vecs = [Section.make(ch, p, vec=AltTensor(ch, 1, VECTOR, {(i,): 1})) for i in range(1, ch.dim + 1)]
    return [(a, b, c) for a in vecs for b in vecs for c in vecs]


def dorfman_axioms(G: Gen):
    """Anchor homomorphism, Leibniz in the function slot and pairing invariance."""
    p = G.rng.randint(2, 3)
    ch = Chart(3)
    e1, e2, e3 = (random_section(G, ch, p, 1) for _ in range(3))
    f = G.poly(ch, 2)
    br = dorfman(e1, e2)
    if br.vec != schouten(e1.vec, e2.vec):
        return {"identity": "anchor"}
    lhs = dorfman(e1, e2.scale(f))
    rhs = br.scale(f) + e2.scale(apply_vf(e1.vec, f))
    if not (lhs - rhs).is_zero():
        return {"identity": "leibniz"}
    inv = lie(e1.vec, pairing(e2, e3)) - pairing(br, e3) - pairing(e2, dorfman(e1, e3))
    if not inv.is_zero():
        return {"identity": "pairing-invariance"}
    return None


def dorfman_b_twist(G: Gen):
    p = G.rng.randint(2, 3)
    ch = Chart(3)
    b = G.form(ch, p, 1)
    c = G.form(ch, p + 1, 1)
    e1, e2 = random_section(G, ch, p, 1), random_section(G, ch, p, 1)
    lhs = twist_b(b, dorfman(e1, e2, TwistData(c=c + ext_d(b))))
    rhs = dorfman(twist_b(b, e1), twist_b(b, e2), TwistData(c=c))
    if not (lhs - rhs).is_zero():
        return {"p": p, "b": repr(b), "c": repr(c)}
    return None


def dorfman_factorization(G: Gen):
    p = G.rng.randint(2, 3)
    ch = Chart(G.rng.randint(p, 4))
    b, zeta = G.form(ch, p, 1, 0.5), G.vector(ch, p, 1, 0.5)
    try:
        fac = factor_b_zeta(b, zeta)
    except SingularOperator:
        return None
    if not fac.verified:
        return {"p": p, "b": repr(b), "zeta": repr(zeta)}
    return None


# ----- nambu ------------------------------------------------------------------------

def _np_candidate(G: Gen):
    if G.rng.random() < 0.5:
        return G.np_tensor(Chart(G.rng.randint(4, 5)), 3, 1)
    return G.nondecomposable(Chart(5), 3, 1)


def nambu_verdicts(G: Gen):
    pi = _np_candidate(G)
    v = check_alg(pi) and check_diff(pi)
    probe, _ = fi_probe_verdict(pi)
    i3, _ = intrinsic_verdict(pi, "iii")
    i1, _ = intrinsic_verdict(pi, "i")
    gr, _ = graph_verdict(pi)
    if len({v, probe, i3, i1, gr}) != 1:
        return {"pi": repr(pi), "alg+diff": v, "probe": probe, "i": i1, "iii": i3, "graph": gr}
    return None


def nambu_report_consistency(G: Gen):
    pi = _np_candidate(G)
    r = fi_report(pi)
    if r.alg_ok != r.decomposable:
        return {"pi": repr(pi)}
    return None


def nambu_gauge_closure(G: Gen):
    ch = Chart(4)
    pi = G.np_tensor(ch, 3, 1)
    b = G.form(ch, 3, 1, 0.5)
    try:
        out = gauge_transform(pi, b)
    except SingularOperator:
        return None
    if not (check_alg(out) and check_diff(out)):
        return {"pi": repr(pi), "b": repr(b)}
    return None


def poisson_gauge_twist(G: Gen):
    """``g(x1, x2) d1^d2 + k d3^d4`` is Poisson; its b-transform is twisted by ``-db``."""
    ch = Chart(4)
    x1, x2 = ch.coord(1), ch.coord(2)
    g = ch.const(G.coeff(1, 3)) + x1 * G.coeff() + x1 * x2 * G.coeff()
    pi = AltTensor(ch, 2, VECTOR, {(1, 2): g, (3, 4): G.coeff(nonzero=True)})
    b = G.form(ch, 2, 1, 0.5)
    try:
        pb = gauge_transform(pi, b)
    except SingularOperator:
        return None
    if not twisted_poisson_defect(pb, -ext_d(b)).is_zero():
        return {"pi": repr(pi), "b": repr(b)}
    return None


# ----- swflow -----------------------------------------------------------------------

def swflow_ode(G: Gen):
    ch = Chart(4)
    pi = G.product_tensor(ch, 3, 1)
    b = G.form(ch, 3, 1, 0.4)
    try:
        D = ode_defect(pi, b)
    except SingularOperator:
        return None
    if any(e for row in D for e in row):
        return {"pi": repr(pi), "b": repr(b)}
    return None


# ----- bvgraded ---------------------------------------------------------------------

def _random_graded(G: Gen, gc: bv.GradedChart, length: int):
    gens = [k for k, g in enumerate(gc.alg.gens) if g.name != "Theta"]
    out = gc.alg.one()
    for _ in range(length):
        g = gc.alg.gens[_pick(G, gens)]
        out = out * gc.alg.gen(g.name, g.index)
    return out.scale(G.nonzero_poly(gc.base, 1, 2))


def bv_jacobi(G: Gen):
    space = _pick(G, bv.SPACES)
    p = G.rng.randint(2, 3)
    gc = bv.GradedChart(Chart(3), p, space)
    k = gc.p
    fs = []
    while len(fs) < 3:
        f = _random_graded(G, gc, G.rng.randint(1, 3))
        if not f.is_zero():
            fs.append(f)
    f, g, h = fs
    df, dg = f.degree() - k, g.degree() - k
    br = lambda u, v: bv.gpoisson(gc, u, v)
    lhs = br(f, br(g, h))
    rhs = br(br(f, g), h) + (br(g, br(f, h)) if (df * dg) % 2 == 0 else -br(g, br(f, h)))
    if lhs != rhs:
        return {"space": space, "p": gc.p, "f": str(f), "g": str(g), "h": str(h)}
    return None


def bv_derived_bracket(G: Gen):
    p = G.rng.randint(2, 3)
    ch = Chart(G.rng.randint(3, 4))
    gc = bv.GradedChart(ch, p, bv.MEMBRANE)
    c = G.form(ch, p + 1, 1, 0.5)
    e1, e2 = random_section(G, ch, p, 1), random_section(G, ch, p, 1)
    rep = bv.derived_bracket_report(gc, c, e1, e2, G.poly(ch, 2), G.form(ch, p - 1, 2))
    if not rep.ok:
        return {"p": p, "failed": rep.failures()}
    return None


def bv_master(G: Gen):
    p = G.rng.randint(2, 3)
    ch = Chart(p + 2)
    space = _pick(G, (bv.MEMBRANE, bv.PBRANE))
    gc = bv.GradedChart(ch, p, space)
    closed = G.rng.random() < 0.5
    c = G.closed_form(ch, p + 1, 1) if closed else G.form(ch, p + 1, 1, 0.5)
    d = bv.master_defect(gc, bv.gamma(gc, c))
    dc = ext_d(c)
    if closed and not d.is_zero():
        return {"space": space, "p": p, "c": repr(c)}
    if not closed:
        if dc.is_zero() != d.is_zero():
            return {"space": space, "p": p, "c": repr(c)}
        if not dc.is_zero() and bv._ratio(d, bv.lift_form(gc, dc)) is None:
            return {"space": space, "p": p, "c": repr(c), "reason": "not proportional to dc"}
    return None


def bv_b_shift(G: Gen):
    p = G.rng.randint(2, 3)
    ch = Chart(4)
    space = _pick(G, (bv.MEMBRANE, bv.PBRANE))
    gc = bv.GradedChart(ch, p, space)
    c = G.closed_form(ch, p + 1, 1)
    b = G.form(ch, p, 1, 0.4)
    out = bv.canonical_transform(gc, bv.b_generator(gc, b), bv.gamma(gc, c))
    if out != bv.gamma(gc, c - ext_d(b)):
        return {"space": space, "p": p, "b": repr(b)}
    if space == bv.PBRANE and not bv.restrict(gc, out, bv.LOCUS_LP).is_zero():
        return {"space": space, "p": p, "b": repr(b), "reason": "L' not preserved"}
    return None


# ----- aksz -------------------------------------------------------------------------

def _random_super(G: Gen, sa: aksz.SuperAlgebra, length: int):
    out = sa.alg.one()
    for _ in range(length):
        g = _pick(G, sa.alg.gens)
        out = out * sa.s(g.name, g.index)
    return out.scale(G.nonzero_poly(sa.base, 2, 2))


def _random_sa(G: Gen) -> aksz.SuperAlgebra:
    model = _pick(G, (aksz.POISSON_MODEL, aksz.MEMBRANE_MODEL, aksz.PBRANE_MODEL))
    return aksz.superalgebra(model, G.rng.randint(2, 3), Chart(3))


def aksz_d_squared(G: Gen):
    sa = _random_sa(G)
    f = _random_super(G, sa, G.rng.randint(1, 3)) + _random_super(G, sa, G.rng.randint(0, 2))
    if not aksz.D(sa, aksz.D(sa, f)).is_zero():
        return {"f": str(f)}
    return None


def aksz_leibniz(G: Gen):
    sa = _random_sa(G)
    f, g = _random_super(G, sa, G.rng.randint(0, 2)), _random_super(G, sa, G.rng.randint(0, 2))
    lhs = aksz.D(sa, f * g)
    t = f * aksz.D(sa, g)
    rhs = aksz.D(sa, f) * g + (t if f.degree() % 2 == 0 else -t)
    if lhs != rhs:
        return {"f": str(f), "g": str(g)}
    return None


def _shifted(A: aksz.ActionPair, K):
    """An action equal to A: bulk gains D K and the boundary compensates.

    K must have no pure-DX part (that sector is left unreduced).
    """
    sa = A.sa
    bd = A.boundary - K + aksz.D(sa, aksz.homotopy(sa, K))
    return aksz.ActionPair(sa, A.bulk + aksz.D(sa, K), bd)


def _random_homogeneous(G: Gen, sa, degree: int, fields_only: bool = False):
    f = sa.zero()
    while f.is_zero() or f.degrees() != {degree}:
        f = _random_super(G, sa, G.rng.randint(1, 3))
        if fields_only:
            f = f.select(lambda w: any(g in sa.field_pos for g in w))
    return f


def aksz_ibp(G: Gen):
    """Idempotence of the normal form; equality is an equivalence relation."""
    sa = _random_sa(G)
    p = sa.p
    A = aksz.ActionPair(sa, _random_homogeneous(G, sa, p + 1), _random_homogeneous(G, sa, p))
    B = _shifted(A, _random_homogeneous(G, sa, p, True))
    C = _shifted(B, _random_homogeneous(G, sa, p, True))
    N = aksz.ibp_normalize(A)
    if not aksz.ibp_normalize(N).same_terms(N):
        return {"bulk": str(A.bulk), "reason": "not idempotent"}
    eq = aksz.actions_equal
    if not (eq(A, A) and eq(A, B) and eq(B, A) and eq(B, C) and eq(A, C)):
        return {"bulk": str(A.bulk), "reason": "equality"}
    W = aksz.ActionPair(sa, A.bulk, A.boundary + _random_homogeneous(G, sa, p))
    if eq(A, W) and not (W.boundary - A.boundary).is_zero():
        return {"bulk": str(A.bulk), "reason": "boundary perturbation not detected"}
    return None


def aksz_antisymmetry(G: Gen):
    ch = Chart(G.rng.randint(4, 5))
    pi = G.np_tensor(ch, 3, 1) if G.rng.random() < 0.5 else G.product_tensor(ch, 3, 1)
    bad = aksz.antisymmetry_violations(pi)
    if bad:
        return {"pi": repr(pi), "indices": [list(b) for b in bad[:3]]}
    return None


def aksz_classical_limit(G: Gen):
    p = G.rng.randint(2, 3)
    ch = Chart(4)
    model = _pick(G, (aksz.MEMBRANE_MODEL, aksz.PBRANE_MODEL))
    c = G.form(ch, p + 1, 1, 0.5)
    A = aksz.build_action(model, p, ch, None, c)
    if aksz.interaction_part(A) != A.sa.from_target(bv.gamma(A.sa.gc, c)):
        return {"model": model, "p": p}
    return None


@dataclass(frozen=True)
class Suite:
    name: str
    check: Callable[[Gen], object]
    default_instances: int = 50


SUITES = {s.name: s for s in [
    Suite("scalar-field-axioms", scalar_field_axioms, 100),
    Suite("scalar-partials-commute", scalar_partials_commute, 100),
    Suite("scalar-eval-homomorphism", scalar_eval_homomorphism, 100),
    Suite("exterior-d-squared", exterior_d_squared, 200),
    Suite("schouten-jacobi", schouten_jacobi, 30),
    Suite("lie-leibniz", lie_leibniz, 50),
    Suite("decomposable-rank", decomposable_rank, 30),
    Suite("dorfman-leibniz", dorfman_leibniz, 100),
    Suite("dorfman-axioms", dorfman_axioms, 30),
    Suite("dorfman-b-twist", dorfman_b_twist, 30),
    Suite("dorfman-factorization", dorfman_factorization, 20),
    Suite("nambu-verdicts", nambu_verdicts, 20),
    Suite("nambu-report-consistency", nambu_report_consistency, 50),
    Suite("nambu-gauge-closure", nambu_gauge_closure, 20),
    Suite("poisson-gauge-twist", poisson_gauge_twist, 20),
    Suite("swflow-ode", swflow_ode, 20),
    Suite("bv-jacobi", bv_jacobi, 50),
    Suite("bv-derived-bracket", bv_derived_bracket, 50),
    Suite("bv-master", bv_master, 20),
    Suite("bv-b-shift", bv_b_shift, 10),
    Suite("aksz-d-squared", aksz_d_squared, 100),
    Suite("aksz-leibniz", aksz_leibniz, 100),
    Suite("aksz-ibp", aksz_ibp, 50),
    Suite("aksz-antisymmetry", aksz_antisymmetry, 10),
    Suite("aksz-classical-limit", aksz_classical_limit, 10),
]}


def run_suite(name: str, seed: int = 0, instances: int | None = None) -> dict:
    """Run a suite; the summary lists the first failing instance and its witness."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    suite = SUITES[name]
    n = suite.default_instances if instances is None else instances
    failures = 0
    first = None
    for k in range(n):
        w = suite.check(instance_gen(seed, name, k))
        if w is not None:
            failures += 1
            if first is None:
                first = {"instance": k, **w}
    return {"name": name, "instances": n, "failures": failures, "first_witness": first}
