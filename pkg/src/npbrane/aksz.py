"""Superfield actions of AKSZ type and their on-shell reduction.

Superfields are formal generators named after the target coordinates
(``psi^i``, ``chi_i``, ``F_i``, ...) together with their first
D-derivatives (``Dpsi^i``, ...) and ``DX^i``; the degree-0 superfields
``X^i`` live in the coefficients.  ``D`` is the degree +1 derivation
``phi -> Dphi``, ``Dphi -> 0``, ``f(X) -> d_k f DX^k``, so D^2 = 0 holds
by construction and no higher jets occur.

An action is a pair (bulk, boundary) standing for
``int_X bulk + int_{dX} boundary``.  Equality up to ``int_X D K =
int_{dX} K`` is decided with an explicit contracting homotopy for D on
the part of the algebra that contains at least one non-coordinate
superfield; see :func:`homotopy`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .bvgraded import (MEMBRANE, PBRANE, POISSON, GradedChart, gamma, poisson_hamiltonian,
                       psi_word, theta_reduce)
from .exterior import FORM, VECTOR, AltTensor
from .graded import GradedAlgebra, GradedPoly, Generator
from .scalarfield import Chart

POISSON_MODEL = "poisson"
MEMBRANE_MODEL = "membrane"
PBRANE_MODEL = "pbrane"
NP_SIGMA = "np-sigma"
TP_SIGMA = "tp-sigma"
MODELS = (POISSON_MODEL, MEMBRANE_MODEL, PBRANE_MODEL, NP_SIGMA, TP_SIGMA)

_SPACE_OF = {POISSON_MODEL: POISSON, MEMBRANE_MODEL: MEMBRANE, TP_SIGMA: MEMBRANE,
             PBRANE_MODEL: PBRANE, NP_SIGMA: PBRANE}


class SuperAlgebra:
    """Superfield symbols and D-jets over the target phase space ``gc``."""

    def __init__(self, gc: GradedChart):
        self.gc = gc
        gens = [Generator("DX", (i,), 1) for i in range(1, gc.dim + 1)]
        self.fields = [g for g in gc.alg.gens if g.name != "Theta"]
        gens += self.fields
        gens += [Generator("D" + g.name, g.index, g.degree + 1, g.upper) for g in self.fields]
        self.alg = GradedAlgebra(gc.base, gens)
        pos = self.alg.index_of
        self.jet = {pos(g.name, g.index): pos("D" + g.name, g.index) for g in self.fields}
        self.field_pos = set(self.jet) | set(self.jet.values())

    @property
    def p(self) -> int:
        return self.gc.p

    @property
    def base(self) -> Chart:
        return self.gc.base

    def s(self, name: str, index=()) -> GradedPoly:
        if isinstance(index, int):
            index = (index,)
        return self.alg.gen(name, tuple(index))

    def zero(self) -> GradedPoly:
        return self.alg.zero()

    def from_target(self, f: GradedPoly) -> GradedPoly:
        """The superfield expression with the same symbols as a target function."""
        return f.substitute({}, target=self.alg)

    def __eq__(self, other):
        return (isinstance(other, SuperAlgebra) and self.gc.space == other.gc.space
                and self.gc.p == other.gc.p and self.base == other.base)

    def __hash__(self):
        return hash((self.gc.space, self.gc.p, self.base))


# ----- D and its homotopy -------------------------------------------------------------

def D(sa: SuperAlgebra, f: GradedPoly) -> GradedPoly:
    images = {g: GradedPoly(sa.alg, {(dg,): sa.base.one()}) for g, dg in sa.jet.items()}
    coords = {i: sa.s("DX", i) for i in range(1, sa.base.dim + 1)}
    return f.apply_derivation(images, coords, 1)


def _dx_part(sa: SuperAlgebra, f: GradedPoly) -> GradedPoly:
    coords = {i: sa.s("DX", i) for i in range(1, sa.base.dim + 1)}
    return f.apply_derivation({}, coords, 1)


def _field_count(sa: SuperAlgebra, w) -> int:
    return sum(1 for g in w if g in sa.field_pos)


def _kappa_scaled(sa: SuperAlgebra, f: GradedPoly) -> GradedPoly:
    """``kappa / N`` with ``kappa = sum phi d/dDphi`` and N the number of superfield letters."""
    images = {dg: GradedPoly(sa.alg, {(g,): sa.base.one()}) for g, dg in sa.jet.items()}
    out = sa.zero()
    by_n: dict[int, dict] = {}
    for w, c in f.terms.items():
        n = _field_count(sa, w)
        if n:
            by_n.setdefault(n, {})[w] = c
    for n, terms in by_n.items():
        out = out + GradedPoly(sa.alg, terms).apply_derivation(images, {}, -1).scale(Fraction(1, n))
    return out


def homotopy(sa: SuperAlgebra, f: GradedPoly) -> GradedPoly:
    """Contracting homotopy h with ``D h + h D = 1 - P``.

    P keeps the words without superfield letters (functions of X times
    DX's).  On the rest, ``h0 = kappa/N`` contracts the superfield part
    of D and ``h = h0 sum_k (-D_X h0)^k`` absorbs the coefficient part
    ``D_X``; the series stops because each step adds a DX.  ``h h = 0``.
    """
    out = sa.zero()
    u = _kappa_scaled(sa, f)
    steps = 0
    while not u.is_zero():
        out = out + u
        u = -_kappa_scaled(sa, _dx_part(sa, u))
        steps += 1
        if steps > sa.base.dim + 2:
            raise RuntimeError("homotopy series failed to terminate")
    return out


# ----- actions --------------------------------------------------------------------------

@dataclass
class ActionPair:
    """``int_X bulk + int_{dX} boundary``; ``dirichlet`` lists superfields vanishing on dX."""

    sa: SuperAlgebra
    bulk: GradedPoly
    boundary: GradedPoly
    model: str = ""
    dirichlet: tuple[str, ...] = ()
    certificate: GradedPoly | None = field(default=None, compare=False)

    def __post_init__(self):
        p = self.sa.p
        for part, deg in ((self.bulk, p + 1), (self.boundary, p)):
            ds = part.degrees()
            if ds and ds != {deg}:
                raise ValueError(f"expected total degree {deg}, found {sorted(ds)}")

    def same_terms(self, other: "ActionPair") -> bool:
        return self.bulk == other.bulk and self.boundary == other.boundary


def _check_inputs(p: int, n: int, pi: AltTensor | None, c: AltTensor | None, pi_degree: int):
    if pi is not None:
        if pi.variance != VECTOR or pi.degree != pi_degree:
            raise ValueError(f"pi must be a {pi_degree}-vector")
        if pi.chart.dim != n:
            raise ValueError("pi lives on a chart of the wrong dimension")
    if c is not None:
        if c.variance != FORM or c.degree != p + 1:
            raise ValueError(f"c must be a {p + 1}-form")
        if c.chart.dim != n:
            raise ValueError("c lives on a chart of the wrong dimension")


def superalgebra(model: str, p: int, chart: Chart) -> SuperAlgebra:
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")
    space = _SPACE_OF[model]
    if model == POISSON_MODEL:
        p = 1
    elif model == TP_SIGMA and p != 2:
        raise ValueError("the twisted Poisson sigma model needs p = 2")
    return SuperAlgebra(GradedChart(chart, p, space))


def _dx_word(sa: SuperAlgebra, I) -> GradedPoly:
    out = sa.alg.one()
    for i in I:
        out = out * sa.s("DX", i)
    return out


def _c_bulk(sa: SuperAlgebra, c: AltTensor | None, letter: str) -> GradedPoly:
    out = sa.zero()
    if c is None:
        return out
    for I, v in c.coeffs.items():
        w = _dx_word(sa, I) if letter == "DX" else sa.from_target(psi_word(sa.gc, I))
        out = out + w.scale(v)
    return out


def _pi_boundary(sa: SuperAlgebra, pi: AltTensor | None) -> GradedPoly:
    """``(1/(p-1)!) pi^{J j} A_J chi_j`` (p-brane) or ``(1/2) pi^{ij} chi_i chi_j``."""
    out = sa.zero()
    if pi is None:
        return out
    gc = sa.gc
    if gc.space == PBRANE:
        for J in gc.multi:
            for j in range(1, gc.dim + 1):
                v = pi[J + (j,)]
                if v:
                    out = out + (sa.s("A", J) * sa.s("chi", j)).scale(v)
        return out
    for (i, j), v in pi.coeffs.items():
        out = out + (sa.s("chi", i) * sa.s("chi", j)).scale(v)
    return out


def build_action(model: str, p: int, chart: Chart, pi: AltTensor | None = None,
                 c: AltTensor | None = None, warnings: list | None = None) -> ActionPair:
    """The superfield action of a model.

    ``poisson``: ``int_X chi_i DX^i + (1/2) pi chi chi``.
    ``membrane``: ``int_X F DX + psi Dchi - psi F + c(psi)``, plus
    ``(1/2) int_{dX} pi chi chi`` when p = 2.
    ``pbrane``: the full bulk/boundary action with the G, H, eta, A sector
    and boundary ``(1/(p-1)!) int_{dX} pi A chi``.
    ``np-sigma`` and ``tp-sigma``: the on-shell target models (boundary
    ``chi DX + A DX..DX + pi A chi``, resp. ``chi DX + (1/2) pi chi chi``,
    with bulk ``c(DX)``).
    """
    sa = superalgebra(model, p, chart)
    p = sa.p
    n = chart.dim
    gc = sa.gc
    _check_inputs(p, n, pi, c, 2 if gc.space != PBRANE else p)
    if model == POISSON_MODEL:
        if c is not None:
            raise ValueError("the Poisson sigma model takes no form c")
        bulk = sum((sa.s("chi", i) * sa.s("DX", i) for i in range(1, n + 1)), sa.zero())
        if pi is not None:
            bulk = bulk + sa.from_target(poisson_hamiltonian(gc, pi.to_chart(gc.base)))
        return ActionPair(sa, bulk, sa.zero(), model)
    if model in (NP_SIGMA, TP_SIGMA):
        bd = sum((sa.s("chi", i) * sa.s("DX", i) for i in range(1, n + 1)), sa.zero())
        if model == NP_SIGMA:
            for J in gc.multi:
                bd = bd + sa.s("A", J) * _dx_word(sa, J)
        bd = bd + _pi_boundary(sa, pi)
        return ActionPair(sa, _c_bulk(sa, c, "DX"), bd, model)
    if pi is not None and model == MEMBRANE_MODEL and p != 2:
        raise ValueError("a boundary bivector needs p = 2 on the membrane space")
    if pi is not None and p >= 3 and warnings is not None:
        from .nambu import is_nambu_poisson

        if not is_nambu_poisson(pi):
            warnings.append("pi is not a Nambu-Poisson tensor")
    bulk = sa.zero()
    for i in range(1, n + 1):
        bulk = bulk + sa.s("F", i) * sa.s("DX", i) + sa.s("psi", i) * sa.s("Dchi", i)
    dirichlet: tuple[str, ...] = ()
    if gc.space == PBRANE:
        for I in gc.multi:
            bulk = bulk + sa.s("G", I) * sa.s("DH", I) + sa.s("eta", I) * sa.s("DA", I)
        dirichlet = ("H",)
    bulk = bulk + sa.from_target(gamma(gc, c.to_chart(gc.base) if c is not None else None))
    return ActionPair(sa, bulk, _pi_boundary(sa, pi), model, dirichlet)


# ----- on-shell reduction -----------------------------------------------------------------

def _solve_linear(sa: SuperAlgebra, constraint: GradedPoly, unknown: int) -> GradedPoly:
    """Solve ``constraint = 0`` for a generator entering it linearly with constant coefficient."""
    lin = constraint.select(lambda w: unknown in w)
    rest = constraint - lin
    coef = lin.dleft(unknown)
    if len(coef.terms) != 1 or () not in coef.terms or not coef.terms[()].is_constant():
        raise ValueError(f"{sa.alg.gens[unknown].label} does not enter its constraint linearly")
    return rest.scale(-1 / coef.terms[()].constant_value())


def eom_substitute(A: ActionPair) -> ActionPair:
    """Impose the F and G equations of motion.

    The coefficient of ``F_i`` fixes ``psi^i`` (``psi = (-1)^p DX`` with
    the Koszul signs used here); the coefficient of ``G_I`` fixes
    ``eta^I = psi^I - DH^I``.  All F and G terms then cancel identically.
    """
    sa = A.sa
    gc = sa.gc
    if gc.space == POISSON:
        return A
    alg = sa.alg
    images: dict[int, GradedPoly] = {}
    for i in range(1, gc.dim + 1):
        cons = A.bulk.dleft(alg.index_of("F", (i,)))
        images[alg.index_of("psi", (i,))] = _solve_linear(sa, cons, alg.index_of("psi", (i,)))
    if gc.space == PBRANE:
        for I in gc.multi:
            cons = A.bulk.dleft(alg.index_of("G", I)).substitute(images)
            images[alg.index_of("eta", I)] = _solve_linear(sa, cons, alg.index_of("eta", I))
    for g in list(images):
        images[sa.jet[g]] = D(sa, images[g])
    bulk = A.bulk.substitute(images)
    boundary = A.boundary.substitute(images)
    gone = {alg.index_of(g.name, g.index) for g in sa.fields if g.name in ("F", "G")}
    gone |= {sa.jet[k] for k in list(gone)}
    for part in (bulk, boundary):
        if any(g in gone for w in part.terms for g in w):
            raise ValueError("F or G terms survive the equations of motion")
    return ActionPair(sa, bulk, boundary, A.model + "-on-shell", A.dirichlet)


def _restrict_dirichlet(sa: SuperAlgebra, f: GradedPoly, names) -> GradedPoly:
    if not names:
        return f
    kill = set()
    for g in sa.fields:
        if g.name in names:
            k = sa.alg.index_of(g.name, g.index)
            kill |= {k, sa.jet[k]}
    return f.select(lambda w: not any(g in kill for g in w))


def ibp_normalize(A: ActionPair) -> ActionPair:
    """Move the D-exact part of the bulk to the boundary.

    ``K = h(bulk)`` with the homotopy h, so ``bulk = (bulk - D K) + D K``
    and ``bulk - D K = h D bulk + P bulk`` is the canonical representative.
    The boundary becomes ``boundary + K`` restricted by the Dirichlet
    conditions; K is kept as the certificate.
    """
    sa = A.sa
    K = homotopy(sa, A.bulk)
    bulk = A.bulk - D(sa, K)
    boundary = _restrict_dirichlet(sa, A.boundary + K, A.dirichlet)
    return ActionPair(sa, bulk, boundary, A.model, A.dirichlet, certificate=K)


@dataclass
class EqualityReport:
    equal: bool
    certificate_a: GradedPoly
    certificate_b: GradedPoly
    bulk_residue: GradedPoly
    boundary_residue: GradedPoly

    def __bool__(self):
        return self.equal


def actions_equal(A: ActionPair, B: ActionPair) -> EqualityReport:
    if A.sa != B.sa:
        raise ValueError("actions use different superfield symbols")
    if A.sa.alg is not B.sa.alg:
        # same symbols built twice: move B over
        B = ActionPair(A.sa, B.bulk.substitute({}, target=A.sa.alg),
                       B.boundary.substitute({}, target=A.sa.alg), B.model, B.dirichlet)
    na, nb = ibp_normalize(A), ibp_normalize(B)
    nb_b = _restrict_dirichlet(A.sa, nb.boundary, A.dirichlet)
    na_b = _restrict_dirichlet(A.sa, na.boundary, B.dirichlet)
    rb = na.bulk - nb.bulk
    rd = na_b - nb_b
    return EqualityReport(rb.is_zero() and rd.is_zero(), na.certificate, nb.certificate, rb, rd)


# ----- classical limit and on-shell antisymmetry ------------------------------------------

def interaction_part(A: ActionPair) -> GradedPoly:
    """Bulk words without D-letters: the Hamiltonian of the target."""
    sa = A.sa
    dletters = set(sa.jet.values()) | {sa.alg.index_of("DX", (i,)) for i in range(1, sa.base.dim + 1)}
    return A.bulk.select(lambda w: not any(g in dletters for g in w))


def psi_eta_products(pi: AltTensor) -> dict[tuple[int, ...], GradedPoly]:
    """Theta-reduced ``(pi^{Ji} A_J)(pi^{jI} chi_j)`` keyed by ``(i,) + I``.

    These are the products ``psi^i eta^I`` on ``L'_pi``; for decomposable pi
    they are antisymmetric in all p indices.
    """
    gc = GradedChart(pi.chart, pi.degree, PBRANE)
    zero = gc.alg.zero()
    psi = {i: sum((gc.g("A", J).scale(pi[J + (i,)]) for J in gc.multi if pi[J + (i,)]), zero)
           for i in range(1, gc.dim + 1)}
    eta = {I: sum((gc.g("chi", j).scale(pi[(j,) + I]) for j in range(1, gc.dim + 1) if pi[(j,) + I]), zero)
           for I in gc.multi}
    return {(i,) + I: theta_reduce(gc, psi[i] * eta[I]) for i in psi for I in gc.multi}


def antisymmetry_violations(pi: AltTensor) -> list[tuple[int, ...]]:
    """Index tuples where swapping the first index with a later one fails to flip the sign."""
    W = psi_eta_products(pi)
    p = pi.degree
    bad = []
    for key, val in W.items():
        for m in range(1, p):
            sw = list(key)
            sw[0], sw[m] = sw[m], sw[0]
            i, I = sw[0], tuple(sw[1:])
            if len(set(sw)) < p:
                ok = val.is_zero()
            else:
                srt = tuple(sorted(I))
                other = W[(i,) + srt]
                sign = _parity_sign(I)
                ok = (val + (other if sign > 0 else -other)).is_zero()
            if not ok:
                bad.append(key)
                break
    return bad


def _parity_sign(seq) -> int:
    seq = list(seq)
    inv = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b])
    return -1 if inv % 2 else 1


# ----- text output ------------------------------------------------------------------------

_LATEX_NAMES = {"psi": r"\psi", "chi": r"\chi", "eta": r"\eta", "F": "F", "G": "G", "H": "H", "A": "A", "X": "X"}


def _latex_symbol(g: Generator) -> str:
    name = g.name
    d = ""
    if name.startswith("D") and name != "D":
        d, name = "D", name[1:]
    body = rf"\boldsymbol{{{_LATEX_NAMES.get(name, name)}}}"
    if g.index:
        sep = "^" if g.upper else "_"
        body += f"{sep}{{{''.join(map(str, g.index))}}}"
    return d + body


def _latex_coeff(c) -> str:
    s = re.sub(r"x(\d+)\^(\d+)", r"(X^{\1})^{\2}", c.latex())
    s = re.sub(r"x(\d+)", r"X^{\1}", s)
    return re.sub(r"\)\^(\d+)", r")^{\1}", s)


def _emit_poly(f: GradedPoly, style: str) -> str:
    if f.is_zero():
        return ""
    if style == "plain":
        return str(f)
    parts = []
    for w, c in f.sorted_terms():
        syms = " ".join(_latex_symbol(f.alg.gens[g]) for g in w)
        if c.is_one():
            coef = ""
        elif (-c).is_one():
            coef = "-"
        else:
            coef = "(" + _latex_coeff(c) + ") "
        parts.append((coef + syms).strip() or "1")
    return " + ".join(parts).replace("+ -", "- ")


def emit_text(A: ActionPair | None, style: str = "plain") -> str:
    """Deterministic rendering; an empty action renders as the empty string."""
    if style not in ("plain", "latex"):
        raise ValueError(f"unknown style {style!r}")
    if A is None or (A.bulk.is_zero() and A.boundary.is_zero()):
        return ""
    lines = []
    bulk, bd = _emit_poly(A.bulk, style), _emit_poly(A.boundary, style)
    if style == "plain":
        if bulk:
            lines.append(f"bulk: {bulk}")
        if bd:
            lines.append(f"boundary: {bd}")
    else:
        if bulk:
            lines.append(rf"\int_X \left( {bulk} \right)")
        if bd:
            lines.append(rf"\int_{{\partial X}} \left( {bd} \right)")
    return "\n".join(lines) + "\n"
