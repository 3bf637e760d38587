"""Nambu-Poisson tensors: brackets, the fundamental identity in its several
equivalent forms, and gauge transformations by p-forms.

Index conventions: the coordinate conditions below are written with
ordered-index storage.  The algebraic condition uses

    Sigma(I', a) = sum_k (-1)^k pi^{I' a_k} pi^{a minus a_k},

for a (p-1)-tuple ``I'`` and a (p+1)-tuple ``a = (i_p, j_1, ..., j_p)``;
the ``1/p!`` of the antisymmetrized sum is absorbed by summing over the
orderings of ``a minus a_k``.  The condition asks Sigma to be symmetric
under exchanging ``i_1`` (first entry of ``I'``) with ``j_1``.  The
differential condition reads

    pi^{I'k} d_k pi^J = sum_m (-1)^(p-m) pi^{(J minus j_m) k} d_k pi^{I' j_m}.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement
from math import factorial

from . import matrix as mx
from .dorfman import Section, TwistData, dorfman
from .errors import SingularOperator
from .exterior import (FORM, VECTOR, AltTensor, decomposable, ext_d, interior_v, lie,
                       multi_indices, pair, schouten, sharp)
from .scalarfield import Chart, ScalarFn


@dataclass(frozen=True)
class NPCandidate:
    tensor: AltTensor
    order: int

    def __post_init__(self):
        if self.order < 2 or self.tensor.degree != self.order or self.tensor.variance != VECTOR:
            raise ValueError("an NP candidate is a p-vector with p >= 2")


def _tensor(pi) -> AltTensor:
    return pi.tensor if isinstance(pi, NPCandidate) else pi


@dataclass
class FIReport:
    alg_ok: bool
    diff_ok: bool
    decomposable: bool
    witnesses: list = field(default_factory=list)

    @property
    def is_np(self) -> bool:
        return self.alg_ok and self.diff_ok


# ----- brackets ----------------------------------------------------------

def _det(rows):
    """Determinant of a small square list-of-lists of ScalarFn (Leibniz formula)."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    acc = None
    for j in range(n):
        if not rows[0][j]:
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _det(minor)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    if acc is None:
        return rows[0][0].chart.zero()
    return acc


def np_bracket(pi, *fs: ScalarFn) -> ScalarFn:
    """``{f_1, ..., f_p} = pi(df_1 ^ ... ^ df_p)``."""
    T = _tensor(pi)
    if len(fs) != T.degree:
        raise ValueError(f"bracket of order {T.degree} needs {T.degree} functions, got {len(fs)}")
    grads = {}
    acc = T.chart.zero()
    for I, v in T.coeffs.items():
        rows = []
        for f in fs:
            row = []
            for i in I:
                key = (id(f), i)
                if key not in grads:
                    grads[key] = f.partial(i)
                row.append(grads[key])
            rows.append(row)
        d = _det(rows)
        if d:
            acc = acc + v * d
    return acc


def hamiltonian_vf(pi, *fs: ScalarFn) -> AltTensor:
    """Vector field ``h -> {f_1, ..., f_{p-1}, h}``."""
    T = _tensor(pi)
    if len(fs) != T.degree - 1:
        raise ValueError(f"need {T.degree - 1} functions, got {len(fs)}")
    chart = T.chart
    return AltTensor(chart, 1, VECTOR, {(k,): np_bracket(T, *fs, chart.coord(k))
                                        for k in range(1, chart.dim + 1)})


def evaluate_form(c: AltTensor, vectors: list[AltTensor]) -> ScalarFn:
    """``c(V_1, ..., V_m) = i_{V_m} ... i_{V_1} c``."""
    out = c
    for V in vectors:
        out = interior_v(V, out)
    return out.scalar_value()


def fi_defect(pi, fs, gs, c: AltTensor | None = None) -> ScalarFn:
    """Fundamental identity: LHS - RHS, corrected by the c-term when given.

    The twisting term ``c(X_f, X_{g_1}, X_{g_2})`` needs Hamiltonian vector
    fields of single functions, so it is only defined for p = 2.  With the
    contraction conventions of :mod:`exterior` (and ``X_f = {f, .}``) the
    twisted identity reads ``LHS = RHS - c(X_f, X_g1, X_g2)`` exactly when
    the graph of pi is closed under the c-twisted Dorfman bracket, so the
    term is added back here.
    """
    T = _tensor(pi)
    p = T.degree
    fs, gs = list(fs), list(gs)
    if len(fs) != p - 1 or len(gs) != p:
        raise ValueError("fi_defect needs p-1 functions f and p functions g")
    lhs = np_bracket(T, *fs, np_bracket(T, *gs))
    rhs = T.chart.zero()
    for i in range(p):
        inner = np_bracket(T, *fs, gs[i])
        args = gs[:i] + [inner] + gs[i + 1:]
        rhs = rhs + np_bracket(T, *args)
    out = lhs - rhs
    if c is not None:
        if p != 2:
            raise ValueError("the c-twisted identity is only defined for p = 2")
        vfs = [hamiltonian_vf(T, *fs)] + [hamiltonian_vf(T, g) for g in gs]
        out = out + evaluate_form(c, vfs)
    return out


# ----- coordinate decision procedure -------------------------------------

def _sort_sign(idx):
    if len(set(idx)) < len(idx):
        return 0, None
    inv = sum(1 for a in range(len(idx)) for b in range(a + 1, len(idx)) if idx[a] > idx[b])
    return (-1 if inv & 1 else 1), tuple(sorted(idx))


def _sigma_table(T: AltTensor):
    """Sigma(I', a) for increasing I' and increasing a."""
    n, p = T.chart.dim, T.degree
    table = {}
    for Ip in multi_indices(n, p - 1):
        for a in multi_indices(n, p + 1):
            acc = T.chart.zero()
            for k, ak in enumerate(a):
                left = T[Ip + (ak,)]
                if not left:
                    continue
                right = T.coeffs.get(a[:k] + a[k + 1:])
                if right is None:
                    continue
                term = left * right
                acc = acc + term if k % 2 == 0 else acc - term
            if acc:
                table[(Ip, a)] = acc
    return table


def _sigma(table, zero, Ip, a):
    s1, k1 = _sort_sign(Ip)
    s2, k2 = _sort_sign(a)
    if not s1 or not s2:
        return zero
    v = table.get((k1, k2))
    if v is None:
        return zero
    return v if s1 * s2 > 0 else -v


def check_alg(pi, witnesses: list | None = None) -> bool:
    """Algebraic part of the fundamental identity.

    For p = 2 the second-order terms of the identity cancel identically,
    so there is no algebraic condition and the check is vacuous.
    """
    T = _tensor(pi)
    n, p = T.chart.dim, T.degree
    if p == 2:
        return True
    table = _sigma_table(T)
    zero = T.chart.zero()
    ok = True
    for rest_i in multi_indices(n, p - 2):
        for rest_j in multi_indices(n, p - 1):
            for i1, j1 in combinations(range(1, n + 1), 2):
                if i1 in rest_i and j1 in rest_i:
                    continue
                for ip in range(1, n + 1):
                    lhs = _sigma(table, zero, (i1,) + rest_i, (ip, j1) + rest_j)
                    rhs = _sigma(table, zero, (j1,) + rest_i, (ip, i1) + rest_j)
                    if lhs != rhs:
                        ok = False
                        if witnesses is None:
                            return False
                        witnesses.append(("alg", (i1,) + rest_i + (ip,), (j1,) + rest_j))
                        if len(witnesses) >= 8:
                            return False
    return ok


def _flow_table(T: AltTensor):
    """D[I'][J] = pi^{I'k} d_k pi^J for increasing I', J."""
    n, p = T.chart.dim, T.degree
    partials = {J: [v.partial(k) for k in range(1, n + 1)] for J, v in T.coeffs.items()}
    table = {}
    for Ip in multi_indices(n, p - 1):
        u = [T[Ip + (k,)] for k in range(1, n + 1)]
        if not any(u):
            continue
        row = {}
        for J, dJ in partials.items():
            acc = T.chart.zero()
            for k in range(n):
                if u[k] and dJ[k]:
                    acc = acc + u[k] * dJ[k]
            if acc:
                row[J] = acc
        table[Ip] = row
    return table


def _flow(table, zero, Ip, J):
    s1, k1 = _sort_sign(Ip)
    s2, k2 = _sort_sign(J)
    if not s1 or not s2:
        return zero
    v = table.get(k1, {}).get(k2)
    if v is None:
        return zero
    return v if s1 * s2 > 0 else -v


def flow_components(pi):
    """``(I', J) -> pi^{I'k} d_k pi^J`` on arbitrary index tuples."""
    T = _tensor(pi)
    table = _flow_table(T)
    zero = T.chart.zero()
    return lambda Ip, J: _flow(table, zero, tuple(Ip), tuple(J))


def check_diff(pi, witnesses: list | None = None) -> bool:
    """Differential part of the fundamental identity (all index tuples)."""
    T = _tensor(pi)
    n, p = T.chart.dim, T.degree
    table = _flow_table(T)
    zero = T.chart.zero()
    ok = True
    for Ip in multi_indices(n, p - 1):
        for J in multi_indices(n, p):
            lhs = _flow(table, zero, Ip, J)
            rhs = zero
            for m in range(1, p + 1):
                jm = J[m - 1]
                rest = J[:m - 1] + J[m:]
                t = _flow(table, zero, rest, Ip + (jm,))
                if t:
                    rhs = rhs + t if (p - m) % 2 == 0 else rhs - t
            if lhs != rhs:
                ok = False
                if witnesses is None:
                    return False
                witnesses.append(("diff", Ip, J))
                if len(witnesses) >= 8:
                    return False
    return ok


def fi_report(pi) -> FIReport:
    T = _tensor(pi)
    wit: list = []
    alg = check_alg(T, wit)
    diff = check_diff(T, wit)
    return FIReport(alg, diff, decomposable(T), wit)


def is_nambu_poisson(pi) -> bool:
    return check_alg(pi) and check_diff(pi)


# ----- intrinsic forms -------------------------------------------------------

def bracket_forms(pi, alpha: AltTensor, beta: AltTensor, c: AltTensor | None = None) -> AltTensor:
    """``[alpha, beta]_{pi,c} = L_{pi# alpha} beta - i_{pi# beta} d alpha (+ i_{pi#a ^ pi#b} c)``."""
    T = _tensor(pi)
    u, w = sharp(T, alpha), sharp(T, beta)
    out = lie(u, beta) - interior_v(w, ext_d(alpha))
    if c is not None:
        out = out + interior_v(w, interior_v(u, c))
    return out


def fi_intrinsic(pi, alpha: AltTensor, beta: AltTensor, variant: str = "iii") -> AltTensor:
    """Defect of the intrinsic form (i) or (iii) of the fundamental identity."""
    T = _tensor(pi)
    if variant == "i":
        lhs = sharp(lie(sharp(T, alpha), T), beta)
        rhs = -sharp(T, interior_v(sharp(T, beta), ext_d(alpha)))
        return lhs - rhs
    if variant == "iii":
        return schouten(sharp(T, alpha), sharp(T, beta)) - sharp(T, bracket_forms(T, alpha, beta))
    raise ValueError(f"unknown variant {variant!r}")


def graph_closure_defect(pi, alpha: AltTensor, beta: AltTensor, c: AltTensor | None = None) -> AltTensor:
    """Vector part of the bracket of two graph sections minus pi# of its form part."""
    T = _tensor(pi)
    p = T.degree
    e1 = Section(sharp(T, alpha), alpha, p)
    e2 = Section(sharp(T, beta), beta, p)
    br = dorfman(e1, e2, TwistData(c=c))
    return br.vec - sharp(T, br.form)


def twisted_c_term(pi, c: AltTensor) -> dict:
    """Components of ``c_{l_1..l_{p+1}} pi^{I' l_1} pi^{J' l_2} pi^{l_3..l_{p+1} j}``.

    Summation is over all (unordered) ``l``; keys are ``(I', J', j)`` with
    increasing ``I'``, ``J'``.  Only nonzero entries are returned.
    """
    T = _tensor(pi)
    chart = T.chart
    n, p = chart.dim, T.degree
    if c.degree != p + 1 or c.variance != FORM:
        raise ValueError(f"c must be a {p + 1}-form")
    weight = factorial(p - 1)
    rows = multi_indices(n, p - 1)
    vecs = {}
    for Ip in rows:
        vecs[Ip] = AltTensor(chart, 1, VECTOR, {(l,): T[Ip + (l,)] for l in range(1, n + 1)})
    out = {}
    for Ip in rows:
        u = vecs[Ip]
        if u.is_zero():
            continue
        cu = interior_v(u, c)
        for Jp in rows:
            w = vecs[Jp]
            if w.is_zero():
                continue
            cuw = interior_v(w, cu)
            if cuw.is_zero():
                continue
            for j in range(1, n + 1):
                acc = chart.zero()
                for L, v in cuw.coeffs.items():
                    t = T[L + (j,)]
                    if t:
                        acc = acc + v * t
                if acc:
                    out[(Ip, Jp, j)] = acc * weight
    return out


# ----- gauge transformations ------------------------------------------------

def gauge_operator(pi, b: AltTensor, t: ScalarFn | None = None):
    """Matrix of ``1 + t b_flat pi_sharp`` on (p-1)-forms, with the basis."""
    from .dorfman import b_flat_matrix, zeta_sharp_matrix

    T = _tensor(pi)
    chart = T.chart
    Z = zeta_sharp_matrix(T)
    Bf = b_flat_matrix(b)
    one, zero = chart.one(), chart.zero()
    prod_ = mx.matmul(Bf, Z, zero)
    if t is not None:
        prod_ = mx.map_entries(prod_, lambda e: e * t)
    N = len(Bf)
    return mx.add(mx.identity(N, one, zero), prod_), Z


def tensor_from_sharp(chart: Chart, p: int, S: list[list[ScalarFn]]) -> AltTensor:
    """Recover a p-vector from the matrix of its sharp map on (p-1)-forms.

    Uses ``pi^J = (pi# dx^{J[:-1]})^{J[-1]}``.
    """
    basis = multi_indices(chart.dim, p - 1)
    col = {I: k for k, I in enumerate(basis)}
    data = {}
    for J in multi_indices(chart.dim, p):
        v = S[J[-1] - 1][col[J[:-1]]]
        if v:
            data[J] = v
    return AltTensor(chart, p, VECTOR, data)


def gauge_transform(pi, b: AltTensor, t: ScalarFn | None = None, cross_check: bool = True) -> AltTensor:
    """``pi^b`` with ``(pi^b)# = pi# (1 + b_flat pi#)^{-1}`` (``t b`` if t given).

    Raises SingularOperator when the operator is not invertible.  The
    result is checked to be induced by a p-vector; for p >= 3 and a
    decomposable input it is also compared against the scalar formula
    ``(1 + (-1)^(p-1) b(pi))^{-1} pi``.
    """
    T = _tensor(pi)
    chart = T.chart
    p = T.degree
    if b.degree != p or b.variance != FORM:
        raise ValueError(f"b must be a {p}-form")
    if b.is_zero():
        return T
    M, Z = gauge_operator(T, b, t)
    one, zero = chart.one(), chart.zero()
    inv = mx.inverse(M, one, zero)
    S = mx.matmul(Z, inv, zero)
    out = tensor_from_sharp(chart, p, S)
    from .dorfman import zeta_sharp_matrix

    if zeta_sharp_matrix(out) != S:
        raise ArithmeticError("gauge-transformed operator is not induced by a p-vector")
    if cross_check and p >= 3 and decomposable(T):
        scal = gauge_scalar(T, b, t)
        if scal != out:
            raise ArithmeticError("operator and scalar gauge formulas disagree")
    return out


def gauge_scalar(pi, b: AltTensor, t: ScalarFn | None = None) -> AltTensor:
    """Scalar gauge formula ``(1 + (-1)^(p-1) t b(pi))^{-1} pi``."""
    T = _tensor(pi)
    p = T.degree
    s = pair(b, T)
    if t is not None:
        s = s * t
    if p % 2 == 0:
        s = -s
    den = T.chart.one() + s
    if not den:
        raise SingularOperator("1 + (-1)^(p-1) b(pi) vanishes identically")
    return T * den.inverse()


def wedge3_sharp(pi: AltTensor, c: AltTensor) -> AltTensor:
    """``(wedge^3 pi#) c`` for a bivector pi and a 3-form c.

    Components ``c(pi# dx^i, pi# dx^j, pi# dx^k)`` on increasing (i,j,k).
    """
    chart = pi.chart
    n = chart.dim
    cols = [sharp(pi, AltTensor(chart, 1, FORM, {(i,): 1})) for i in range(1, n + 1)]
    data = {}
    for i, j, k in combinations(range(1, n + 1), 3):
        v = evaluate_form(c, [cols[i - 1], cols[j - 1], cols[k - 1]])
        if v:
            data[(i, j, k)] = v
    return AltTensor(chart, 3, VECTOR, data)


def twisted_poisson_defect(pi: AltTensor, c: AltTensor) -> AltTensor:
    """``[pi, pi]_S + 2 (wedge^3 pi#) c``.

    Vanishes exactly when the graph of pi is closed under the c-twisted
    Dorfman bracket (the factor 2 comes from the Schouten normalization).
    """
    return schouten(pi, pi) + wedge3_sharp(pi, c) * 2


def monomial_probes(chart: Chart, max_degree: int = 2, include_one: bool = False) -> list[ScalarFn]:
    out = [chart.one()] if include_one else []
    for d in range(1, max_degree + 1):
        for m in combinations_with_replacement(range(1, chart.dim + 1), d):
            f = chart.one()
            for i in m:
                f = f * chart.coord(i)
            out.append(f)
    return out


# ----- probe sweeps ----------------------------------------------------------

def fi_probe_verdict(pi, max_degree: int = 2):
    """Sweep the fundamental identity over monomial probes.

    The f-slots run over all (p-1)-subsets of monomials of degree
    1..max_degree.  The defect is a derivation in each g-slot, so the
    g-slots run over coordinate functions only; for every f-tuple the
    whole table over increasing g-index tuples is evaluated from the
    bracket definition.  Returns ``(ok, witness)``.
    """
    T = _tensor(pi)
    chart = T.chart
    n, p = chart.dim, T.degree
    coords = [chart.coord(i) for i in range(1, n + 1)]
    dpi = {J: [v.partial(k) for k in range(1, n + 1)] for J, v in T.coeffs.items()}
    probes = monomial_probes(chart, max_degree)
    for fs in combinations(probes, p - 1):
        h = [np_bracket(T, *fs, x) for x in coords]
        dh = [[hi.partial(k) for k in range(1, n + 1)] for hi in h]
        for J in multi_indices(n, p):
            acc = chart.zero()
            grad = dpi.get(J)
            if grad is not None:
                for k in range(n):
                    if h[k] and grad[k]:
                        acc = acc + h[k] * grad[k]
            for i, ji in enumerate(J):
                for k in range(1, n + 1):
                    d = dh[ji - 1][k - 1]
                    if not d:
                        continue
                    comp = T[J[:i] + (k,) + J[i + 1:]]
                    if comp:
                        acc = acc - d * comp
            if acc:
                return False, {"f": [str(f) for f in fs], "g": [f"x{j}" for j in J], "defect": str(acc)}
    return True, None


def form_probes(chart: Chart, degree: int, max_degree: int = 1) -> list[AltTensor]:
    """Monomial-coefficient forms ``m dx^I`` with ``deg m <= max_degree``."""
    out = []
    for m in monomial_probes(chart, max_degree, include_one=True):
        for I in multi_indices(chart.dim, degree):
            out.append(AltTensor(chart, degree, FORM, {I: m}))
    return out


def _pair_sweep(pi, defect, max_degree: int):
    T = _tensor(pi)
    chart = T.chart
    p = T.degree
    betas = form_probes(chart, p - 1, 0)
    for alpha in form_probes(chart, p - 1, max_degree):
        for beta in betas:
            d = defect(T, alpha, beta)
            if not d.is_zero():
                return False, {"alpha": repr(alpha), "beta": repr(beta), "defect": repr(d)}
    return True, None


def intrinsic_verdict(pi, variant: str = "iii", max_degree: int = 1):
    """Sweep an intrinsic form of the identity over monomial forms.

    Both defects are C-infinity-linear in beta and first-order
    differential operators in alpha, so constant beta and alpha with
    coefficients of degree <= 1 already decide them.
    """
    return _pair_sweep(pi, lambda T, a, b: fi_intrinsic(T, a, b, variant), max_degree)


def graph_verdict(pi, c: AltTensor | None = None, max_degree: int = 1):
    return _pair_sweep(pi, lambda T, a, b: graph_closure_defect(T, a, b, c), max_degree)
