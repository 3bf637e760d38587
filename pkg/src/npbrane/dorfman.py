"""Sections of ``TM + Lambda^{p-1} T*M``: pairing, Dorfman bracket, twists."""
from __future__ import annotations

from dataclasses import dataclass

from . import matrix as mx
from .exterior import (FORM, VECTOR, AltTensor, ext_d, flat, interior, interior_v, lie,
                       multi_indices, schouten, sharp)
from .scalarfield import Chart, ScalarFn


@dataclass(frozen=True)
class Section:
    vec: AltTensor
    form: AltTensor
    order: int

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("order must be at least 2")
        if self.vec.variance != VECTOR or self.vec.degree != 1:
            raise ValueError("vector part must be a vector field")
        if self.form.variance != FORM or self.form.degree != self.order - 1:
            raise ValueError(f"form part must be a {self.order - 1}-form")
        if self.vec.chart.ctx is not self.form.chart.ctx:
            raise ValueError("vector and form parts on different charts")

    @property
    def chart(self) -> Chart:
        return self.vec.chart

    @classmethod
    def make(cls, chart: Chart, order: int, vec: AltTensor | None = None,
             form: AltTensor | None = None) -> "Section":
        if vec is None:
            vec = AltTensor(chart, 1, VECTOR)
        if form is None:
            form = AltTensor(chart, order - 1, FORM)
        return cls(vec, form, order)

    def __add__(self, other: "Section") -> "Section":
        self._check(other)
        return Section(self.vec + other.vec, self.form + other.form, self.order)

    def __sub__(self, other: "Section") -> "Section":
        self._check(other)
        return Section(self.vec - other.vec, self.form - other.form, self.order)

    def __neg__(self):
        return Section(-self.vec, -self.form, self.order)

    def scale(self, f: ScalarFn) -> "Section":
        return Section(self.vec * f, self.form * f, self.order)

    def is_zero(self) -> bool:
        return self.vec.is_zero() and self.form.is_zero()

    def _check(self, other: "Section"):
        if other.order != self.order:
            raise ValueError(f"order mismatch {self.order} vs {other.order}")


@dataclass(frozen=True)
class TwistData:
    c: AltTensor | None = None
    zeta: AltTensor | None = None

    def validate(self, order: int):
        if self.c is not None and (self.c.variance != FORM or self.c.degree != order + 1):
            raise ValueError(f"c must be a {order + 1}-form")
        if self.zeta is not None and (self.zeta.variance != VECTOR or self.zeta.degree != order):
            raise ValueError(f"zeta must be a {order}-vector")


NO_TWIST = TwistData()


def pairing(e1: Section, e2: Section) -> AltTensor:
    """``(i_X beta + i_Y alpha) / 2`` as a (p-2)-form."""
    e1._check(e2)
    half = e1.chart.const(1) / 2
    return (interior_v(e1.vec, e2.form) + interior_v(e2.vec, e1.form)) * half


def anchor(e: Section) -> AltTensor:
    return e.vec


def _c_term(X: AltTensor, Y: AltTensor, c: AltTensor) -> AltTensor:
    # i_{X^Y} c = i_Y i_X c
    return interior_v(Y, interior_v(X, c))


def _bracket_c(e1: Section, e2: Section, c: AltTensor | None) -> Section:
    X, a = e1.vec, e1.form
    Y, b = e2.vec, e2.form
    vec = schouten(X, Y)
    form = lie(X, b) - interior_v(Y, ext_d(a))
    if c is not None:
        form = form + _c_term(X, Y, c)
    return Section(vec, form, e1.order)


def dorfman(e1: Section, e2: Section, tw: TwistData = NO_TWIST) -> Section:
    """Dorfman bracket, optionally twisted by a (p+1)-form and/or a p-vector.

    The bivector-type twist is defined by conjugation:
    ``[e1, e2]_(c, zeta) = e^{-zeta} [e^zeta e1, e^zeta e2]_c``.
    """
    e1._check(e2)
    tw.validate(e1.order)
    if tw.zeta is None:
        return _bracket_c(e1, e2, tw.c)
    z = tw.zeta
    inner = _bracket_c(twist_zeta(z, e1), twist_zeta(z, e2), tw.c)
    return twist_zeta(-z, inner)


def leibnizator(e1: Section, e2: Section, e3: Section, tw: TwistData = NO_TWIST) -> Section:
    """``[e1,[e2,e3]] - [[e1,e2],e3] - [e2,[e1,e3]]``."""
    br = lambda u, v: dorfman(u, v, tw)
    return br(e1, br(e2, e3)) - br(br(e1, e2), e3) - br(e2, br(e1, e3))


def twist_b(b: AltTensor, e: Section) -> Section:
    """``e^b (X, alpha) = (X, alpha + i_X b)``."""
    if b.variance != FORM or b.degree != e.order:
        raise ValueError(f"b must be a {e.order}-form")
    return Section(e.vec, e.form + flat(b, e.vec), e.order)


def twist_zeta(zeta: AltTensor, e: Section) -> Section:
    """``e^zeta (X, alpha) = (X + i_alpha zeta, alpha)``."""
    if zeta.variance != VECTOR or zeta.degree != e.order:
        raise ValueError(f"zeta must be a {e.order}-vector")
    return Section(e.vec + sharp(zeta, e.form), e.form, e.order)


# ----- operator (matrix) picture -------------------------------------------

def zeta_sharp_matrix(zeta: AltTensor) -> list[list[ScalarFn]]:
    """Matrix of ``alpha -> i_alpha zeta`` (columns: basis (p-1)-forms)."""
    chart = zeta.chart
    n, p = chart.dim, zeta.degree
    cols = multi_indices(n, p - 1)
    M = [[chart.zero()] * len(cols) for _ in range(n)]
    for j, I in enumerate(cols):
        img = interior(AltTensor(chart, p - 1, FORM, {I: 1}), zeta)
        for (i,), v in img.coeffs.items():
            M[i - 1][j] = v
    return M


def b_flat_matrix(b: AltTensor) -> list[list[ScalarFn]]:
    """Matrix of ``X -> i_X b`` (rows: basis (p-1)-forms)."""
    chart = b.chart
    n, p = chart.dim, b.degree
    rows = multi_indices(n, p - 1)
    ridx = {r: k for k, r in enumerate(rows)}
    M = [[chart.zero()] * n for _ in rows]
    for i in range(1, n + 1):
        img = interior_v(AltTensor(chart, 1, VECTOR, {(i,): 1}), b)
        for key, v in img.coeffs.items():
            M[ridx[key]][i - 1] = v
    return M


@dataclass
class Factorization:
    """Operators of ``e^b e^zeta = e^{zeta'} e^{(b,zeta)}`` as exact matrices."""

    zeta_prime: list[list[ScalarFn]]      # n x N
    vec_block: list[list[ScalarFn]]       # 1 - zeta' b_flat, n x n
    form_block: list[list[ScalarFn]]      # 1 + b_flat zeta_sharp, N x N
    b_block: list[list[ScalarFn]]         # b_flat, N x n
    basis: list[tuple[int, ...]]
    verified: bool

    def apply_bz(self, e: Section) -> Section:
        """Apply ``e^{(b, zeta)}``."""
        chart = e.chart
        X = _vec_col(e.vec)
        a = _form_col(e.form, self.basis)
        X2 = _apply(self.vec_block, X, chart)
        a2 = [u + v for u, v in zip(_apply(self.form_block, a, chart), _apply(self.b_block, X, chart))]
        return Section(_col_vec(chart, X2), _col_form(chart, e.order - 1, a2, self.basis), e.order)

    def apply_zeta_prime(self, e: Section) -> Section:
        chart = e.chart
        a = _form_col(e.form, self.basis)
        Z = _apply(self.zeta_prime, a, chart)
        return Section(e.vec + _col_vec(chart, Z), e.form, e.order)


def _apply(M, v, chart):
    out = []
    for row in M:
        acc = chart.zero()
        for a, b in zip(row, v):
            if a and b:
                acc = acc + a * b
        out.append(acc)
    return out


def _vec_col(X: AltTensor):
    return [X.coeffs.get((i,), X.chart.zero()) for i in range(1, X.chart.dim + 1)]


def _form_col(a: AltTensor, basis):
    return [a.coeffs.get(k, a.chart.zero()) for k in basis]


def _col_vec(chart, col):
    return AltTensor(chart, 1, VECTOR, {(i + 1,): v for i, v in enumerate(col)})


def _col_form(chart, degree, col, basis):
    return AltTensor(chart, degree, FORM, dict(zip(basis, col)))


def factor_b_zeta(b: AltTensor, zeta: AltTensor) -> Factorization:
    """Exact factorization of the composite shear ``e^b e^zeta``.

    ``zeta'_sharp = zeta_sharp (1 + b_flat zeta_sharp)^{-1}``; raises
    SingularOperator when the operator in brackets is not invertible.
    The identity is checked on every basis section before returning.
    """
    if b.degree != zeta.degree:
        raise ValueError("b and zeta must have the same degree")
    chart = b.chart
    p = b.degree
    n = chart.dim
    basis = multi_indices(n, p - 1)
    Z = zeta_sharp_matrix(zeta)
    Bf = b_flat_matrix(b)
    one, zero = chart.one(), chart.zero()
    form_block = mx.add(mx.identity(len(basis), one, zero), mx.matmul(Bf, Z, zero))
    inv = mx.inverse(form_block, one, zero)
    Zp = mx.matmul(Z, inv, zero)
    vec_block = mx.sub(mx.identity(n, one, zero), mx.matmul(Zp, Bf, zero))
    fac = Factorization(Zp, vec_block, form_block, Bf, basis, False)
    ok = True
    for e in basis_sections(chart, p):
        lhs = twist_b(b, twist_zeta(zeta, e))
        rhs = fac.apply_zeta_prime(fac.apply_bz(e))
        if (lhs - rhs).is_zero() is False:
            ok = False
            break
    fac.verified = ok
    return fac


def basis_sections(chart: Chart, order: int) -> list[Section]:
    out = []
    for i in range(1, chart.dim + 1):
        out.append(Section.make(chart, order, vec=AltTensor(chart, 1, VECTOR, {(i,): 1})))
    for I in multi_indices(chart.dim, order - 1):
        out.append(Section.make(chart, order, form=AltTensor(chart, order - 1, FORM, {I: 1})))
    return out
