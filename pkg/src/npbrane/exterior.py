"""Sparse alternating tensors and their calculus.

Coefficients are stored on strictly increasing multi-indices only, so a
p-vector ``T`` means ``sum_{i1<...<ip} T^I d_{i1} ^ ... ^ d_{ip}`` with no
factorial weights.  Conventions used throughout:

* contraction hits the first slot:
  ``i_X(dx^{j1}^...^dx^{jp}) = sum_k (-1)^(k-1) X^{jk} dx^{J minus jk}``;
* multi-insertions nest left to right, ``i_{X^Y} = i_Y o i_X``, for both
  forms into vectors and vectors into forms;
* ``sharp(pi, a) = i_a pi`` and ``flat(b, X) = i_X b``;
* ``pair(b, pi) = sum_I b_I pi^I``;
* the Schouten bracket is the odd Poisson bracket of multivectors viewed
  as functions of odd momenta (see :func:`schouten`), which gives
  ``[X, T] = L_X T``.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

from .scalarfield import Chart, ScalarFn

VECTOR = "vector"
FORM = "form"


def merge_sign(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    """Sign and sorted key of ``e_a ^ e_b``; sign 0 when indices repeat."""
    if set(a) & set(b):
        return 0, ()
    inv = 0
    for x in a:
        for y in b:
            if x > y:
                inv += 1
    return (-1 if inv & 1 else 1), tuple(sorted(a + b))


def contract_sign(outer: tuple[int, ...], key: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    """Sign and remainder of inserting ``outer`` (in order) into ``key``.

    Each index in turn is removed from its position in the remaining
    key, contributing ``(-1)^position``.
    """
    rest = list(key)
    sign = 1
    for i in outer:
        try:
            k = rest.index(i)
        except ValueError:
            return 0, ()
        if k & 1:
            sign = -sign
        del rest[k]
    return sign, tuple(rest)


class AltTensor:
    """Alternating p-vector or p-form with ScalarFn coefficients."""

    __slots__ = ("chart", "degree", "variance", "coeffs")

    def __init__(self, chart: Chart, degree: int, variance: str, coeffs: Mapping | None = None):
        if variance not in (VECTOR, FORM):
            raise ValueError(f"unknown variance {variance!r}")
        if degree < 0:
            raise ValueError("negative degree")
        self.chart = chart
        self.degree = degree
        self.variance = variance
        clean = {}
        for key, val in (coeffs or {}).items():
            key = tuple(key)
            if len(key) != degree:
                raise ValueError(f"index {key} has wrong length for degree {degree}")
            if any(b <= a for a, b in zip(key, key[1:])):
                raise ValueError(f"index {key} is not strictly increasing")
            if key and not (1 <= key[0] and key[-1] <= chart.dim):
                raise ValueError(f"index {key} outside 1..{chart.dim}")
            if not isinstance(val, ScalarFn):
                val = chart.const(val)
            if val:
                clean[key] = val
        self.coeffs = clean

    # ----- constructors -------------------------------------------------
    @classmethod
    def zero(cls, chart: Chart, degree: int, variance: str) -> "AltTensor":
        return cls(chart, degree, variance)

    @classmethod
    def scalar(cls, f: ScalarFn, variance: str = FORM) -> "AltTensor":
        return cls(f.chart, 0, variance, {(): f})

    @classmethod
    def basis(cls, chart: Chart, index: Iterable[int], variance: str, coeff=1) -> "AltTensor":
        """``coeff`` times the wedge of the given basis elements, in that order."""
        index = tuple(index)
        out = cls.scalar(chart.one(), variance)
        for i in index:
            out = out.wedge(cls(chart, 1, variance, {(i,): 1}))
        if not isinstance(coeff, ScalarFn):
            coeff = chart.const(coeff)
        return out * coeff

    @classmethod
    def from_dict(cls, chart: Chart, degree: int, variance: str, data: Mapping) -> "AltTensor":
        """Build from arbitrary (unsorted) index tuples; antisymmetry applied."""
        acc: dict = {}
        for idx, val in data.items():
            idx = tuple(idx)
            if len(set(idx)) < len(idx):
                continue
            order = sorted(range(len(idx)), key=lambda k: idx[k])
            sign = _perm_sign(order)
            key = tuple(sorted(idx))
            if not isinstance(val, ScalarFn):
                val = chart.const(val)
            acc[key] = acc.get(key, chart.zero()) + (val if sign > 0 else -val)
        return cls(chart, degree, variance, acc)

    # ----- basic algebra ------------------------------------------------
    def _check(self, other: "AltTensor"):
        if other.chart.ctx is not self.chart.ctx:
            raise ValueError("tensors live on different charts")
        if other.variance != self.variance:
            raise ValueError("variance mismatch")
        if other.degree != self.degree:
            raise ValueError(f"degree mismatch {self.degree} vs {other.degree}")

    def __add__(self, other: "AltTensor") -> "AltTensor":
        self._check(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return AltTensor(self.chart, self.degree, self.variance, out)

    def __neg__(self):
        return AltTensor(self.chart, self.degree, self.variance, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, f):
        if isinstance(f, (int, Fraction)):
            f = self.chart.const(f)
        if not isinstance(f, ScalarFn):
            return NotImplemented
        if not f:
            return AltTensor(self.chart, self.degree, self.variance)
        return AltTensor(self.chart, self.degree, self.variance, {k: v * f for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, AltTensor):
            return NotImplemented
        return (self.variance == other.variance and self.degree == other.degree
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.variance, self.degree, frozenset(self.coeffs.items())))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, key) -> ScalarFn:
        """Component on an arbitrary index tuple (antisymmetry applied)."""
        key = tuple(key)
        if len(set(key)) < len(key):
            return self.chart.zero()
        order = sorted(range(len(key)), key=lambda k: key[k])
        sign = _perm_sign(order)
        val = self.coeffs.get(tuple(sorted(key)))
        if val is None:
            return self.chart.zero()
        return val if sign > 0 else -val

    def map(self, fn) -> "AltTensor":
        return AltTensor(self.chart, self.degree, self.variance, {k: fn(v) for k, v in self.coeffs.items()})

    def to_chart(self, chart: Chart) -> "AltTensor":
        return AltTensor(chart, self.degree, self.variance, {k: v.to_chart(chart) for k, v in self.coeffs.items()})

    def scalar_value(self) -> ScalarFn:
        if self.degree != 0:
            raise ValueError("not a degree-0 tensor")
        return self.coeffs.get((), self.chart.zero())

    def __repr__(self):
        sym = "d" if self.variance == VECTOR else "dx"
        if not self.coeffs:
            return f"AltTensor({self.variance}, {self.degree}, 0)"
        parts = []
        for k in sorted(self.coeffs):
            basis = "^".join(f"{sym}{i}" for i in k) or "1"
            parts.append(f"({self.coeffs[k]})*{basis}")
        return f"AltTensor({self.variance}, {self.degree}, " + " + ".join(parts) + ")"

    def wedge(self, other: "AltTensor") -> "AltTensor":
        return wedge(self, other)


def _perm_sign(order: list[int]) -> int:
    sign = 1
    seen = [False] * len(order)
    for i in range(len(order)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _term_sum(chart, degree, variance, items) -> AltTensor:
    acc: dict = {}
    zero = chart.zero()
    for key, val in items:
        if key in acc:
            acc[key] = acc[key] + val
        else:
            acc[key] = val
    return AltTensor(chart, degree, variance, {k: v for k, v in acc.items() if v != zero})


# ----- operations ----------------------------------------------------------

def wedge(A: AltTensor, B: AltTensor) -> AltTensor:
    if A.variance != B.variance:
        raise ValueError("wedge of a vector with a form")
    deg = A.degree + B.degree
    if deg > A.chart.dim:
        return AltTensor(A.chart, deg, A.variance)
    items = []
    for ka, va in A.coeffs.items():
        for kb, vb in B.coeffs.items():
            s, key = merge_sign(ka, kb)
            if s:
                v = va * vb
                items.append((key, v if s > 0 else -v))
    return _term_sum(A.chart, deg, A.variance, items)


def _insert(outer: AltTensor, inner: AltTensor) -> AltTensor:
    if outer.degree > inner.degree:
        raise ValueError(f"cannot insert degree {outer.degree} into degree {inner.degree}")
    items = []
    for ko, vo in outer.coeffs.items():
        for ki, vi in inner.coeffs.items():
            s, rest = contract_sign(ko, ki)
            if s:
                v = vo * vi
                items.append((rest, v if s > 0 else -v))
    return _term_sum(inner.chart, inner.degree - outer.degree, inner.variance, items)


def interior(A: AltTensor, T: AltTensor) -> AltTensor:
    """Insert the q-form ``A`` into the p-vector ``T`` (``i_A T``)."""
    if A.variance != FORM or T.variance != VECTOR:
        raise ValueError("interior expects (form, vector)")
    return _insert(A, T)


def interior_v(X: AltTensor, B: AltTensor) -> AltTensor:
    """Insert the q-vector ``X`` into the p-form ``B`` (``i_X B``)."""
    if X.variance != VECTOR or B.variance != FORM:
        raise ValueError("interior_v expects (vector, form)")
    return _insert(X, B)


def sharp(pi: AltTensor, alpha: AltTensor) -> AltTensor:
    return interior(alpha, pi)


def flat(b: AltTensor, X: AltTensor) -> AltTensor:
    return interior_v(X, b)


def pair(b: AltTensor, pi: AltTensor) -> ScalarFn:
    """Full pairing ``sum_I b_I pi^I`` over ordered indices."""
    if b.degree != pi.degree:
        raise ValueError("pairing needs equal degrees")
    acc = b.chart.zero()
    for k, v in b.coeffs.items():
        w = pi.coeffs.get(k)
        if w is not None:
            acc = acc + v * w
    return acc


def ext_d(B: AltTensor) -> AltTensor:
    if B.variance != FORM:
        raise ValueError("exterior derivative of a multivector")
    n = B.chart.dim
    if B.degree >= n:
        return AltTensor(B.chart, B.degree + 1, FORM)
    items = []
    for key, v in B.coeffs.items():
        for k in range(1, n + 1):
            if k in key:
                continue
            dv = v.partial(k)
            if not dv:
                continue
            s, nk = merge_sign((k,), key)
            items.append((nk, dv if s > 0 else -dv))
    return _term_sum(B.chart, B.degree + 1, FORM, items)


def df(f: ScalarFn) -> AltTensor:
    return ext_d(AltTensor.scalar(f, FORM))


def vector_field(chart: Chart, comps: Iterable) -> AltTensor:
    return AltTensor(chart, 1, VECTOR, {(i + 1,): c for i, c in enumerate(comps)})


def apply_vf(X: AltTensor, f: ScalarFn) -> ScalarFn:
    acc = f.chart.zero()
    for (i,), v in X.coeffs.items():
        acc = acc + v * f.partial(i)
    return acc


def _dright(T: AltTensor, i: int) -> AltTensor:
    """Right derivative by the odd momentum of index ``i``."""
    p = T.degree
    out = {}
    for key, v in T.coeffs.items():
        if i in key:
            k = key.index(i)
            rest = key[:k] + key[k + 1:]
            out[rest] = v if (p - 1 - k) % 2 == 0 else -v
    return AltTensor(T.chart, p - 1, VECTOR, out)


def _dx(T: AltTensor, i: int) -> AltTensor:
    return AltTensor(T.chart, T.degree, T.variance, {k: v.partial(i) for k, v in T.coeffs.items()})


def schouten(P: AltTensor, Q: AltTensor) -> AltTensor:
    """Schouten bracket of multivectors.

    ``[P, Q] = sum_i (P d<_i)(d_i Q) - (-1)^((p-1)(q-1)) (Q d<_i)(d_i P)``
    where ``d<_i`` is the right derivative in the odd variable dual to
    ``x_i``.  Degree-0 arguments are functions.
    """
    if P.variance != VECTOR or Q.variance != VECTOR:
        raise ValueError("schouten expects multivectors")
    p, q = P.degree, Q.degree
    chart = P.chart
    deg = p + q - 1
    if deg < 0:
        return AltTensor(chart, 0, VECTOR)
    acc = AltTensor(chart, deg, VECTOR) if deg <= chart.dim else None
    if acc is None:
        return AltTensor(chart, deg, VECTOR)
    sgn = -1 if ((p - 1) * (q - 1)) % 2 else 1
    for i in range(1, chart.dim + 1):
        if p > 0:
            acc = acc + wedge(_dright(P, i), _dx(Q, i))
        if q > 0:
            t = wedge(_dright(Q, i), _dx(P, i))
            acc = acc - t if sgn > 0 else acc + t
    return acc


def lie(X: AltTensor, T: AltTensor) -> AltTensor:
    """Lie derivative along the vector field ``X``."""
    if X.variance != VECTOR or X.degree != 1:
        raise ValueError("lie expects a vector field")
    if T.variance == VECTOR:
        return schouten(X, T)
    out = interior_v(X, ext_d(T))
    if T.degree > 0:
        out = out + ext_d(interior_v(X, T))
    return out


def multi_indices(n: int, k: int) -> list[tuple[int, ...]]:
    return list(combinations(range(1, n + 1), k))


def decomposable(T: AltTensor, witness: bool = False):
    """Plucker test: ``sum_k (-1)^k T^{a minus a_k} T^{a_k J} = 0``.

    ``a`` ranges over increasing (p+1)-sets and ``J`` over increasing
    (p-1)-sets.  Returns a boolean, or ``(bool, witnesses)`` on request.
    """
    p = T.degree
    n = T.chart.dim
    if p <= 1 or p >= n - 1:
        return (True, []) if witness else True
    bad = []
    for a in multi_indices(n, p + 1):
        for J in multi_indices(n, p - 1):
            acc = T.chart.zero()
            for k, ak in enumerate(a):
                if ak in J:
                    continue
                left = T.coeffs.get(a[:k] + a[k + 1:])
                if left is None:
                    continue
                right = T[(ak,) + J]
                if right:
                    term = left * right
                    acc = acc + term if k % 2 == 0 else acc - term
            if acc:
                bad.append((a, J))
                if not witness:
                    return False
    return (not bad, bad) if witness else not bad


def sharp_matrix(T: AltTensor, k: int) -> list[list[ScalarFn]]:
    """Matrix of ``a -> i_a T`` from k-forms to (p-k)-vectors in the basis order."""
    rows = multi_indices(T.chart.dim, T.degree - k)
    cols = multi_indices(T.chart.dim, k)
    zero = T.chart.zero()
    mat = [[zero] * len(cols) for _ in rows]
    ridx = {r: i for i, r in enumerate(rows)}
    for j, c in enumerate(cols):
        img = interior(AltTensor(T.chart, k, FORM, {c: 1}), T)
        for key, v in img.coeffs.items():
            mat[ridx[key]][j] = v
    return mat


def as_vector(T: AltTensor, basis: list[tuple[int, ...]]) -> list[ScalarFn]:
    zero = T.chart.zero()
    return [T.coeffs.get(k, zero) for k in basis]


def from_vector(chart: Chart, degree: int, variance: str, basis, values) -> AltTensor:
    return AltTensor(chart, degree, variance, dict(zip(basis, values)))
