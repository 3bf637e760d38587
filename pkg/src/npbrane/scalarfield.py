"""Exact multivariate rational functions over Q.

A :class:`ScalarFn` is a reduced fraction of two ``flint.fmpq_mpoly``
polynomials living on a :class:`Chart`.  The pair is kept canonical:
``gcd(num, den) == 1`` and ``den`` is monic with respect to the
graded-lexicographic order, so equality is a plain comparison of the
two polynomials and zero is always ``0/1``.
"""
from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import flint

from .errors import ParseError, PoleError

Number = int | Fraction


@dataclass(frozen=True)
class Chart:
    """A coordinate chart ``x1..xn``, optionally extended by parameters.

    Parameters (e.g. a flow time ``t``) are extra variables of the
    coefficient field that are not coordinates: exterior calculus only
    ever differentiates along the first ``dim`` variables.
    """

    dim: int
    names: tuple[str, ...] = ()
    params: tuple[str, ...] = ()
    _ctx: object = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("chart dimension must be at least 1")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"x{i}" for i in range(1, self.dim + 1)))
        if len(self.names) != self.dim:
            raise ValueError("need exactly dim coordinate names")
        allnames = self.names + self.params
        if len(set(allnames)) != len(allnames):
            raise ValueError("coordinate and parameter names must be distinct")
        object.__setattr__(self, "_ctx", flint.fmpq_mpoly_ctx.get(allnames, "deglex"))

    @property
    def ctx(self):
        return self._ctx

    @property
    def nvars(self) -> int:
        return self.dim + len(self.params)

    def with_params(self, *params: str) -> "Chart":
        return Chart(self.dim, self.names, self.params + tuple(params))

    def base(self) -> "Chart":
        """The chart with all parameters dropped."""
        return Chart(self.dim, self.names)

    def coord(self, i: int) -> "ScalarFn":
        """Coordinate function ``x_i`` (1-based)."""
        if not 1 <= i <= self.dim:
            raise IndexError(f"coordinate index {i} outside 1..{self.dim}")
        return ScalarFn._raw(self, self.ctx.gens()[i - 1], self.ctx.constant(1))

    def param(self, name: str) -> "ScalarFn":
        k = self.dim + self.params.index(name)
        return ScalarFn._raw(self, self.ctx.gens()[k], self.ctx.constant(1))

    def const(self, c: Number) -> "ScalarFn":
        return ScalarFn.constant(self, c)

    def zero(self) -> "ScalarFn":
        return ScalarFn.constant(self, 0)

    def one(self) -> "ScalarFn":
        return ScalarFn.constant(self, 1)

    def parse(self, text: str) -> "ScalarFn":
        return parse_scalar(self, text)


def _to_fmpq(c: Number) -> flint.fmpq:
    if isinstance(c, Fraction):
        return flint.fmpq(c.numerator, c.denominator)
    if isinstance(c, flint.fmpq):
        return c
    if isinstance(c, int):
        return flint.fmpq(c)
    raise TypeError(f"not an exact rational: {c!r}")


def _fmpq_to_fraction(q) -> Fraction:
    return Fraction(int(q.p), int(q.q))


class ScalarFn:
    """Immutable canonical rational function on a chart."""

    __slots__ = ("chart", "num", "den", "_hash")

    def __init__(self, chart: Chart, num, den=None):
        if den is None:
            den = chart.ctx.constant(1)
        if den.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        self.chart = chart
        self.num, self.den = _canonical(num, den)
        self._hash = None

    @classmethod
    def _raw(cls, chart, num, den):
        obj = cls.__new__(cls)
        obj.chart = chart
        obj.num = num
        obj.den = den
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, chart: Chart, c: Number) -> "ScalarFn":
        return cls._raw(chart, chart.ctx.constant(_to_fmpq(c)), chart.ctx.constant(1))

    # ----- predicates -------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_one()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        return _fmpq_to_fraction(self.num.leading_coefficient()) if not self.num.is_zero() else Fraction(0)

    # ----- arithmetic --------------------------------------------------
    def _coerce(self, other) -> "ScalarFn":
        if isinstance(other, ScalarFn):
            if other.chart.ctx is not self.chart.ctx:
                raise ValueError("scalar functions live on different charts")
            return other
        if isinstance(other, (int, Fraction, flint.fmpq)):
            return ScalarFn.constant(self.chart, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.num.is_zero():
            return self
        if self.num.is_zero():
            return o
        if self.den.is_one() and o.den.is_one():
            return ScalarFn._raw(self.chart, self.num + o.num, self.den)
        if self.den == o.den:
            n = self.num + o.num
            g = n.gcd(self.den)
            if g.is_one():
                return ScalarFn._raw(self.chart, n, self.den)
            return ScalarFn(self.chart, n, self.den)
        g = self.den.gcd(o.den)
        if g.is_one():
            return ScalarFn(self.chart, self.num * o.den + o.num * self.den, self.den * o.den)
        d1 = self.den / g
        d2 = o.den / g
        return ScalarFn(self.chart, self.num * d2 + o.num * d1, self.den * d2)

    __radd__ = __add__

    def __neg__(self):
        return ScalarFn._raw(self.chart, -self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.num.is_zero() or o.num.is_zero():
            return ScalarFn._raw(self.chart, self.chart.ctx.constant(0), self.chart.ctx.constant(1))
        if self.den.is_one() and o.den.is_one():
            return ScalarFn._raw(self.chart, self.num * o.num, self.den)
        # cross-cancel before multiplying keeps the result reduced
        g1 = self.num.gcd(o.den)
        g2 = o.num.gcd(self.den)
        n = (self.num / g1) * (o.num / g2)
        d = (self.den / g2) * (o.den / g1)
        lc = d.leading_coefficient()
        if lc != 1:
            n = n / lc
            d = d / lc
        return ScalarFn._raw(self.chart, n, d)

    __rmul__ = __mul__

    def inverse(self) -> "ScalarFn":
        if self.num.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        return ScalarFn(self.chart, self.den, self.num)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer exponents")
        if k < 0:
            return self.inverse() ** (-k)
        return ScalarFn._raw(self.chart, self.num**k, self.den**k)

    # ----- calculus ----------------------------------------------------
    def partial(self, i: int) -> "ScalarFn":
        """Exact partial derivative along coordinate ``x_i`` (1-based)."""
        if not 1 <= i <= self.chart.dim:
            raise IndexError(f"coordinate index {i} outside 1..{self.chart.dim}")
        return self._dvar(i - 1)

    def dparam(self, name: str) -> "ScalarFn":
        return self._dvar(self.chart.dim + self.chart.params.index(name))

    def _dvar(self, k: int) -> "ScalarFn":
        dn = self.num.derivative(k)
        if self.den.is_one():
            return ScalarFn._raw(self.chart, dn, self.den)
        dd = self.den.derivative(k)
        if dd.is_zero():
            return ScalarFn(self.chart, dn, self.den)
        return ScalarFn(self.chart, dn * self.den - self.num * dd, self.den * self.den)

    def subs(self, values: dict[str, Number]) -> "ScalarFn":
        """Substitute exact rationals for some variables (result stays on this chart)."""
        vals = {k: _to_fmpq(v) for k, v in values.items()}
        den = self.den.subs(vals)
        if den.is_zero():
            raise PoleError("denominator vanishes under substitution")
        return ScalarFn(self.chart, self.num.subs(vals), den)

    def to_chart(self, chart: Chart) -> "ScalarFn":
        """Re-express on another chart by variable name (missing names map to 0)."""
        if chart.ctx is self.chart.ctx:
            return self
        num = self.num.project_to_context(chart.ctx)
        den = self.den.project_to_context(chart.ctx)
        if den.is_zero():
            raise PoleError("denominator vanishes when changing chart")
        return ScalarFn(chart, num, den)

    def eval(self, point: Sequence[Number]) -> Fraction:
        """Exact value at a rational point (one value per chart variable)."""
        if len(point) != self.chart.nvars:
            raise ValueError(f"point has {len(point)} entries, chart has {self.chart.nvars} variables")
        vals = [_to_fmpq(v) for v in point]
        d = self.den(*vals)
        if d == 0:
            raise PoleError(f"denominator vanishes at {tuple(point)}")
        return _fmpq_to_fraction(self.num(*vals) / d)

    # ----- comparison / display ---------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ScalarFn.constant(self.chart, other)
        if not isinstance(other, ScalarFn):
            return NotImplemented
        return self.chart.ctx is other.chart.ctx and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((tuple(self.num.to_dict().items()), tuple(self.den.to_dict().items())))
        return self._hash

    def __bool__(self):
        return not self.num.is_zero()

    def __str__(self):
        if self.den.is_one():
            return str(self.num)
        # print with integral coprime denominator coefficients
        coeffs = [c for _, c in self.den.terms()]
        lcm = 1
        for c in coeffs:
            lcm = lcm * int(c.q) // math.gcd(lcm, int(c.q))
        g = 0
        for c in coeffs:
            g = math.gcd(g, int(c.p) * lcm // int(c.q))
        scale = flint.fmpq(lcm, g)
        num, den = self.num * scale, self.den * scale
        n = str(num)
        if len(num) > 1:
            n = f"({n})"
        return f"{n}/({den})"

    def __repr__(self):
        return f"ScalarFn({self})"

    def latex(self) -> str:
        s = str(self)
        return s.replace("*", " ")

    @cached_property
    def _terms(self):
        return list(self.num.terms()), list(self.den.terms())


def _canonical(num, den):
    if num.is_zero():
        return num, den.context().constant(1)
    g = num.gcd(den)
    if not g.is_one():
        num = num / g
        den = den / g
    lc = den.leading_coefficient()
    if lc != 1:
        num = num / lc
        den = den / lc
    return num, den


# ----- expression grammar -------------------------------------------------

_ALLOWED = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Constant, ast.Name,
            ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd, ast.Load)


def parse_scalar(chart: Chart, text: str) -> ScalarFn:
    """Parse a coefficient string such as ``"1/(1+x4) - 3/2*x1^2"``.

    Identifiers are the chart's coordinate and parameter names; literals
    are integers (``p/q`` is just division); ``^`` is exponentiation with
    an integer exponent.
    """
    src = text.replace("^", "**")
    try:
        tree = ast.parse(src.strip(), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse coefficient {text!r}: {exc.msg}", 1, exc.offset) from None
    names = {n: chart.coord(i + 1) for i, n in enumerate(chart.names)}
    names.update({p: chart.param(p) for p in chart.params})
    return normalize(tree, chart, names)


def normalize(tree, chart: Chart, names: dict[str, ScalarFn]) -> ScalarFn:
    """Evaluate a restricted Python expression tree to a canonical ScalarFn."""

    def walk(node):
        if not isinstance(node, _ALLOWED):
            raise ParseError(f"unsupported syntax {type(node).__name__}", 1, getattr(node, "col_offset", 0) + 1)
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, int):
                raise ParseError(f"non-integer literal {node.value!r}", 1, node.col_offset + 1)
            return chart.const(node.value)
        if isinstance(node, ast.Name):
            if node.id not in names:
                raise ParseError(f"unknown variable {node.id!r}", 1, node.col_offset + 1)
            return names[node.id]
        if isinstance(node, ast.UnaryOp):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        left = walk(node.left)
        if isinstance(node.op, ast.Pow):
            e = node.right
            sign = 1
            if isinstance(e, ast.UnaryOp) and isinstance(e.op, (ast.USub, ast.UAdd)):
                sign = -1 if isinstance(e.op, ast.USub) else 1
                e = e.operand
            if not (isinstance(e, ast.Constant) and isinstance(e.value, int)):
                raise ParseError("exponent must be an integer literal", 1, node.right.col_offset + 1)
            return left ** (sign * e.value)
        right = walk(node.right)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if right.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        return left / right

    return walk(tree)


def to_float_terms(f: ScalarFn):
    """Numerator and denominator as ``(coeffs, exponents)`` float arrays."""
    import numpy as np

    out = []
    for poly in (f.num, f.den):
        terms = list(poly.terms())
        if not terms:
            out.append((np.zeros(0), np.zeros((0, f.chart.nvars), dtype=np.int64)))
            continue
        exps = np.array([t[0] for t in terms], dtype=np.int64)
        coeffs = np.array([float(_fmpq_to_fraction(t[1])) for t in terms])
        out.append((coeffs, exps))
    return out


def sum_fns(items: Iterable[ScalarFn], chart: Chart) -> ScalarFn:
    acc = chart.zero()
    for it in items:
        acc = acc + it
    return acc
