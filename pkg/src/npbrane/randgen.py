"""Seeded random instances: polynomials, tensors, sections, NP tensors."""
from __future__ import annotations

import random
from itertools import combinations_with_replacement

from .exterior import FORM, VECTOR, AltTensor, ext_d, interior, multi_indices, wedge, decomposable, df
from .scalarfield import Chart, ScalarFn


class Gen:
    """Thin wrapper around :class:`random.Random` with domain helpers."""

    def __init__(self, seed: int = 0):
        if not -(2**63) <= seed < 2**64:
            raise OverflowError("seed must fit in 64 bits")
        self.rng = random.Random(seed)

    def coeff(self, lo: int = -3, hi: int = 3, nonzero: bool = False) -> int:
        while True:
            c = self.rng.randint(lo, hi)
            if c or not nonzero:
                return c

    def poly(self, chart: Chart, degree: int = 2, terms: int = 3, density: float = 1.0) -> ScalarFn:
        """Sparse random polynomial in the chart coordinates."""
        monos = []
        for d in range(degree + 1):
            monos.extend(combinations_with_replacement(range(1, chart.dim + 1), d))
        acc = chart.zero()
        for _ in range(terms):
            if self.rng.random() > density:
                continue
            m = self.rng.choice(monos)
            t = chart.const(self.coeff(nonzero=True))
            for i in m:
                t = t * chart.coord(i)
            acc = acc + t
        return acc

    def nonzero_poly(self, chart: Chart, degree: int = 2, terms: int = 3) -> ScalarFn:
        while True:
            f = self.poly(chart, degree, terms)
            if f:
                return f

    def rational(self, chart: Chart, degree: int = 1) -> ScalarFn:
        """Random quotient with denominator of the form ``c + poly``, c != 0."""
        num = self.nonzero_poly(chart, degree)
        den = chart.const(self.coeff(1, 3)) + self.poly(chart, degree, 2)
        if not den:
            den = chart.one()
        return num / den

    def tensor(self, chart: Chart, degree: int, variance: str, poly_degree: int = 2,
               fill: float = 0.6) -> AltTensor:
        data = {}
        for key in multi_indices(chart.dim, degree):
            if self.rng.random() < fill:
                data[key] = self.poly(chart, poly_degree, 2)
        return AltTensor(chart, degree, variance, data)

    def form(self, chart: Chart, degree: int, poly_degree: int = 2, fill: float = 0.6) -> AltTensor:
        return self.tensor(chart, degree, FORM, poly_degree, fill)

    def vector(self, chart: Chart, degree: int, poly_degree: int = 2, fill: float = 0.6) -> AltTensor:
        return self.tensor(chart, degree, VECTOR, poly_degree, fill)

    def closed_form(self, chart: Chart, degree: int, poly_degree: int = 2) -> AltTensor:
        """Exact (hence closed) form ``d(random)`` plus a random constant form."""
        base = ext_d(self.form(chart, degree - 1, poly_degree + 1)) if degree >= 1 else AltTensor(chart, 0, FORM)
        const = {k: self.coeff() for k in multi_indices(chart.dim, degree) if self.rng.random() < 0.4}
        return base + AltTensor(chart, degree, FORM, const)

    def np_tensor(self, chart: Chart, p: int, poly_degree: int = 2) -> AltTensor:
        """Integrable decomposable p-vector ``f * i_{dg_1^...^dg_{n-p}} (d_1^...^d_n)``.

        Its coefficients are the p x p minors structure of a Jacobian, so
        it is a Nambu-Poisson tensor for every choice of f, g.
        """
        n = chart.dim
        while True:
            top = AltTensor(chart, n, VECTOR, {tuple(range(1, n + 1)): 1})
            dg = AltTensor.scalar(chart.one(), FORM)
            for _ in range(n - p):
                dg = wedge(dg, df(self.nonzero_poly(chart, poly_degree, 3)))
            f = self.nonzero_poly(chart, poly_degree, 2)
            pi = interior(dg, top) * f
            if not pi.is_zero():
                return pi

    def np_tensor_low(self, chart: Chart, p: int) -> AltTensor:
        """Like :meth:`np_tensor` but with coefficients of degree at most 2.

        One quadratic g (linear gradient), the others linear, f linear.
        """
        n = chart.dim
        while True:
            top = AltTensor(chart, n, VECTOR, {tuple(range(1, n + 1)): 1})
            dg = AltTensor.scalar(chart.one(), FORM)
            for k in range(n - p):
                dg = wedge(dg, df(self.nonzero_poly(chart, 2 if k == 0 else 1, 3)))
            pi = interior(dg, top) * self.nonzero_poly(chart, 1, 2)
            if not pi.is_zero():
                return pi

    def product_tensor(self, chart: Chart, p: int, poly_degree: int = 2) -> AltTensor:
        """``f v_1^...^v_p`` for random polynomial vector fields (decomposable)."""
        while True:
            out = AltTensor.scalar(self.nonzero_poly(chart, poly_degree, 2), VECTOR)
            for _ in range(p):
                out = wedge(out, self.vector(chart, 1, poly_degree, 0.8))
            if not out.is_zero():
                return out

    def nondecomposable(self, chart: Chart, p: int, poly_degree: int = 2) -> AltTensor:
        if p <= 1 or p >= chart.dim - 1:
            raise ValueError(f"every {p}-vector in dimension {chart.dim} is decomposable")
        while True:
            T = self.vector(chart, p, poly_degree, 0.5)
            if not T.is_zero() and not decomposable(T):
                return T
