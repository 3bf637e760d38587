"""Gauge flows of Nambu-Poisson tensors and the semiclassical Seiberg-Witten map.

Symbolic part: the closed form ``pi_t# = pi# (1 + t b_flat pi#)^{-1}``,
its defining ODE, and the truncated ``mu`` series.  Numeric part: a
fixed-step RK4 integration of ``x' = (pi_t# a)(x)`` together with its
variational equation, used to push ``pi_1`` forward and compare with
``pi`` at the endpoint.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

from . import matrix as mx
from .dorfman import b_flat_matrix, zeta_sharp_matrix
from .errors import PoleEncountered, StepUnderflow
from .exterior import FORM, AltTensor, ext_d, lie, multi_indices, sharp
from .nambu import gauge_transform
from .scalarfield import Chart, ScalarFn

T_PARAM = "t"


@dataclass(frozen=True)
class FlowConfig:
    t_end: Fraction = Fraction(1)
    step: Fraction = Fraction(1, 1000)
    tol: float = 1e-6
    max_steps: int = 10**6

    def __post_init__(self):
        object.__setattr__(self, "t_end", Fraction(self.t_end))
        object.__setattr__(self, "step", Fraction(self.step))
        if self.step <= 0:
            raise StepUnderflow("step must be positive")
        if self.step > self.t_end:
            raise ValueError("step larger than the integration interval")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


@dataclass
class FlowResult:
    endpoint: np.ndarray
    jacobian: np.ndarray
    pushforward_defect: float = float("nan")
    steps: int = 0


def time_chart(chart: Chart) -> Chart:
    if T_PARAM in chart.params:
        return chart
    return chart.with_params(T_PARAM)


def pi_t(pi: AltTensor, b: AltTensor) -> AltTensor:
    """Closed-form ``pi_t`` on the chart extended by ``t``."""
    ct = time_chart(pi.chart)
    P = pi.to_chart(ct)
    B = b.to_chart(ct)
    return gauge_transform(P, B, t=ct.param(T_PARAM))


def at_time(T: AltTensor, t, base: Chart) -> AltTensor:
    """Specialize a t-dependent tensor at a rational time."""
    return AltTensor(base, T.degree, T.variance,
                     {k: v.subs({T_PARAM: Fraction(t)}).to_chart(base) for k, v in T.coeffs.items()})


def ode_defect(pi: AltTensor, b: AltTensor):
    """``d/dt pi_t# + pi_t# b_flat pi_t#`` as an exact matrix in (x, t).

    Rows index coordinates, columns basis (p-1)-forms.  It is zero
    exactly when the closed form solves the gauge ODE.
    """
    Pt = pi_t(pi, b)
    ct = Pt.chart
    S = zeta_sharp_matrix(Pt)
    dS = mx.map_entries(S, lambda e: e.dparam(T_PARAM))
    Bf = b_flat_matrix(b.to_chart(ct))
    zero = ct.zero()
    rhs = mx.matmul(mx.matmul(S, Bf, zero), S, zero)
    return mx.add(dS, rhs)


def flow_field(pi: AltTensor, a: AltTensor, sign: int = 1) -> AltTensor:
    """The time-dependent vector field ``sign * pi_t# a`` with ``b = da``."""
    b = ext_d(a)
    Pt = pi_t(pi, b)
    X = sharp(Pt, a.to_chart(Pt.chart))
    return X if sign > 0 else -X


# ----- numeric evaluation ----------------------------------------------------

class _Compiled:
    """Vectorized evaluator for a ScalarFn over the chart variables."""

    def __init__(self, f: ScalarFn):
        from .scalarfield import to_float_terms

        (self.nc, self.ne), (self.dc, self.de) = to_float_terms(f)
        self.const_den = f.den.is_one()

    @staticmethod
    def _poly(coeffs, exps, pts):
        if coeffs.size == 0:
            return np.zeros(pts.shape[0])
        # pts: (m, v); exps: (terms, v)
        mon = np.prod(pts[:, None, :] ** exps[None, :, :], axis=2)
        return mon @ coeffs

    def num_den(self, pts):
        num = self._poly(self.nc, self.ne, pts)
        den = np.ones(pts.shape[0]) if self.const_den else self._poly(self.dc, self.de, pts)
        return num, den


class _FieldEvaluator:
    """Evaluates X(x, t) and its x-Jacobian for a batch of points."""

    def __init__(self, X: AltTensor):
        ct = X.chart
        n = ct.dim
        self.n = n
        zero = ct.zero()
        comps = [X.coeffs.get((i,), zero) for i in range(1, n + 1)]
        self.f = [_Compiled(c) for c in comps]
        self.df = [[_Compiled(c.partial(j)) for j in range(1, n + 1)] for c in comps]
        self.dens = [fc for fc in self.f if not fc.const_den]

    def _pts(self, x, t):
        return np.hstack([x, np.full((x.shape[0], 1), t)])

    def denominators(self, x, t):
        pts = self._pts(x, t)
        if not self.dens:
            return np.ones((x.shape[0], 1))
        return np.stack([c.num_den(pts)[1] for c in self.dens], axis=1)

    def field(self, x, t):
        pts = self._pts(x, t)
        out = np.empty_like(x)
        for i, c in enumerate(self.f):
            num, den = c.num_den(pts)
            out[:, i] = num / den
        return out

    def jac(self, x, t):
        pts = self._pts(x, t)
        m = x.shape[0]
        out = np.empty((m, self.n, self.n))
        for i in range(self.n):
            for j in range(self.n):
                num, den = self.df[i][j].num_den(pts)
                out[:, i, j] = num / den
        return out


def _integrate(ev: _FieldEvaluator, x0: np.ndarray, cfg: FlowConfig):
    """RK4 for the state (x, J) with J' = DX J, batched over rows of x0."""
    m, n = x0.shape
    h = float(cfg.step)
    nsteps_f = cfg.t_end / cfg.step
    nsteps = int(nsteps_f)
    if nsteps == 0 or h <= 0:
        raise StepUnderflow("step too small for the interval")
    if nsteps > cfg.max_steps:
        raise StepUnderflow(f"{nsteps} steps exceed the limit {cfg.max_steps}")
    last = float(cfg.t_end - nsteps * cfg.step)
    x = x0.astype(float).copy()
    J = np.broadcast_to(np.eye(n), (m, n, n)).copy()
    sign0 = np.sign(ev.denominators(x, 0.0))
    scale = np.abs(ev.denominators(x, 0.0))

    def rhs(xx, JJ, tt):
        dens = ev.denominators(xx, tt)
        if np.any(np.sign(dens) != sign0) or np.any(np.abs(dens) < 1e-12 * np.maximum(scale, 1.0)):
            raise PoleEncountered(f"denominator vanishes along the trajectory near t={tt:.6g}")
        return ev.field(xx, tt), ev.jac(xx, tt) @ JJ

    def step(xx, JJ, tt, hh):
        k1, K1 = rhs(xx, JJ, tt)
        k2, K2 = rhs(xx + 0.5 * hh * k1, JJ + 0.5 * hh * K1, tt + 0.5 * hh)
        k3, K3 = rhs(xx + 0.5 * hh * k2, JJ + 0.5 * hh * K2, tt + 0.5 * hh)
        k4, K4 = rhs(xx + hh * k3, JJ + hh * K3, tt + hh)
        return (xx + hh / 6 * (k1 + 2 * k2 + 2 * k3 + k4),
                JJ + hh / 6 * (K1 + 2 * K2 + 2 * K3 + K4))

    t = 0.0
    for k in range(nsteps):
        t = k * h
        x, J = step(x, J, t, h)
    if last > 0:
        x, J = step(x, J, nsteps * h, last)
        nsteps += 1
    rhs(x, J, float(cfg.t_end))
    return x, J, nsteps


def _as_points(points, n):
    arr = np.array([[float(Fraction(v)) for v in p] for p in points], dtype=float)
    if arr.ndim != 2 or arr.shape[1] != n:
        raise ValueError(f"points must have {n} coordinates")
    return arr


def flow(pi: AltTensor, a: AltTensor, cfg: FlowConfig, x0, sign: int = 1) -> FlowResult:
    """Integrate ``x' = sign * (pi_t# a)(x)`` and its variational equation from 0 to t_end."""
    X = flow_field(pi, a, sign)
    ev = _FieldEvaluator(X)
    pts = _as_points([x0], pi.chart.dim)
    x, J, k = _integrate(ev, pts, cfg)
    return FlowResult(x[0], J[0], steps=k)


def _tensor_eval(T: AltTensor, pts: np.ndarray, keys):
    """Numeric components of T on the given keys at a batch of points."""
    out = np.zeros((pts.shape[0], len(keys)))
    for j, K in enumerate(keys):
        v = T.coeffs.get(K)
        if v is None:
            continue
        num, den = _Compiled(v).num_den(pts)
        if np.any(den == 0):
            raise PoleEncountered("tensor has a pole at a sample point")
        out[:, j] = num / den
    return out


def pushforward(J: np.ndarray, comps: np.ndarray, keys) -> np.ndarray:
    """Components of ``wedge^p J`` applied to a p-vector (batched)."""
    m = J.shape[0]
    out = np.zeros((m, len(keys)))
    for a, I in enumerate(keys):
        rows = [i - 1 for i in I]
        for b, K in enumerate(keys):
            cols = [k - 1 for k in K]
            minor = np.linalg.det(J[:, rows][:, :, cols])
            out[:, a] += minor * comps[:, b]
    return out


def sw_defects(pi: AltTensor, a: AltTensor, cfg: FlowConfig, samples) -> np.ndarray:
    """Per-sample max defect of the Nambu-Poisson map relating pi and pi_1.

    ``pi_t`` satisfies ``d/dt pi_t = L_{X_t} pi_t`` with ``X_t = pi_t# a``.
    For a time-dependent flow ``psi_t`` of ``Y_t`` one has
    ``d/dt psi_t^* pi_t = psi_t^*(L_{Y_t} pi_t + d/dt pi_t)``, so the flow of
    ``Y_t = -X_t`` satisfies ``psi_1^* pi_1 = pi``: the pushforward of
    ``pi`` at a sample equals ``pi_1`` at its image.
    """
    chart = pi.chart
    n, p = chart.dim, pi.degree
    b = ext_d(a)
    ev = _FieldEvaluator(flow_field(pi, a, -1))
    pts = _as_points(samples, n)
    x1, J, _ = _integrate(ev, pts, cfg)
    keys = multi_indices(n, p)
    P1 = at_time(pi_t(pi, b), cfg.t_end, chart)
    pushed = pushforward(J, _tensor_eval(pi, pts, keys), keys)
    target = _tensor_eval(P1, x1, keys)
    return np.max(np.abs(pushed - target), axis=1)


def sw_verify(pi: AltTensor, a: AltTensor, cfg: FlowConfig, samples) -> float:
    """Max over samples of the pushforward defect (see :func:`sw_defects`)."""
    return float(np.max(sw_defects(pi, a, cfg, samples)))


def mu_lambda(pi: AltTensor, a: AltTensor, lam: AltTensor, K: int) -> AltTensor:
    """``sum_{k<=K} (-L_{pi_t# a} + d/dt)^k lam / (k+1)!`` at ``t = 0``."""
    if K < 0:
        raise ValueError("truncation order must be non-negative")
    if lam.variance != FORM or lam.degree != pi.degree - 2:
        raise ValueError(f"lambda must be a {pi.degree - 2}-form")
    base = pi.chart
    X = flow_field(pi, a)
    ct = X.chart
    term = lam.to_chart(ct)
    total = term
    for k in range(1, K + 1):
        term = -lie(X, term) + term.map(lambda v: v.dparam(T_PARAM))
        total = total + term * Fraction(1, factorial(k + 1))
    return at_time(total, 0, base)
