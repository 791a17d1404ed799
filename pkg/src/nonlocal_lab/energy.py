"""Nonlocal quadratic energy on compactly supported test functions.

The energy is assembled as one quadratic form per quadrature node set, so
that the parallelogram identity

    J(v1)/2 + J(v2)/2 - J((v1+v2)/2) = (1/4) J-form of (v1 - v2)

holds at node level to rounding; the same node set evaluates every function
involved in a comparison.  Three pieces make up the form: the pair part over
a graded mesh in |h|, an analytic Taylor correction for |h| below the mesh
(quadratic in the gradient, so identity-preserving), and an analytic far
tail (quadratic in the value).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._util import map_ordered
from .errors import DomainError, NotConverged
from .model import FracParams
from .pvquad import QuadratureSpec, _gl, _sphere_rule, frac_op_num
from .closedform import operator_value
from .specfun import gamma, kappa

__all__ = [
    "TestFunction",
    "bump_x1",
    "average",
    "difference",
    "energy_eval",
    "convexity_identity_check",
    "first_variation_residual",
    "gamma_limit_probe",
    "sphere_moment2",
    "sphere_moment4",
    "local_energy",
]


@dataclass(frozen=True)
class TestFunction:
    """Compactly supported test function with an exact gradient.

    value/grad take an (n, d) array of points; the function vanishes outside
    the ball of the given support radius.
    """

    value: callable
    grad: callable
    radius: float
    label: str = "custom"


def bump_x1(radius: float = 1.0) -> TestFunction:
    """Analytic odd bump exp(-1/(1-|x/r|^2)) * (x1/r), supported in B_r."""

    def _profile(pts):
        t = np.sum(pts * pts, axis=1) / radius**2
        inside = t < 1.0
        out = np.zeros(len(pts))
        tt = np.where(inside, t, 0.5)
        out[inside] = np.exp(-1.0 / (1.0 - tt[inside]))
        return out, t, inside

    def value(pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        phi, t, inside = _profile(pts)
        return phi * pts[:, 0] / radius

    def grad(pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        phi, t, inside = _profile(pts)
        g = np.zeros_like(pts)
        one_minus = np.where(inside, 1.0 - t, 1.0)
        dphi = np.where(inside, -phi / one_minus**2, 0.0)  # d phi / d t
        g += (dphi * (2.0 / radius**2) * pts[:, 0] / radius)[:, None] * pts
        g[:, 0] += phi / radius
        return g

    return TestFunction(value=value, grad=grad, radius=radius, label="bump_x1")


def average(v1: TestFunction, v2: TestFunction) -> TestFunction:
    r = max(v1.radius, v2.radius)
    return TestFunction(
        value=lambda p: 0.5 * (v1.value(p) + v2.value(p)),
        grad=lambda p: 0.5 * (v1.grad(p) + v2.grad(p)),
        radius=r,
        label="average",
    )


def difference(v1: TestFunction, v2: TestFunction) -> TestFunction:
    r = max(v1.radius, v2.radius)
    return TestFunction(
        value=lambda p: v1.value(p) - v2.value(p),
        grad=lambda p: v1.grad(p) - v2.grad(p),
        radius=r,
        label="difference",
    )


class _EnergyGrid:
    """Frozen node set turning the energy into a quadratic form.

    Outer x nodes cover the support ball in polar coordinates; for each x
    the h mesh is a shared set of log-graded radial bands times a sphere
    rule.  Kernel weights depend on the parameters, not on the function, so
    one grid serves every function entering一 comparison.
    """

    def __init__(self, params: FracParams, radius: float, spec: QuadratureSpec):
        d, s, eps = params.d, params.s, params.epsilon
        self.params = params
        self.radius = radius
        self.kappa = kappa(d, s)
        a_iso = 1.0 - 0.5 * (1.0 + 2.0 * s) * eps
        b_rad = 0.5 * (d + 2.0 * s) * eps

        # outer x nodes: GL in radius x sphere rule, jacobian r^(d-1)
        nx_r, nx_a = 18, max(24, spec.angular_nodes // 2)
        om_x, ow_x = _sphere_rule(d, nx_a)
        tx, wx = _gl(nx_r)
        rx = 0.5 * radius * (tx + 1.0)
        wrx = 0.5 * radius * wx * rx ** (d - 1)
        self.x = (rx[:, None, None] * om_x[None, :, :]).reshape(-1, d)
        self.wx = (wrx[:, None] * ow_x[None, :]).reshape(-1)

        # inner h nodes: log bands from the near cutoff to the far cutoff
        h_min, h_max = 1e-7, 1e5
        n_bands = max(1, math.ceil(math.log10(h_max / h_min) * 2))
        edges = np.exp(np.linspace(math.log(h_min), math.log(h_max), n_bands + 1))
        th, wh = _gl(6)
        om_h, ow_h = _sphere_rule(d, max(16, spec.angular_nodes // 2))
        rr, ww = [], []
        for a, b in zip(edges[:-1], edges[1:]):
            ta, tb = math.log(a), math.log(b)
            tm, tspan = 0.5 * (ta + tb), 0.5 * (tb - ta)
            r = np.exp(tm + tspan * th)
            rr.append(r)
            ww.append(wh * tspan * r**d)
        r_h = np.concatenate(rr)
        w_h = np.concatenate(ww)
        self.h = (r_h[:, None, None] * om_h[None, :, :]).reshape(-1, d)
        self.wh = (w_h[:, None] * ow_h[None, :]).reshape(-1)
        self.h_min, self.h_max = h_min, h_max
        self.om_h, self.ow_h = om_h, ow_h

        # kernel weights k(x, x+h) on the product grid, in x-chunks
        def quad_form(y, hh):
            ry = np.maximum(np.sqrt(np.sum(y * y, axis=-1)), 1e-300)
            proj = np.sum(y * hh, axis=-1) / ry
            return a_iso + b_rad * proj**2

        hh_unit = self.h / np.linalg.norm(self.h, axis=1, keepdims=True)
        r_pow = np.linalg.norm(self.h, axis=1) ** (-d - 2.0 * s)
        self.kernel = np.empty((len(self.x), len(self.h)))
        chunk = max(1, int(2e6 / max(1, len(self.h))))

        def fill(i0):
            i1 = min(len(self.x), i0 + chunk)
            xs = self.x[i0:i1]
            qx = quad_form(xs[:, None, :], hh_unit[None, :, :])
            qy = quad_form(xs[:, None, :] + self.h[None, :, :], hh_unit[None, :, :])
            self.kernel[i0:i1] = 0.5 * (qx + qy) * r_pow[None, :]
            return None

        map_ordered(fill, range(0, len(self.x), chunk))

        # near-field Taylor weights: int_(|h|<h_min) k (grad v . h)^2 dh
        # = h_min^(2-2s)/(2-2s) * sum_omega w <A(x)w,w> (grad v . w)^2
        self.near_scale = h_min ** (2.0 - 2.0 * s) / (2.0 - 2.0 * s)
        self.near_q = quad_form(self.x[:, None, :], om_h[None, :, :])  # (nx, nom)

        # far tail: int_(|h|>h_max) k dh * v(x)^2, with A(x+h) -> A(hhat)
        surf = 2.0 * math.pi ** (0.5 * d) / gamma(0.5 * d)
        tail_a = a_iso + 0.5 * b_rad * (1.0 + 1.0 / d)
        # the far region is entirely outside the support ball: factor 2
        self.tail_w = 2.0 * h_max ** (-2.0 * s) / (2.0 * s) * surf * tail_a

    def quadratic(self, v: TestFunction) -> float:
        """kappa/2 times the double integral for one test function.

        The x nodes cover the support ball only; ordered pairs leaving the
        ball appear once there but twice in the full double integral, hence
        the factor-2 weight on nodes with x+h outside.
        """
        vx = v.value(self.x)
        gx = v.grad(self.x)
        total = 0.0
        chunk = max(1, int(4e6 / max(1, len(self.h))))
        for i0 in range(0, len(self.x), chunk):
            i1 = min(len(self.x), i0 + chunk)
            pts = (self.x[i0:i1, None, :] + self.h[None, :, :]).reshape(-1, self.x.shape[1])
            vy = v.value(pts).reshape(i1 - i0, -1)
            outside = (
                np.sum(pts * pts, axis=1).reshape(i1 - i0, -1) > self.radius**2
            )
            diff2 = (vx[i0:i1, None] - vy) ** 2 * np.where(outside, 2.0, 1.0)
            pair = np.sum(self.kernel[i0:i1] * diff2 * self.wh[None, :], axis=1)
            total += float(self.wx[i0:i1] @ pair)
        # near-field correction, quadratic in grad v
        gdot = gx @ self.om_h.T  # (nx, nom)
        near = self.near_scale * np.sum(self.near_q * gdot**2 * self.ow_h[None, :], axis=1)
        total += float(self.wx @ near)
        # far tail, quadratic in v
        total += self.tail_w * float(self.wx @ vx**2)
        return 0.5 * self.kappa * total


def energy_eval(params: FracParams, v: TestFunction, spec: QuadratureSpec) -> float:
    """Value of the nonlocal energy for one test function."""
    grid = _EnergyGrid(params, v.radius, spec)
    return grid.quadratic(v)


def convexity_identity_check(
    params: FracParams, v1: TestFunction, v2: TestFunction, spec: QuadratureSpec
) -> tuple[float, float]:
    """(lhs, rhs) of the parallelogram identity on a shared node set."""
    radius = max(v1.radius, v2.radius)
    grid = _EnergyGrid(params, radius, spec)
    lhs = (
        0.5 * grid.quadratic(v1)
        + 0.5 * grid.quadratic(v2)
        - grid.quadratic(average(v1, v2))
    )
    rhs = 0.25 * grid.quadratic(difference(v1, v2))
    return lhs, rhs


def _op_spec(spec: QuadratureSpec) -> QuadratureSpec:
    """Cheaper controls for the many operator evaluations of the pairing."""
    return QuadratureSpec(
        r_min=1e-5,
        r_max=1e5,
        bands_per_decade=max(2, spec.bands_per_decade // 2),
        radial_nodes=max(6, spec.radial_nodes - 2),
        angular_nodes=max(24, spec.angular_nodes // 2),
        seed=spec.seed,
        target_rel_err=spec.target_rel_err,
        richardson_levels=spec.richardson_levels,
    )


def first_variation_residual(
    params: FracParams, eta: TestFunction, spec: QuadratureSpec
) -> float:
    """Quadrature of the first variation int op(x) eta(x) dx.

    Zero (to quadrature accuracy) exactly when epsilon is the coupling; the
    closed-form pairing on the same nodes is the guard: the two paths must
    agree within the accumulated quadrature error bound.
    """
    d = params.d
    if eta.radius >= 1.0:
        raise DomainError("test function must be supported strictly inside B_1")
    op_spec = _op_spec(spec)
    nx_r, nx_a = 6, 8
    om, ow = _sphere_rule(d, nx_a)
    tx, wx = _gl(nx_r)
    rx = 0.5 * eta.radius * (tx + 1.0)
    wrx = 0.5 * eta.radius * wx * rx ** (d - 1)
    xs = (rx[:, None, None] * om[None, :, :]).reshape(-1, d)
    ws = (wrx[:, None] * ow[None, :]).reshape(-1)
    eta_vals = eta.value(xs)
    kap = kappa(d, params.s)

    def one(node):
        x, w, ev = node
        if abs(ev) < 1e-300:
            return 0.0, 0.0, 0.0
        res = frac_op_num(params, x, op_spec)
        closed = operator_value(params, x)
        return w * ev * kap * res.value, w * abs(ev) * kap * res.err_estimate, w * ev * closed

    rows = map_ordered(one, list(zip(xs, ws, eta_vals)))
    quad = float(sum(r[0] for r in rows))
    bound = float(sum(r[1] for r in rows))
    closed = float(sum(r[2] for r in rows))
    if abs(quad - closed) > 5.0 * bound + 1e-8:
        raise AssertionError(
            f"first-variation paths disagree: quadrature {quad}, closed {closed}, "
            f"bound {bound}"
        )
    return quad


def sphere_moment2(d: int) -> float:
    """int_S sigma_i^2 dsigma = Gamma(1/2)^d / Gamma(d/2 + 1)."""
    return math.pi ** (0.5 * d) / gamma(0.5 * d + 1.0)


def sphere_moment4(d: int, same_axis: bool = False) -> float:
    """int_S sigma_i^2 sigma_1^2 dsigma; 3x larger on the diagonal i = 1."""
    base = sphere_moment2(d) / (d + 2.0)
    return 3.0 * base if same_axis else base


def local_energy(d: int, epsilon: float, v: TestFunction, cells: int = 240) -> float:
    """Midpoint-grid value of (1/2) int <A_eps grad v, grad v> dx (d = 2)."""
    if d != 2:
        raise DomainError("the local-energy grid is implemented for d = 2")
    r = v.radius
    xs = np.linspace(-r, r, cells, endpoint=False) + r / cells
    xx, yy = np.meshgrid(xs, xs, indexing="ij")
    pts = np.stack([xx.ravel(), yy.ravel()], axis=1)
    g = v.grad(pts)
    rr = np.maximum(np.linalg.norm(pts, axis=1), 1e-300)
    xh = pts / rr[:, None]
    proj = np.sum(g * xh, axis=1)
    quad = (1.0 - epsilon) * np.sum(g * g, axis=1) + epsilon * proj**2
    cell = (2.0 * r / cells) ** 2
    return 0.5 * float(np.sum(quad)) * cell


def gamma_limit_probe(
    eps: float,
    v: TestFunction,
    s_list,
    d: int = 2,
    spec: QuadratureSpec | None = None,
) -> list[tuple[float, float, float, float]]:
    """Rows (s, nonlocal energy, local energy, relative gap) along s -> 1."""
    spec = spec or QuadratureSpec()
    loc = local_energy(d, eps, v)
    if not math.isfinite(loc) or loc <= 0.0:
        raise NotConverged("local-energy reference is degenerate")
    rows = []
    for s in s_list:
        params = FracParams(d, s, 0.0, eps)
        val = energy_eval(params, v, spec)
        rows.append((s, val, loc, abs(val - loc) / loc))
    return rows
