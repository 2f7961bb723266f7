"""Barycenters of strongly convex function arrays on model spaces.

The two function forms are half squared distance and (on the hyperbolic
chart) cosh of distance; weighted combinations of either are strongly
convex along geodesics, so argmins are unique and gradient descent with a
fixed step converges linearly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import model_spaces as ms
from .model_spaces import ModelPoint

HALF_SQUARED_DIST = "half_squared_dist"
COSH_DIST = "cosh_dist"

GRAD_TOL = 1e-10
MAX_ITERS = 10_000


class IterationCapError(RuntimeError):
    """Descent hit the iteration cap; carries the residual gradient norm."""

    def __init__(self, point, residual):
        super().__init__(f"iteration cap reached, gradient norm {residual:.3e}")
        self.point = point
        self.residual = residual


@dataclass(frozen=True)
class WeightVector:
    """Point of the standard simplex; renormalized on construction."""

    x: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim != 1 or len(x) == 0:
            raise ValueError("weights must form a nonempty vector")
        if np.any(x < -1e-12):
            raise ValueError("weights must be nonnegative")
        total = float(np.sum(x))
        if total <= 0:
            raise ValueError("weights must have positive sum")
        object.__setattr__(self, "x", np.clip(x, 0.0, None) / total)

    def __len__(self):
        return len(self.x)


@dataclass(frozen=True)
class FunctionArray:
    """Array of convex functions f^i anchored at model points.

    lam is the convexity parameter: each member is lam-convex along
    geodesics (for the cosh form this holds after the usual shift).
    """

    anchors: tuple
    form: str = HALF_SQUARED_DIST
    lam: float = 1.0

    def __post_init__(self):
        anchors = tuple(self.anchors)
        if not anchors:
            raise ValueError("need at least one anchor")
        chart = anchors[0].chart
        if any(a.chart != chart for a in anchors):
            raise ValueError("anchors must share a chart")
        if self.form == COSH_DIST and chart != ms.HYPERBOLOID:
            raise ValueError("cosh distance form is only convex on the hyperbolic chart")
        if self.form not in (HALF_SQUARED_DIST, COSH_DIST):
            raise ValueError(f"unknown function form {self.form!r}")
        if self.lam <= 0:
            raise ValueError("convexity parameter must be positive")
        object.__setattr__(self, "anchors", anchors)

    @property
    def chart(self):
        return self.anchors[0].chart

    def __len__(self):
        return len(self.anchors)

    def values(self, q: ModelPoint) -> np.ndarray:
        ds = np.array([ms.chart_dist(q, a) for a in self.anchors])
        if self.form == HALF_SQUARED_DIST:
            return self.lam * 0.5 * ds**2
        return self.lam * np.cosh(ds)

    def gradients(self, q: ModelPoint) -> list:
        """Riemannian gradients of each member at q, as chart tangent vectors."""
        out = []
        for a in self.anchors:
            v = ms.log_map(q, a)
            d = ms.tangent_norm(q, v)
            if self.form == HALF_SQUARED_DIST:
                out.append(-self.lam * v)
            elif d < 1e-15:
                out.append(np.zeros_like(v))
            else:
                out.append(-self.lam * math.sinh(d) / d * v)
        return out

    def spread(self) -> float:
        return max(
            (ms.chart_dist(a, b) for a in self.anchors for b in self.anchors),
            default=0.0,
        )


def _smoothness_estimate(fa: FunctionArray, radius: float) -> float:
    """Upper estimate of the gradient Lipschitz constant on the working region."""
    r = radius + fa.spread()
    if fa.form == COSH_DIST:
        return fa.lam * math.cosh(r)
    if fa.chart == ms.HYPERBOLOID:
        return fa.lam * (1.0 + r)  # d*coth(d) <= 1 + d
    return fa.lam


def argmin_strongly_convex(
    fa: FunctionArray,
    weights: WeightVector | np.ndarray,
    start: ModelPoint | None = None,
    grad_tol: float = GRAD_TOL,
    max_iters: int = MAX_ITERS,
) -> ModelPoint:
    """Unique minimizer of the weighted combination sum_i w_i f^i.

    Geodesic gradient descent with the fixed step 1/(lam + L̂); the strong
    convexity of the combination makes the argmin independent of `start`.
    """
    if not isinstance(weights, WeightVector):
        weights = WeightVector(np.asarray(weights, dtype=float))
    if len(weights) != len(fa):
        raise ValueError("weight and anchor counts differ")
    w = weights.x
    q = start if start is not None else fa.anchors[int(np.argmax(w))]
    radius = max(ms.chart_dist(q, a) for a in fa.anchors)
    step = 1.0 / (fa.lam + _smoothness_estimate(fa, radius))
    for _ in range(max_iters):
        grads = fa.gradients(q)
        g = sum(wi * gi for wi, gi in zip(w, grads))
        gn = ms.tangent_norm(q, g)
        if gn <= grad_tol:
            return q
        q = ms.exp_map(q, -np.asarray(g), step * gn)
    raise IterationCapError(q, gn)


def bary_simplex(fa: FunctionArray, x: WeightVector) -> ModelPoint:
    """Barycentric simplex map: weights to the argmin of the combination."""
    return argmin_strongly_convex(fa, x)


def frechet_mean(points, weights=None, start: ModelPoint | None = None,
                 grad_tol: float = 1e-12) -> ModelPoint:
    """Weighted Fréchet mean of chart points (half-squared-distance argmin)."""
    points = tuple(points)
    if weights is None:
        weights = np.ones(len(points))
    fa = FunctionArray(points, HALF_SQUARED_DIST, 1.0)
    return argmin_strongly_convex(fa, WeightVector(np.asarray(weights, float)),
                                  start=start, grad_tol=grad_tol)


def supset_dominates(v, w) -> bool:
    """Componentwise domination v >= w."""
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    if v.shape != w.shape:
        raise ValueError("arrays must have the same length")
    return bool(np.all(v >= w))


def h_v_argmin(fa: FunctionArray, v, start: ModelPoint | None = None,
               tol: float = 1e-9) -> ModelPoint:
    """Minimizer nu(v) of h_v(p) = max_i (f^i(p) - v_i).

    h_v inherits the members' strong convexity, so the argmin is unique;
    solved as an epigraph program over ambient coordinates with the chart
    constraint enforced by projection.
    """
    v = np.asarray(v, dtype=float)
    if len(v) != len(fa):
        raise ValueError("offset vector length must match the anchor count")
    if start is None:
        start = argmin_strongly_convex(fa, np.ones(len(fa)))
    chart = fa.chart

    def proj(c):
        return _project_chart(c, chart)

    def hv(c):
        return fa.values(proj(c)) - v

    c0 = np.concatenate([start.coords, [float(np.max(hv(start.coords)))]])

    res = minimize(
        lambda z: z[-1],
        c0,
        method="SLSQP",
        constraints=[{"type": "ineq", "fun": lambda z: z[-1] - hv(z[:-1])}],
        options={"maxiter": 500, "ftol": 1e-14},
    )
    q = proj(res.x[:-1])
    # fall back to the start if the polish failed to improve
    if float(np.max(hv(q.coords))) > float(np.max(hv(start.coords))) + tol:
        return start
    return q


def _project_chart(coords, chart) -> ModelPoint:
    c = np.asarray(coords, dtype=float)
    if chart == ms.FLAT:
        return ModelPoint(c, chart)
    if chart == ms.SPHERE:
        n = np.linalg.norm(c)
        if n < 1e-12:
            c = np.zeros_like(c)
            c[-1] = 1.0
            n = 1.0
        return ModelPoint(c / n, chart)
    q = -ms.minkowski_dot(c, c)
    if q <= 1e-12:
        base = np.zeros_like(c)
        base[-1] = 1.0
        return ModelPoint(base, chart)
    c = c / math.sqrt(q)
    if c[-1] < 0:
        c = -c
    return ModelPoint(c, chart)
