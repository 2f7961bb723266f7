"""Closest-point projection onto ball intersections and finite Helly witnesses.

Feasibility of an intersection of closed balls is certified by the same
minimax solve the extension module uses: the minimax value of
max_i (dist(q, c_i) - r_i) is nonpositive exactly when the balls share a
point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import model_spaces as ms
from . import barycentric as bc
from . import extension as ex
from .model_spaces import ModelPoint


class _Empty:
    """Singleton marking an empty ball intersection."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "EMPTY"

    def __bool__(self):
        return False


EMPTY = _Empty()


@dataclass(frozen=True)
class BallSystem:
    """Closed balls B[c_i, r_i] in one model space."""

    centers: tuple
    radii: np.ndarray
    kappa: float = 0.0

    def __post_init__(self):
        centers = tuple(self.centers)
        if not centers:
            raise ValueError("need at least one ball")
        radii = np.asarray(self.radii, dtype=float)
        if radii.shape != (len(centers),):
            raise ValueError("radii must match the center count")
        if np.any(radii < 0):
            raise ValueError("radii must be nonnegative")
        chart = ms.chart_for(self.kappa)
        for c in centers:
            if c.chart != chart:
                raise ValueError("ball centers must live in the curvature's chart")
        if self.kappa > 0:
            half = 0.5 * ms.pomega(self.kappa)
            if np.any(radii > half + 1e-12):
                raise ValueError("balls of radius above half the diameter are not convex")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "radii", radii)

    @property
    def n(self) -> int:
        return len(self.centers)

    def violation(self, q: ModelPoint) -> np.ndarray:
        return np.array(
            [ms.dist(q, c, self.kappa or None) - r for c, r in zip(self.centers, self.radii)]
        )

    def subsystem(self, indices) -> "BallSystem":
        idx = list(indices)
        return BallSystem(
            tuple(self.centers[i] for i in idx), self.radii[idx], self.kappa
        )


def _feasibility(bs: BallSystem, seed: int = 0) -> ex.ChebyshevResult:
    center = None
    if bs.kappa > 0:
        center = bc.frechet_mean(bs.centers, start=bs.centers[0])
    inst = ex.ExtensionInstance(bs.centers, bs.radii, bs.kappa, center)
    # the polish does the precision work; keep the subgradient phase short
    return ex.chebyshev_extend(inst, restarts=1, seed=seed, max_iter=100)


@dataclass
class ClosestPointResult:
    point: ModelPoint
    distance: float

    def to_dict(self):
        return {
            "point": list(map(float, self.point.coords)),
            "distance": self.distance,
        }


def ball_project(p: ModelPoint, center: ModelPoint, radius: float, kappa: float = 0.0) -> ModelPoint:
    """Metric projection onto a single closed ball (nonexpansive)."""
    d = ms.dist(p, center, kappa or None)
    if d <= radius:
        return p
    return ms.geodesic_eval(center, p, radius, kappa or None)


def closest_point(bs: BallSystem, p: ModelPoint, tol: float | None = None,
                  seed: int = 0, max_iter: int = 5000):
    """Unique nearest point of the ball intersection, or EMPTY.

    Emptiness is certified by the minimax defect.  On the flat chart the
    projection is computed by Dykstra's cyclic scheme; on curved charts by
    a constrained solve polished against the certified feasible point.
    """
    feas = _feasibility(bs, seed=seed)
    if tol is None:
        tol = feas.tol
    if feas.defect > tol:
        return EMPTY
    if float(np.max(bs.violation(p))) <= tol:
        return ClosestPointResult(p, 0.0)
    if bs.kappa == 0:
        q = _dykstra(bs, p, tol, max_iter)
        q = _constrained_project(bs, p, q, tol)
    else:
        q = _constrained_project(bs, p, feas.point, tol)
    return ClosestPointResult(q, ms.dist(q, p, bs.kappa or None))


def _dykstra(bs: BallSystem, p: ModelPoint, tol: float, max_iter: int) -> ModelPoint:
    x = p.coords.copy()
    corrections = [np.zeros_like(x) for _ in range(bs.n)]
    for _ in range(max_iter):
        x_prev = x.copy()
        for i, (c, r) in enumerate(zip(bs.centers, bs.radii)):
            y = x + corrections[i]
            proj = ball_project(ModelPoint(y, ms.FLAT), c, r).coords
            corrections[i] = y - proj
            x = proj
        if np.linalg.norm(x - x_prev) < 1e-13 * (1.0 + np.linalg.norm(x)):
            break
    return ModelPoint(x, ms.FLAT)


def _constrained_project(bs: BallSystem, p: ModelPoint, feasible: ModelPoint,
                         tol: float) -> ModelPoint:
    chart = p.chart
    s = ms.length_scale(bs.kappa)

    def cons(c):
        return -bs.violation(bc._project_chart(c, chart))

    def obj(c):
        return ms.chart_dist(bc._project_chart(c, chart), p) / s

    candidates = [feasible]
    for x0 in (feasible.coords, 0.5 * (feasible.coords + p.coords)):
        res = minimize(
            obj, x0, method="SLSQP",
            constraints=[{"type": "ineq", "fun": cons}],
            options={"maxiter": 300, "ftol": 1e-14},
        )
        candidates.append(bc._project_chart(res.x, chart))
    # feasibility outranks distance: an infeasible iterate can undercut
    feasible_cands = [
        q for q in candidates if float(np.max(bs.violation(q))) <= 10 * tol
    ]
    if feasible_cands:
        return min(feasible_cands, key=lambda q: obj(q.coords))
    return min(candidates, key=lambda q: float(np.max(bs.violation(q))))


@dataclass
class HellyResult:
    feasible: bool
    point: ModelPoint | None
    witness: list
    defect: float

    def to_dict(self):
        return {
            "feasible": self.feasible,
            "point": None if self.point is None else list(map(float, self.point.coords)),
            "witness": list(self.witness),
            "defect": self.defect,
        }


def helly_witness(bs: BallSystem, tol: float | None = None, seed: int = 0) -> HellyResult:
    """A common point of the system, or a subfamily with empty intersection.

    The witness subfamily grows greedily from the most-violated pair; its
    emptiness is certified by its own minimax defect, never inherited from
    the full family.
    """
    feas = _feasibility(bs, seed=seed)
    if tol is None:
        tol = feas.tol
    if feas.defect <= tol:
        return HellyResult(True, feas.point, list(range(bs.n)), feas.defect)

    # most-violated pair: largest center gap over the radius sum
    best_pair, best_gap = None, -math.inf
    for i in range(bs.n):
        for j in range(i + 1, bs.n):
            gap = (
                ms.dist(bs.centers[i], bs.centers[j], bs.kappa or None)
                - bs.radii[i] - bs.radii[j]
            )
            if gap > best_gap:
                best_pair, best_gap = (i, j), gap
    subset = list(best_pair)
    if best_gap / 2.0 > tol:  # pair minimax defect is half the gap
        return HellyResult(False, None, subset, best_gap / 2.0)

    while True:
        sub = bs.subsystem(subset)
        res = _feasibility(sub, seed=seed)
        if res.defect > tol:
            return HellyResult(False, None, sorted(subset), res.defect)
        viol = bs.violation(res.point)
        viol[subset] = -math.inf
        nxt = int(np.argmax(viol))
        if viol[nxt] == -math.inf:
            # all indices already included yet feasible: contradiction with
            # the full-family defect; report the full family
            return HellyResult(False, None, sorted(subset), feas.defect)
        subset.append(nxt)
