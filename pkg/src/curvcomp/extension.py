"""Constructive single-point Lipschitz extension on model spaces.

The workhorse is a minimax solve: given targets y^i and radii r^i, find q
minimizing max_i (dist(q, y^i) - r^i).  A nonpositive value certifies that
the map sending one more point within the prescribed distances exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import model_spaces as ms
from . import barycentric as bc
from .model_spaces import ModelPoint

CBB_STYLE = "cbb"
CAT_STYLE = "cat"

SUBGRAD_ITERS = 200


def _feas_tol(radii) -> float:
    return 1e-7 * (1.0 + float(np.max(radii)) if len(radii) else 1.0)


@dataclass(frozen=True)
class ExtensionInstance:
    """Targets y^i with radii r^i; optional center for positive curvature."""

    targets: tuple
    radii: np.ndarray
    kappa: float = 0.0
    center: ModelPoint | None = None

    def __post_init__(self):
        targets = tuple(self.targets)
        if not targets:
            raise ValueError("need at least one target")
        radii = np.asarray(self.radii, dtype=float)
        if radii.shape != (len(targets),):
            raise ValueError("radii must match the target count")
        if np.any(radii < 0):
            raise ValueError("radii must be nonnegative")
        chart = ms.chart_for(self.kappa)
        for t in targets:
            if t.chart != chart:
                raise ValueError(f"target chart {t.chart!r} does not match curvature")
        if self.kappa > 0 and self.center is None:
            raise ValueError("positive curvature requires a center point")
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "radii", radii)

    @property
    def hypothesis_ok(self) -> bool:
        """Whether all targets sit in the half-diameter ball around the center.

        When this fails the convexity guarantee is void (the solve still
        runs, unconstrained, with extra restarts).
        """
        if self.kappa <= 0:
            return True
        half = 0.5 * ms.pomega(self.kappa)
        return all(
            ms.dist(self.center, t, self.kappa) <= half + 1e-9 for t in self.targets
        )

    @property
    def n(self) -> int:
        return len(self.targets)

    @property
    def dim(self) -> int:
        return self.targets[0].dim


@dataclass
class ChebyshevResult:
    point: ModelPoint
    defect: float
    active: list
    feasible: bool
    tol: float

    def to_dict(self):
        return {
            "point": list(map(float, self.point.coords)),
            "defect": self.defect,
            "feasible": self.feasible,
            "active": self.active,
            "tol": self.tol,
        }


def _objective(inst: ExtensionInstance):
    s = ms.length_scale(inst.kappa)

    def g(q: ModelPoint) -> np.ndarray:
        return np.array(
            [ms.chart_dist(q, y) / s - r for y, r in zip(inst.targets, inst.radii)]
        )

    return g


def _cap_to_ball(q: ModelPoint, inst: ExtensionInstance, enabled: bool) -> ModelPoint:
    if not enabled:
        return q
    cap = 0.5 * ms.pomega(inst.kappa) * ms.length_scale(inst.kappa)
    d = ms.chart_dist(inst.center, q)
    if d <= cap:
        return q
    return ms.geodesic_eval(inst.center, q, cap)


def chebyshev_extend(inst: ExtensionInstance, restarts: int = 4, seed: int = 0,
                     max_iter: int = SUBGRAD_ITERS) -> ChebyshevResult:
    """Minimize g(q) = max_i (dist(q, y^i) - r_i) over the model space.

    Subgradient descent with Polyak-style steps from a Fréchet-mean warm
    start (plus random restarts), then an epigraph polish over ambient
    coordinates.  For curvature <= 0 the objective is geodesically convex,
    so the result is a global minimum up to tolerance; for kappa = 1 the
    iterates are kept in the half-diameter ball around the declared center.
    """
    g = _objective(inst)
    s = ms.length_scale(inst.kappa)
    tol = _feas_tol(inst.radii)
    rng = np.random.default_rng(seed)
    cap = inst.kappa > 0 and inst.hypothesis_ok
    if inst.kappa > 0 and not cap:
        restarts = max(restarts, 2 * inst.n)  # nonconvex regime needs coverage

    try:
        warm = bc.frechet_mean(inst.targets, 1.0 / (1.0 + inst.radii), start=inst.center)
    except ValueError:
        # an iterate hit a target's antipode; nudge off the symmetric spot
        v = ms.project_to_tangent(inst.targets[0], rng.standard_normal(inst.dim + (inst.targets[0].chart != ms.FLAT)))
        nv = ms.tangent_norm(inst.targets[0], v)
        warm = inst.targets[0] if nv < 1e-12 else ms.exp_map(inst.targets[0], v, 0.1)
    warm = _cap_to_ball(warm, inst, cap)
    spread = max((ms.chart_dist(warm, y) for y in inst.targets), default=1.0)
    starts = [warm]
    for _ in range(restarts):
        v = rng.standard_normal(len(warm.coords))
        v = ms.project_to_tangent(warm, v)
        nv = ms.tangent_norm(warm, v)
        if nv < 1e-12:
            continue
        starts.append(
            _cap_to_ball(ms.exp_map(warm, v, rng.uniform(0, 1) * (spread + 0.1)), inst, cap)
        )

    best_q, best_val = None, math.inf
    for q0 in starts:
        q, val = _subgradient_phase(inst, g, q0, s, max_iter, cap)
        if val < best_val:
            best_q, best_val = q, val
    q, val = _polish(inst, g, best_q, best_val, cap)
    vals = g(q)
    order = np.argsort(-vals)
    active = [int(i) for i in order if vals[i] >= val - 10 * tol]
    return ChebyshevResult(q, val, active, val <= tol, tol)


def _subgradient_phase(inst, g, q, s, max_iter, cap):
    best_q, best_val = q, float(np.max(g(q)))
    delta0 = 0.1 * (1.0 + float(np.max(inst.radii)))
    rng = np.random.default_rng(1)
    for k in range(max_iter):
        vals = g(q)
        i = int(np.argmax(vals))
        try:
            v = ms.log_map(q, inst.targets[i])
        except ValueError:  # antipodal: any direction descends
            v = ms.project_to_tangent(q, rng.standard_normal(len(q.coords)))
        nv = ms.tangent_norm(q, v)
        if nv < 1e-14:
            break
        # Polyak step toward the worst constraint's target
        step = (vals[i] - best_val) + delta0 / (k + 1)
        step = min(max(step, 0.0), nv / s)
        if step <= 0:
            continue
        q = _cap_to_ball(ms.exp_map(q, v, step * s), inst, cap)
        val = float(np.max(g(q)))
        if val < best_val:
            best_q, best_val = q, val
    return best_q, best_val


def _polish(inst, g, q0, val0, cap):
    chart = q0.chart

    def gvec(c):
        return g(bc._project_chart(c, chart))

    x0 = np.concatenate([q0.coords, [val0]])
    cons = [{"type": "ineq", "fun": lambda z: z[-1] - gvec(z[:-1])}]
    if cap:
        half = 0.5 * ms.pomega(inst.kappa)

        def ball(z):
            return half - ms.dist(inst.center, bc._project_chart(z[:-1], chart), inst.kappa)

        cons.append({"type": "ineq", "fun": ball})
    res = minimize(
        lambda z: z[-1], x0, method="SLSQP", constraints=cons,
        options={"maxiter": 300, "ftol": 1e-14},
    )
    q = _cap_to_ball(bc._project_chart(res.x[:-1], chart), inst, cap)
    val = float(np.max(g(q)))
    if val < val0:
        return q, val
    return q0, val0


# ---------------------------------------------------------------------------
# Dual certificate for the feasibility claim

def dual_certificate(inst: ExtensionInstance, weights, source_config: ms.ModelConfig):
    """Both sides of the weighted-argmin inequality h(z) <= h~(z~).

    The target side minimizes h = sum_i alpha_i f^i over the target chart
    (f^i the half-squared-distance or cosh form at y^i); the model side is
    the closed-form value of the same combination at its argmin for the
    source configuration x~^i.  Valid whenever source distances dominate
    target distances.
    """
    if inst.kappa > 0:
        raise ValueError("dual certificate applies to curvature <= 0")
    if not isinstance(weights, bc.WeightVector):
        weights = bc.WeightVector(np.asarray(weights, dtype=float))
    a = weights.x
    if len(a) != inst.n or len(source_config.points) != inst.n:
        raise ValueError("weights and source configuration must match the target count")

    form = bc.HALF_SQUARED_DIST if inst.kappa == 0 else bc.COSH_DIST
    fa = bc.FunctionArray(inst.targets, form)
    z = bc.argmin_strongly_convex(fa, weights)
    h_z = float(a @ fa.values(z))

    dm = source_config.distance_matrix()
    if inst.kappa == 0:
        h_model = 0.25 * float(a @ (dm**2) @ a)
    else:
        h_model = math.sqrt(float(a @ np.cosh(dm) @ a))
    return {"h": h_z, "h_model": h_model, "slack": h_model - h_z, "argmin": z}


# ---------------------------------------------------------------------------
# Four-point extension decision

@dataclass
class FourPointResult:
    feasible: bool
    witness: ModelPoint | None
    defect: float
    direction: str
    triangle: ms.ModelConfig

    def to_dict(self):
        return {
            "feasible": self.feasible,
            "defect": self.defect,
            "direction": self.direction,
            "witness": None if self.witness is None else list(map(float, self.witness.coords)),
        }


def four_point_decision(triple_dists, p_dists, kappa: float = 0.0,
                        direction: str = CBB_STYLE, seed: int = 0,
                        restarts: int = 4) -> FourPointResult:
    """Decide whether a fourth point at the given distances embeds over a
    realized triangle in the 2-dimensional model space."""
    if direction not in (CBB_STYLE, CAT_STYLE):
        raise ValueError("direction must be 'cbb' or 'cat'")
    d12, d23, d31 = (float(v) for v in triple_dists)
    r = np.asarray(p_dists, dtype=float)
    if r.shape != (3,):
        raise ValueError("need three distances from the fourth point")
    tri = ms.model_triangle(d12, d23, d31, kappa)
    if tri is ms.UNDEFINED:
        raise ValueError("triangle undefined at this curvature (perimeter clause)")
    cfg = ms.realize_triangle(tri)
    center = None
    if kappa > 0:
        center = bc.frechet_mean(cfg.points)
    inst = ExtensionInstance(cfg.points, r, kappa, center)
    res = chebyshev_extend(inst, restarts=restarts, seed=seed)
    witness = res.point if res.feasible else None
    return FourPointResult(res.feasible, witness, res.defect, direction, cfg)


# ---------------------------------------------------------------------------
# Iterated map extension

@dataclass
class PartialShortMap:
    """Partial assignment of source points to model targets."""

    source: "object"  # FiniteMetric
    assigned: dict
    kappa: float = 0.0
    center: ModelPoint | None = None

    def shortness_defect(self) -> float:
        """Largest expansion over assigned pairs (<= 0 means short)."""
        keys = sorted(self.assigned, key=self.source.index)
        worst = -math.inf
        for i, a in enumerate(keys):
            for b in keys[i + 1 :]:
                da = ms.dist(self.assigned[a], self.assigned[b], self.kappa or None)
                db = self.source.d[self.source.index(a), self.source.index(b)]
                worst = max(worst, da - db)
        return worst if keys else 0.0

    def validate(self, tol: float = 1e-7):
        if self.shortness_defect() > tol:
            raise ValueError("assignment is not short on some pair")


@dataclass
class ExtendReport:
    map: PartialShortMap
    success: bool
    order: list
    failed_at: object = None
    defect: float = 0.0
    active: list = field(default_factory=list)

    def to_dict(self):
        return {
            "success": self.success,
            "order": list(self.order),
            "failed_at": self.failed_at,
            "defect": self.defect,
            "active": self.active,
            "assigned": {
                str(k): list(map(float, v.coords)) for k, v in self.map.assigned.items()
            },
        }


def extend_map(f: PartialShortMap, new_points=None, order=None, seed: int = 0,
               tol: float | None = None) -> ExtendReport:
    """Extend a short partial map one point at a time via chebyshev_extend.

    Stops at the first point whose minimax defect exceeds tolerance and
    reports it with the blocking constraint set; on success the output map
    is short on all pairs (checked, not assumed).
    """
    metric = f.source
    assigned = dict(f.assigned)
    if new_points is None:
        new_points = [l for l in metric.labels if l not in assigned]
    new_points = [str(l) for l in new_points]
    if order is None:
        order = _greedy_order(metric, set(assigned), new_points)
    done = []
    for label in order:
        targets = []
        radii = []
        keys = sorted(assigned, key=metric.index)
        for k in keys:
            targets.append(assigned[k])
            radii.append(metric.d[metric.index(label), metric.index(k)])
        inst = ExtensionInstance(tuple(targets), np.array(radii), f.kappa, f.center)
        res = chebyshev_extend(inst, seed=seed)
        use_tol = res.tol if tol is None else tol
        if res.defect > use_tol:
            active_labels = [keys[i] for i in res.active]
            out = PartialShortMap(metric, assigned, f.kappa, f.center)
            return ExtendReport(out, False, done + [label], label, res.defect, active_labels)
        assigned[label] = res.point
        done.append(label)
    out = PartialShortMap(metric, assigned, f.kappa, f.center)
    worst = out.shortness_defect()
    final_tol = tol if tol is not None else 1e-6 * (1.0 + metric.diameter)
    if worst > final_tol:
        return ExtendReport(out, False, done, None, worst, [])
    return ExtendReport(out, True, done, None, worst, [])


def _greedy_order(metric, assigned_labels, new_points):
    """Most-constrained first: descending count of assigned neighbors, ties by label."""
    remaining = list(new_points)
    done = set(assigned_labels)
    order = []
    while remaining:
        remaining.sort(key=lambda l: (-sum(1 for k in done if k != l), l))
        nxt = remaining.pop(0)
        order.append(nxt)
        done.add(nxt)
    return order


# ---------------------------------------------------------------------------
# The cone route for positive curvature

@dataclass
class ConeResult:
    point: ModelPoint
    defect: float
    degenerate: bool

    def to_dict(self):
        return {
            "point": list(map(float, self.point.coords)),
            "defect": self.defect,
            "degenerate": self.degenerate,
        }


def spherical_extend_via_cone(inst: ExtensionInstance, tol: float = 1e-9) -> ConeResult:
    """Solve the kappa = 1 extension by lifting to the Euclidean cone.

    Maximizes min_i (<y_i, s> - cos r_i) over the unit ball; a maximizer s
    is slid along the ray through the center direction out to the unit
    sphere, giving the extension point.  A vanishing s is reported as
    degenerate (the slide direction is then taken from the center alone).
    """
    if inst.kappa != 1.0:
        raise ValueError("the cone route applies to curvature 1 in the unit chart")
    if inst.center is None:
        raise ValueError("need a center point")
    ys = np.array([t.coords for t in inst.targets])
    cr = np.cos(inst.radii)
    z = inst.center.coords

    def neg_minslack(x):
        s, t = x[:-1], x[-1]
        return -t

    def cons_slack(x):
        return ys @ x[:-1] - cr - x[-1]

    def cons_ball(x):
        return 1.0 - float(x[:-1] @ x[:-1])

    x0 = np.concatenate([z * 0.5, [float(np.min(ys @ (z * 0.5) - cr))]])
    res = minimize(
        neg_minslack, x0, method="SLSQP",
        constraints=[
            {"type": "ineq", "fun": cons_slack},
            {"type": "ineq", "fun": cons_ball},
        ],
        options={"maxiter": 500, "ftol": 1e-14},
    )
    s = res.x[:-1]
    norm_s = float(np.linalg.norm(s))
    degenerate = norm_s < 1e-8
    if degenerate:
        # conflicting constraints pin the lift at the cone apex; the ray
        # direction is lost, so fall back to the direct sphere minimax
        cheb = chebyshev_extend(inst)
        return ConeResult(cheb.point, cheb.defect, True)
    else:
        # slide s along s + tau*z to the unit sphere (tau >= 0 exists since |s| <= 1)
        sz = float(s @ z)
        tau = -sz + math.sqrt(max(sz * sz + 1.0 - norm_s**2, 0.0))
        sbar = s + tau * z
        sbar = sbar / np.linalg.norm(sbar)
    point = ModelPoint(sbar, ms.SPHERE)
    defect = float(
        max(
            ms.chart_dist(point, y) - r
            for y, r in zip(inst.targets, inst.radii)
        )
    )
    return ConeResult(point, defect, degenerate)
