"""Trigonometry and geodesic geometry in the constant-curvature model spaces.

Three charts are used: flat R^m, the unit sphere in R^(m+1), and the
hyperboloid sheet in Minkowski R^(m,1) with the time coordinate last.
Arbitrary curvature magnitudes are handled purely by rescaling lengths
into the unit chart, never by separate formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

FLAT = "flat"
SPHERE = "sphere"
HYPERBOLOID = "hyperboloid"

# arguments of arccos/arccosh may drift outside the valid interval by
# roundoff; clamping beyond this is treated as genuinely invalid input
DOMAIN_CLAMP = 1e-7


class _Undefined:
    """Singleton result for model triangles/angles failing the definedness clause."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNDEFINED"

    def __bool__(self):
        return False


class _Infeasible:
    """Singleton result for distance data with no model-space realization."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFEASIBLE"

    def __bool__(self):
        return False


UNDEFINED = _Undefined()
INFEASIBLE = _Infeasible()


class ChartError(ValueError):
    """Chart mismatch or a point violating its chart constraint."""


class DomainError(ValueError):
    """Inner-product argument outside the valid interval by more than the clamp."""


def chart_for(kappa: float) -> str:
    if kappa > 0:
        return SPHERE
    if kappa < 0:
        return HYPERBOLOID
    return FLAT


def length_scale(kappa: float) -> float:
    """Factor turning lengths in curvature kappa into unit-chart lengths."""
    return math.sqrt(abs(kappa)) if kappa != 0 else 1.0


def pomega(kappa: float) -> float:
    """Diameter of the 2-dimensional model space: infinity for kappa <= 0."""
    if kappa <= 0:
        return math.inf
    return math.pi / math.sqrt(kappa)


@dataclass(frozen=True)
class Curvature:
    kappa: float = 0.0

    @property
    def chart(self) -> str:
        return chart_for(self.kappa)

    @property
    def scale(self) -> float:
        return length_scale(self.kappa)

    def pomega(self) -> float:
        return pomega(self.kappa)

    def rescale(self, lam: float) -> "Curvature":
        """Curvature of the same space with all distances divided by sqrt(lam)."""
        if lam <= 0:
            raise ValueError("rescaling factor must be positive")
        return Curvature(lam * self.kappa)


def _clamp(value, lo, hi, what="inner product"):
    if value < lo - DOMAIN_CLAMP or value > hi + DOMAIN_CLAMP:
        raise DomainError(f"{what} {value!r} outside [{lo}, {hi}] beyond clamp tolerance")
    return min(max(value, lo), hi)


def minkowski_dot(u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(u[:-1] @ v[:-1] - u[-1] * v[-1])


@dataclass(frozen=True, eq=False)
class ModelPoint:
    coords: np.ndarray
    chart: str = FLAT

    def __post_init__(self):
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=float))
        if self.chart not in (FLAT, SPHERE, HYPERBOLOID):
            raise ChartError(f"unknown chart {self.chart!r}")

    @property
    def dim(self) -> int:
        """Intrinsic dimension of the model space the point lives in."""
        n = len(self.coords)
        return n if self.chart == FLAT else n - 1

    def validate(self, tol: float = 1e-9):
        if self.chart == SPHERE:
            err = abs(float(self.coords @ self.coords) - 1.0)
            if err > tol:
                raise ChartError(f"sphere point off the unit sphere by {err:g}")
        elif self.chart == HYPERBOLOID:
            err = abs(minkowski_dot(self.coords, self.coords) + 1.0)
            if err > tol or self.coords[-1] < 1.0 - tol:
                raise ChartError("hyperboloid point off the upper unit sheet")
        return self

    def close_to(self, other: "ModelPoint", tol: float = 1e-9) -> bool:
        return self.chart == other.chart and bool(
            np.allclose(self.coords, other.coords, atol=tol)
        )


@dataclass(frozen=True, eq=False)
class ModelConfig:
    points: tuple
    curvature: Curvature = Curvature(0.0)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if isinstance(self.curvature, (int, float)):
            object.__setattr__(self, "curvature", Curvature(float(self.curvature)))
        charts = {p.chart for p in self.points}
        dims = {len(p.coords) for p in self.points}
        if len(charts) > 1 or len(dims) > 1:
            raise ChartError("configuration points must share chart and ambient dimension")

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def distance_matrix(self) -> np.ndarray:
        n = len(self.points)
        d = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                d[i, j] = d[j, i] = dist(self.points[i], self.points[j], self.curvature.kappa)
        return d


def _check_pair(a: ModelPoint, b: ModelPoint):
    if a.chart != b.chart or len(a.coords) != len(b.coords):
        raise ChartError("points live in different charts or ambient dimensions")


def chart_dist(a: ModelPoint, b: ModelPoint) -> float:
    """Distance in the unit chart (curvature in {-1, 0, +1})."""
    _check_pair(a, b)
    if a.chart == FLAT:
        return float(np.linalg.norm(a.coords - b.coords))
    if a.chart == SPHERE:
        c = _clamp(float(a.coords @ b.coords), -1.0, 1.0, "spherical cosine")
        return math.acos(c)
    c = -minkowski_dot(a.coords, b.coords)
    c = max(_clamp(c, 1.0, math.inf, "hyperbolic cosine"), 1.0)
    return math.acosh(c)


def dist(a: ModelPoint, b: ModelPoint, kappa: float | None = None) -> float:
    """Distance between chart points, rescaled to curvature kappa when given."""
    d = chart_dist(a, b)
    if kappa is None or kappa == 0:
        return d
    if chart_for(kappa) != a.chart:
        raise ChartError(f"curvature {kappa} does not match chart {a.chart!r}")
    return d / length_scale(kappa)


def project_to_tangent(base: ModelPoint, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if base.chart == FLAT:
        return v
    if base.chart == SPHERE:
        return v - (v @ base.coords) * base.coords
    return v + minkowski_dot(v, base.coords) * base.coords


def tangent_norm(base: ModelPoint, v) -> float:
    v = np.asarray(v, dtype=float)
    if base.chart == HYPERBOLOID:
        return math.sqrt(max(minkowski_dot(v, v), 0.0))
    return float(np.linalg.norm(v))


def log_map(base: ModelPoint, target: ModelPoint) -> np.ndarray:
    """Tangent vector at base whose norm is the chart distance to target."""
    _check_pair(base, target)
    if base.chart == FLAT:
        return target.coords - base.coords
    d = chart_dist(base, target)
    if d < 1e-15:
        return np.zeros_like(base.coords)
    if base.chart == SPHERE:
        if d > math.pi - 1e-12:
            raise ValueError("log map undefined at the antipode")
        u = target.coords - math.cos(d) * base.coords
    else:
        u = target.coords - math.cosh(d) * base.coords
    n = tangent_norm(base, u)
    if n < 1e-15:
        # coincident points whose acos/acosh distance is pure rounding noise
        return np.zeros_like(base.coords)
    return (d / n) * u


def exp_map(base: ModelPoint, direction, t: float | None = None) -> ModelPoint:
    """Point at arclength t along the geodesic leaving base with the given tangent.

    If t is omitted it is taken as the norm of the tangent vector
    (so exp and log are mutually inverse where the geodesic is unique).
    """
    v = project_to_tangent(base, np.asarray(direction, dtype=float))
    n = tangent_norm(base, v)
    if t is None:
        t = n
    if t < 0:
        raise ValueError("arclength must be nonnegative")
    if t == 0 or n < 1e-15:
        return ModelPoint(base.coords.copy(), base.chart)
    u = v / n
    if base.chart == FLAT:
        return ModelPoint(base.coords + t * u, FLAT)
    if base.chart == SPHERE:
        if t > math.pi + 1e-12:
            raise ValueError("arclength beyond the sphere diameter")
        return ModelPoint(math.cos(t) * base.coords + math.sin(t) * u, SPHERE)
    return ModelPoint(math.cosh(t) * base.coords + math.sinh(t) * u, HYPERBOLOID)


def geodesic_eval(a: ModelPoint, b: ModelPoint, t: float, kappa: float | None = None) -> ModelPoint:
    """Point on the unit-speed geodesic from a to b at arclength t (in kappa units)."""
    s = length_scale(kappa) if kappa else 1.0
    tc = t * s
    d = chart_dist(a, b)
    if tc < -1e-12 or tc > d + 1e-12:
        raise ValueError(f"arclength {t} outside [0, {d / s}]")
    tc = min(max(tc, 0.0), d)
    if d < 1e-15:
        return ModelPoint(a.coords.copy(), a.chart)
    if a.chart == SPHERE and d > math.pi - 1e-12:
        raise ValueError("geodesic between antipodal points is not unique")
    return exp_map(a, log_map(a, b), tc)


def _cos_angle(adj1: float, adj2: float, opp: float, sign: int):
    """Cosine of the model angle from the three side lengths, or None when invalid."""
    if sign == 0:
        c = (adj1 * adj1 + adj2 * adj2 - opp * opp) / (2.0 * adj1 * adj2)
    elif sign > 0:
        s1, s2 = math.sin(adj1), math.sin(adj2)
        if s1 < 1e-15 or s2 < 1e-15:
            return None
        c = (math.cos(opp) - math.cos(adj1) * math.cos(adj2)) / (s1 * s2)
    else:
        c = (math.cosh(adj1) * math.cosh(adj2) - math.cosh(opp)) / (
            math.sinh(adj1) * math.sinh(adj2)
        )
    if c < -1.0 - 1e-9 or c > 1.0 + 1e-9:
        return None
    return min(max(c, -1.0), 1.0)


def model_angle(d_pq: float, d_pr: float, d_qr: float, kappa: float = 0.0):
    """Angle at p of the comparison triangle with the given side lengths.

    Returns UNDEFINED when kappa > 0 and the perimeter reaches 2*pomega,
    or when the triple violates the triangle inequality.
    """
    if d_pq <= 0 or d_pr <= 0:
        raise ValueError("model angle needs positive adjacent sides")
    s = length_scale(kappa)
    a, b, c = d_pq * s, d_pr * s, d_qr * s
    if kappa > 0 and a + b + c >= 2.0 * math.pi - 1e-12:
        return UNDEFINED
    sign = 0 if kappa == 0 else (1 if kappa > 0 else -1)
    cos_alpha = _cos_angle(a, b, c, sign)
    if cos_alpha is None:
        return UNDEFINED
    return math.acos(cos_alpha)


def side_from_sas(adj1: float, adj2: float, angle: float, kappa: float = 0.0) -> float:
    """Length of the side opposite `angle` given its two adjacent side lengths."""
    s = length_scale(kappa)
    a, b = adj1 * s, adj2 * s
    ca = math.cos(angle)
    if kappa == 0:
        d = math.sqrt(max(a * a + b * b - 2.0 * a * b * ca, 0.0))
    elif kappa > 0:
        c = math.cos(a) * math.cos(b) + math.sin(a) * math.sin(b) * ca
        d = math.acos(min(max(c, -1.0), 1.0))
    else:
        c = math.cosh(a) * math.cosh(b) - math.sinh(a) * math.sinh(b) * ca
        d = math.acosh(max(c, 1.0))
    return d / s


def tangent_basis(base: ModelPoint) -> list:
    """Orthonormal basis of the tangent space at base, in the chart metric."""
    n = len(base.coords)
    if base.chart == FLAT:
        return [np.eye(n)[i] for i in range(n)]
    dot = (lambda u, v: minkowski_dot(u, v)) if base.chart == HYPERBOLOID else (
        lambda u, v: float(np.asarray(u) @ np.asarray(v))
    )
    basis = []
    for i in range(n):
        v = project_to_tangent(base, np.eye(n)[i])
        for e in basis:
            v = v - dot(v, e) * e
        nv = math.sqrt(max(dot(v, v), 0.0))
        if nv > 1e-9:
            basis.append(v / nv)
        if len(basis) == n - 1:
            break
    return basis


@dataclass(frozen=True)
class ModelTriangle:
    """Comparison triangle: vertices p, q, r with sides (pq, qr, rp) and the
    angles at p, q, r recoverable from the sides."""

    d_pq: float
    d_qr: float
    d_rp: float
    angle_p: float
    angle_q: float
    angle_r: float
    curvature: Curvature

    @property
    def perimeter(self) -> float:
        return self.d_pq + self.d_qr + self.d_rp


def _vertex_angle(adj1, adj2, opp, kappa):
    if adj1 <= 0 or adj2 <= 0:
        return 0.0
    ang = model_angle(adj1, adj2, opp, kappa)
    if ang is UNDEFINED:
        return UNDEFINED
    return ang


def model_triangle(d_pq: float, d_qr: float, d_rp: float, kappa: float = 0.0):
    """Comparison triangle from three side lengths, UNDEFINED per the kappa > 0 clause."""
    sides = (d_pq, d_qr, d_rp)
    if any(s < 0 for s in sides):
        raise ValueError("side lengths must be nonnegative")
    tol = 1e-12 * (1.0 + max(sides))
    for i in range(3):
        if sides[i] > sides[(i + 1) % 3] + sides[(i + 2) % 3] + tol:
            raise ValueError(f"triangle inequality violated by sides {sides}")
    if kappa > 0 and sum(sides) >= 2.0 * pomega(kappa) - 1e-12:
        return UNDEFINED
    ang_p = _vertex_angle(d_pq, d_rp, d_qr, kappa)
    ang_q = _vertex_angle(d_pq, d_qr, d_rp, kappa)
    ang_r = _vertex_angle(d_qr, d_rp, d_pq, kappa)
    if UNDEFINED in (ang_p, ang_q, ang_r):
        return UNDEFINED
    return ModelTriangle(d_pq, d_qr, d_rp, ang_p, ang_q, ang_r, Curvature(kappa))


def origin(chart: str, dim: int) -> ModelPoint:
    """A base point of the chart: the coordinate origin or the pole (0,...,0,1)."""
    if chart == FLAT:
        return ModelPoint(np.zeros(dim), FLAT)
    coords = np.zeros(dim + 1)
    coords[-1] = 1.0
    return ModelPoint(coords, chart)


def _from_polar(chart: str, dim: int, r: float, direction: np.ndarray) -> ModelPoint:
    base = origin(chart, dim)
    v = np.zeros(len(base.coords))
    v[: len(direction)] = direction
    return exp_map(base, v, r)


def realize_triangle(tri: ModelTriangle) -> ModelConfig:
    """Vertices (p, q, r) of the triangle in the 2-dimensional unit chart.

    p sits at the chart origin/pole, q along the first coordinate direction;
    distances are reproduced in the triangle's own curvature scale.
    """
    kappa = tri.curvature.kappa
    s = length_scale(kappa)
    chart = chart_for(kappa)
    p = origin(chart, 2)
    q = _from_polar(chart, 2, tri.d_pq * s, np.array([1.0, 0.0]))
    a = tri.angle_p
    r = _from_polar(chart, 2, tri.d_rp * s, np.array([math.cos(a), math.sin(a)]))
    return ModelConfig((p, q, r), Curvature(kappa))


# ---------------------------------------------------------------------------
# Euclidean cone over a sphere chart

def cone_point(direction: ModelPoint, radius: float) -> np.ndarray:
    """Point of the Euclidean cone over a sphere chart, as an ambient vector."""
    if direction.chart != SPHERE:
        raise ChartError("cone directions must lie on a sphere chart")
    if radius < 0:
        raise ValueError("cone radius must be nonnegative")
    return radius * direction.coords


def cone_dist(x, y) -> float:
    """Distance in the Euclidean cone: law of cosines with the angle clamped at pi."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    rx = float(np.linalg.norm(x))
    ry = float(np.linalg.norm(y))
    if rx < 1e-300 or ry < 1e-300:
        return rx + ry
    c = _clamp(float(x @ y) / (rx * ry), -1.0, 1.0, "cone cosine")
    ang = min(math.acos(c), math.pi)
    return math.sqrt(max(rx * rx + ry * ry - 2.0 * rx * ry * math.cos(ang), 0.0))


# ---------------------------------------------------------------------------
# Gram-type feasibility and realization of four-point distance data

def _eigh_points(g: np.ndarray, max_rank: int, tol: float):
    """Factor a PSD-within-tol Gram matrix into row vectors of dim max_rank."""
    w, v = np.linalg.eigh(g)
    if w[0] < -tol:
        return None
    w = np.clip(w, 0.0, None)
    order = np.argsort(w)[::-1][:max_rank]
    x = v[:, order] * np.sqrt(w[order])
    out = np.zeros((g.shape[0], max_rank))
    out[:, : x.shape[1]] = x
    return out


def embed_simplex(d: np.ndarray, kappa: float = 0.0, tol: float = 1e-9):
    """Realize 4x4 symmetric distance data in the 3-dimensional model space.

    Returns a ModelConfig reproducing all six distances, or INFEASIBLE when
    the Gram-type feasibility condition fails (flat: Gram matrix of
    differences; sphere: cosine Gram; hyperboloid: cosh Gram with Lorentz
    signature).
    """
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    if d.shape != (n, n) or not np.allclose(d, d.T, atol=1e-9):
        raise ValueError("distance data must be a symmetric square matrix")
    s = length_scale(kappa)
    ds = d * s
    chart = chart_for(kappa)
    scale_tol = tol * (1.0 + float(np.max(ds)) ** 2)
    if chart == FLAT:
        sq = ds**2
        g = 0.5 * (sq[0, 1:, None] + sq[0, None, 1:] - sq[1:, 1:])
        g = 0.5 * (g + g.T)
        x = _eigh_points(g, 3, scale_tol)
        if x is None:
            return INFEASIBLE
        pts = np.vstack([np.zeros(3), x])
        config = ModelConfig(tuple(ModelPoint(p, FLAT) for p in pts), Curvature(kappa))
    elif chart == SPHERE:
        if np.max(ds) >= math.pi - 1e-12:
            raise ValueError("sphere distances must stay below pomega")
        g = np.cos(ds)
        x = _eigh_points(g, 4, scale_tol)
        if x is None:
            return INFEASIBLE
        norms = np.linalg.norm(x, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-6):
            return INFEASIBLE
        config = ModelConfig(
            tuple(ModelPoint(p / np.linalg.norm(p), SPHERE) for p in x), Curvature(kappa)
        )
    else:
        g = -np.cosh(ds)
        w, v = np.linalg.eigh(g)
        # Lorentz signature: exactly one negative direction, at most 3 positive
        if n > 1 and w[1] < -scale_tol:
            return INFEASIBLE
        time = np.sqrt(max(-w[0], 0.0)) * v[:, 0]
        if np.all(time <= 0):
            time = -time
        if np.any(time <= 0):
            return INFEASIBLE
        w_rest = np.clip(w[1:], 0.0, None)
        space = v[:, 1:] * np.sqrt(w_rest)
        if space.shape[1] > 3:
            keep = np.argsort(w_rest)[::-1][:3]
            space = space[:, keep]
        pts = np.zeros((n, 4))
        pts[:, : space.shape[1]] = space
        pts[:, 3] = time
        fixed = []
        for p in pts:
            q = minkowski_dot(p, p)
            if q >= -1e-12:
                return INFEASIBLE
            fixed.append(p / math.sqrt(-q))
        config = ModelConfig(tuple(ModelPoint(p, HYPERBOLOID) for p in fixed), Curvature(kappa))
    realized = config.distance_matrix()
    if np.max(np.abs(realized - d)) > 1e-6 * (1.0 + np.max(d)):
        return INFEASIBLE
    return config


# ---------------------------------------------------------------------------
# Folding maps

@dataclass(frozen=True, eq=False)
class Halfspace:
    """Oriented geodesic hyperplane: points with nonnegative side value are kept."""

    normal: np.ndarray
    offset: float = 0.0
    chart: str = FLAT

    def __post_init__(self):
        object.__setattr__(self, "normal", np.asarray(self.normal, dtype=float))

    def side_value(self, x: ModelPoint) -> float:
        if self.chart == FLAT:
            return float(self.normal @ x.coords) - self.offset
        if self.chart == SPHERE:
            return float(self.normal @ x.coords)
        return minkowski_dot(self.normal, x.coords)


def fold(x: ModelPoint, hs: Halfspace) -> ModelPoint:
    """Identity on the halfspace, reflection of its complement into it."""
    if x.chart != hs.chart:
        raise ChartError("point and halfspace charts differ")
    v = hs.side_value(x)
    if v >= 0:
        return x
    # the same expression reflects in all three charts; for the hyperboloid the
    # side value is already the Minkowski pairing with a unit spacelike normal
    return ModelPoint(x.coords - 2.0 * v * hs.normal, x.chart)


def side_halfspace(vi: ModelPoint, vj: ModelPoint, inside: ModelPoint) -> Halfspace:
    """Halfspace bounded by the geodesic through vi, vj containing `inside`.

    Only 2-dimensional charts are supported; the bounding geodesic is a full
    line / great circle / hyperbolic line.
    """
    chart = vi.chart
    if chart == FLAT:
        if len(vi.coords) != 2:
            raise ChartError("folding is implemented for 2-dimensional charts")
        e = vj.coords - vi.coords
        n = np.array([-e[1], e[0]])
        nn = np.linalg.norm(n)
        if nn < 1e-15:
            raise ValueError("degenerate side: coincident vertices")
        n /= nn
        off = float(n @ vi.coords)
        if float(n @ inside.coords) - off < 0:
            n, off = -n, -off
        return Halfspace(n, off, FLAT)
    if len(vi.coords) != 3:
        raise ChartError("folding is implemented for 2-dimensional charts")
    u = np.cross(vi.coords, vj.coords)
    if chart == SPHERE:
        nn = np.linalg.norm(u)
        if nn < 1e-15:
            raise ValueError("degenerate side: coincident or antipodal vertices")
        n = u / nn
        if float(n @ inside.coords) < 0:
            n = -n
        return Halfspace(n, 0.0, SPHERE)
    n = u * np.array([1.0, 1.0, -1.0])
    q = minkowski_dot(n, n)
    if q < 1e-15:
        raise ValueError("degenerate side: coincident vertices")
    n = n / math.sqrt(q)
    if minkowski_dot(n, inside.coords) < 0:
        n = -n
    return Halfspace(n, 0.0, HYPERBOLOID)


class FoldCapExceeded(RuntimeError):
    def __init__(self, point: ModelPoint, residual: float):
        super().__init__(f"fold iteration cap exceeded, residual {residual:g}")
        self.point = point
        self.residual = residual


def fold_into_triangle(x: ModelPoint, vertices, tol: float = 1e-10):
    """Iterate folds along the triangle's sides until x lies in its convex hull.

    Never increases the distance from x to any point of the triangle.  The
    iteration cap scales with the configuration's diameter over its smallest
    feature; exceeding it raises FoldCapExceeded carrying the residual.
    """
    v1, v2, v3 = vertices
    sides = [
        side_halfspace(v1, v2, v3),
        side_halfspace(v2, v3, v1),
        side_halfspace(v3, v1, v2),
    ]
    pts = [v1, v2, v3]
    feats = [chart_dist(pts[i], pts[(i + 1) % 3]) for i in range(3)]
    feature = min(feats)
    diam = max(max(feats), max(chart_dist(x, v) for v in pts))
    cap = int(10 * (1 + diam / max(feature, 1e-12)))
    cur = x
    for _ in range(cap):
        worst = min(hs.side_value(cur) for hs in sides)
        if worst >= -tol:
            return cur
        for hs in sides:
            cur = fold(cur, hs)
    residual = -min(hs.side_value(cur) for hs in sides)
    if residual <= tol:
        return cur
    raise FoldCapExceeded(cur, residual)
