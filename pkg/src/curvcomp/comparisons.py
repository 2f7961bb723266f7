"""Curvature-comparison predicates on finite metric data.

Every check reports a signed defect per tuple: the slack of the underlying
inequality, so PASS means defect >= -tol.  Tuples hitting the positive-
curvature definedness clause are UNDEFINED and count as passing, but are
listed separately in reports.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import model_spaces as ms
from .model_spaces import UNDEFINED, Curvature, ModelConfig, ModelPoint

PASS = "PASS"
FAIL = "FAIL"
UNKNOWN = "UNKNOWN"
UNDEF = "UNDEFINED"
REJECTED = "REJECTED"


class SimplexInfeasibleError(ValueError):
    """Chain input whose quadruples admit no model-space realization."""


@dataclass(frozen=True, eq=False)
class FiniteMetric:
    """A labeled symmetric distance matrix with zero diagonal."""

    labels: tuple
    d: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        d = np.asarray(self.d, dtype=float)
        object.__setattr__(self, "d", d)
        n = len(self.labels)
        if d.shape != (n, n):
            raise ValueError("distance matrix shape does not match labels")
        if np.any(np.abs(np.diag(d)) > 1e-12):
            raise ValueError("distance matrix must have zero diagonal")
        if np.max(np.abs(d - d.T)) > 1e-12 * (1.0 + np.max(np.abs(d))):
            raise ValueError("distance matrix must be symmetric")
        if np.any(d < 0) or np.any(~np.isfinite(d)):
            raise ValueError("distances must be finite and nonnegative")

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def diameter(self) -> float:
        return float(np.max(self.d)) if self.n else 0.0

    def index(self, label) -> int:
        if isinstance(label, (int, np.integer)):
            return int(label)
        return self.labels.index(str(label))

    def submetric(self, indices) -> "FiniteMetric":
        idx = [self.index(i) for i in indices]
        return FiniteMetric(
            tuple(self.labels[i] for i in idx), self.d[np.ix_(idx, idx)]
        )

    def triangle_audit(self, tol: float = 1e-9):
        """Triangle-inequality violations, reported but never enforced."""
        bad = []
        for i, j, k in itertools.permutations(range(self.n), 3):
            if j < k and self.d[j, k] > self.d[j, i] + self.d[i, k] + tol:
                bad.append((j, i, k, self.d[j, k] - self.d[j, i] - self.d[i, k]))
        return bad


def default_tol(metric: FiniteMetric) -> float:
    return 1e-9 * (1.0 + metric.diameter)


@dataclass
class TupleRecord:
    indices: tuple
    defect: float | None
    verdict: str
    witness: object = None

    def to_dict(self, labels=None):
        idx = (
            tuple(labels[i] for i in self.indices) if labels is not None else self.indices
        )
        return {"tuple": list(idx), "defect": self.defect, "verdict": self.verdict}


@dataclass
class ComparisonReport:
    check: str
    kappa: float
    tol: float
    records: list = field(default_factory=list)
    labels: tuple | None = None

    @property
    def n_fail(self) -> int:
        return sum(1 for r in self.records if r.verdict == FAIL)

    @property
    def n_unknown(self) -> int:
        return sum(1 for r in self.records if r.verdict == UNKNOWN)

    @property
    def n_undefined(self) -> int:
        return sum(1 for r in self.records if r.verdict == UNDEF)

    @property
    def all_pass(self) -> bool:
        return self.n_fail == 0 and self.n_unknown == 0

    def worst(self):
        defects = [r for r in self.records if r.defect is not None]
        return min(defects, key=lambda r: r.defect) if defects else None

    def to_dict(self):
        worst = self.worst()
        return {
            "check": self.check,
            "kappa": self.kappa,
            "tol": self.tol,
            "n_tuples": len(self.records),
            "n_fail": self.n_fail,
            "n_unknown": self.n_unknown,
            "n_undefined": self.n_undefined,
            "all_pass": self.all_pass,
            "worst_defect": None if worst is None else worst.defect,
            "records": [r.to_dict(self.labels) for r in self.records],
        }


def _angle_at(d: np.ndarray, i: int, j: int, k: int, kappa: float):
    """Model angle at i between j and k; zero adjacent sides contribute angle 0."""
    if d[i, j] <= 0 or d[i, k] <= 0:
        return 0.0
    return ms.model_angle(d[i, j], d[i, k], d[j, k], kappa)


def check_1plus3(metric: FiniteMetric, kappa: float = 0.0, tol: float | None = None):
    """Angle-sum comparison around every center against every triple."""
    if metric.n < 4:
        raise ValueError("comparison needs at least 4 points")
    if tol is None:
        tol = default_tol(metric)
    report = ComparisonReport("1plus3", kappa, tol, labels=metric.labels)
    d = metric.d
    for p in range(metric.n):
        others = [i for i in range(metric.n) if i != p]
        for x1, x2, x3 in itertools.combinations(others, 3):
            angles = [
                _angle_at(d, p, x1, x2, kappa),
                _angle_at(d, p, x2, x3, kappa),
                _angle_at(d, p, x3, x1, kappa),
            ]
            if UNDEFINED in angles:
                report.records.append(TupleRecord((p, x1, x2, x3), None, UNDEF))
                continue
            defect = 2.0 * math.pi - sum(angles)
            verdict = PASS if defect >= -tol else FAIL
            report.records.append(TupleRecord((p, x1, x2, x3), defect, verdict))
    return report


def check_2plus2(metric: FiniteMetric, kappa: float = 0.0, tol: float | None = None):
    """Two-pair comparison over every split of every quadruple."""
    if metric.n < 4:
        raise ValueError("comparison needs at least 4 points")
    if tol is None:
        tol = default_tol(metric)
    report = ComparisonReport("2plus2", kappa, tol, labels=metric.labels)
    d = metric.d
    for quad in itertools.combinations(range(metric.n), 4):
        a = quad[0]
        for b in quad[1:]:
            xs = [i for i in quad if i not in (a, b)]
            p1, p2, (x1, x2) = a, b, xs
            angles = {}
            undefined = False
            for p, q in ((p1, p2), (p2, p1)):
                for args in ((p, x1, x2), (p, q, x1), (p, q, x2)):
                    ang = _angle_at(d, *args, kappa)
                    if ang is UNDEFINED:
                        undefined = True
                    angles[args] = ang
            if undefined:
                report.records.append(TupleRecord((p1, p2, x1, x2), None, UNDEF))
                continue
            slack1 = (
                angles[(p1, p2, x1)] + angles[(p1, p2, x2)] - angles[(p1, x1, x2)]
            )
            slack2 = (
                angles[(p2, p1, x1)] + angles[(p2, p1, x2)] - angles[(p2, x1, x2)]
            )
            defect = max(slack1, slack2)
            verdict = PASS if defect >= -tol else FAIL
            report.records.append(TupleRecord((p1, p2, x1, x2), defect, verdict))
    return report


def pos_defect(p, x, y, z, kappa: float = 0.0, metric: FiniteMetric | None = None):
    """Point-on-side comparison defect: model-side distance minus actual.

    `z` must split the side [x y] (d(x,z) + d(z,y) = d(x,y) within tolerance).
    Positive values mean the upper-bound (CAT-style) comparison holds, negative
    the lower-bound (CBB-style) one.
    """
    if metric is not None:
        ip, ix, iy, iz = (metric.index(v) for v in (p, x, y, z))
        d = metric.d
        d_xy, d_xz, d_zy = d[ix, iy], d[ix, iz], d[iz, iy]
        d_xp, d_yp, d_pz = d[ix, ip], d[iy, ip], d[ip, iz]
    else:
        d_xy = ms.dist(x, y, kappa)
        d_xz = ms.dist(x, z, kappa)
        d_zy = ms.dist(z, y, kappa)
        d_xp = ms.dist(x, p, kappa)
        d_yp = ms.dist(y, p, kappa)
        d_pz = ms.dist(p, z, kappa)
    tol = 1e-7 * (1.0 + d_xy)
    if abs(d_xz + d_zy - d_xy) > tol:
        raise ValueError("z does not lie on the side [x y]")
    if d_xz <= tol:
        return 0.0
    if d_xp <= tol:
        return d_xz - d_pz
    # model triangle on (p, x, y): angle at x between p and y
    ang = ms.model_angle(d_xp, d_xy, d_yp, kappa)
    if ang is UNDEFINED:
        raise ValueError("model triangle undefined for this curvature")
    model_pz = ms.side_from_sas(d_xp, d_xz, ang, kappa)
    return model_pz - d_pz


# ---------------------------------------------------------------------------
# (1+n)-point comparison: existential search over direction configurations

@dataclass
class OnePlusNResult:
    verdict: str
    slack: float
    basepoint: int
    witness: ModelConfig | None
    kappa: float

    def to_dict(self, labels=None):
        base = labels[self.basepoint] if labels is not None else self.basepoint
        return {
            "basepoint": base,
            "verdict": self.verdict,
            "slack": self.slack,
        }


def _pair_dist_from_gram(r_i, r_j, t, kappa_sign):
    """Distance between two points at radii r_i, r_j whose directions have
    inner product t, in the unit chart."""
    if kappa_sign == 0:
        return math.sqrt(max(r_i * r_i + r_j * r_j - 2.0 * r_i * r_j * t, 0.0))
    if kappa_sign > 0:
        c = math.cos(r_i) * math.cos(r_j) + math.sin(r_i) * math.sin(r_j) * t
        return math.acos(min(max(c, -1.0), 1.0))
    c = math.cosh(r_i) * math.cosh(r_j) - math.sinh(r_i) * math.sinh(r_j) * t
    return math.acosh(max(c, 1.0))


def _mds_directions(metric: FiniteMetric, base: int, n: int):
    """Classical multidimensional scaling start for the direction search."""
    sq = metric.d**2
    m = metric.n
    j = np.eye(m) - np.ones((m, m)) / m
    b = -0.5 * j @ sq @ j
    w, v = np.linalg.eigh(b)
    order = np.argsort(w)[::-1][:n]
    coords = v[:, order] * np.sqrt(np.clip(w[order], 0.0, None))
    others = [i for i in range(m) if i != base]
    dirs = coords[others] - coords[base]
    out = np.zeros((n, n))
    out[:, : coords.shape[1]] = dirs
    return out


def check_1plusN(
    metric: FiniteMetric,
    basepoint,
    kappa: float = 0.0,
    tol: float = None,
    restarts: int = 32,
    seed: int = 0,
    max_iter: int = 200,
):
    """Search for a model array with exact base distances and non-contracted
    mutual distances.

    The predicate is existential: PASS is certified by the witness; when the
    multistart ascent finds nothing the verdict is UNKNOWN with the best slack
    achieved, never FAIL.
    """
    base = metric.index(basepoint)
    if tol is None:
        # solver tolerance dominates the metric-scaled one for this check
        tol = 1e-6 * (1.0 + metric.diameter)
    others = [i for i in range(metric.n) if i != base]
    n = len(others)
    s = ms.length_scale(kappa)
    sign = 0 if kappa == 0 else (1 if kappa > 0 else -1)
    r = np.array([metric.d[base, i] for i in others]) * s
    if sign > 0 and np.any(r > math.pi + 1e-12):
        raise ValueError("base distance exceeds the model space diameter")
    dd = np.array([[metric.d[i, j] for j in others] for i in others]) * s
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    if n == 1:
        witness = _witness_config(np.ones((1, 1)), r, kappa, sign)
        return OnePlusNResult(PASS, math.inf, base, witness, kappa)

    def slacks(u_flat):
        u = u_flat.reshape(n, n)
        norms = np.linalg.norm(u, axis=1)
        norms = np.where(norms < 1e-12, 1.0, norms)
        un = u / norms[:, None]
        t = un @ un.T
        out = np.empty(len(pairs))
        for k, (i, j) in enumerate(pairs):
            out[k] = (
                _pair_dist_from_gram(r[i], r[j], t[i, j], sign) - dd[i, j]
            ) / s
        return out

    rng = np.random.default_rng(seed)
    starts = [_mds_directions(metric, base, n)]
    for _ in range(restarts):
        starts.append(rng.standard_normal((n, n)))

    best_slack = -math.inf
    best_u = None
    for u0 in starts:
        norms = np.linalg.norm(u0, axis=1)
        if np.any(norms < 1e-9):
            u0 = u0 + 1e-3 * rng.standard_normal(u0.shape)
            norms = np.linalg.norm(u0, axis=1)
        u0 = u0 / norms[:, None]
        x0 = np.concatenate([u0.ravel(), [float(np.min(slacks(u0.ravel())))]])

        def neg_s(v):
            return -v[-1]

        def cons(v):
            return slacks(v[:-1]) - v[-1]

        res = minimize(
            neg_s,
            x0,
            method="SLSQP",
            constraints=[{"type": "ineq", "fun": cons}],
            options={"maxiter": max_iter, "ftol": 1e-12},
        )
        val = float(np.min(slacks(res.x[:-1])))
        if val > best_slack:
            best_slack = val
            best_u = res.x[:-1].reshape(n, n)
        if best_slack >= 0:
            break

    un = best_u / np.linalg.norm(best_u, axis=1)[:, None]
    witness = _witness_config(un, r, kappa, sign)
    verdict = PASS if best_slack >= -tol else UNKNOWN
    return OnePlusNResult(verdict, best_slack, base, witness, kappa)


def _witness_config(un: np.ndarray, r: np.ndarray, kappa: float, sign: int) -> ModelConfig:
    """Model array (base point first) realizing the direction Gram matrix."""
    n = un.shape[0]
    chart = ms.chart_for(kappa)
    origin = ms.origin(chart, max(n, 2))
    pts = [origin]
    for i in range(n):
        v = np.zeros(len(origin.coords))
        v[: un.shape[1]] = un[i]
        v = ms.project_to_tangent(origin, v)
        pts.append(ms.exp_map(origin, v, float(r[i])))
    return ModelConfig(tuple(pts), Curvature(kappa))


# ---------------------------------------------------------------------------
# (2n+2)-point comparison: chained model simplices

@dataclass
class ChainResult:
    verdict: str
    defect: float | None
    chain_length: float | None
    params: np.ndarray | None
    witness: ModelConfig | None
    z_points: tuple | None
    kappa: float

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "defect": self.defect,
            "chain_length": self.chain_length,
            "params": None if self.params is None else list(map(float, self.params)),
        }


def _frame(base: ModelPoint, e1: np.ndarray):
    """Orthonormal tangent frame at base starting with e1."""
    dot = (
        ms.minkowski_dot
        if base.chart == ms.HYPERBOLOID
        else (lambda a, b: float(np.asarray(a) @ np.asarray(b)))
    )
    dim = base.dim
    basis = [e1]
    for cand in ms.tangent_basis(base):
        v = np.asarray(cand, dtype=float)
        for e in basis:
            v = v - dot(v, e) * e
        nv = math.sqrt(max(dot(v, v), 0.0))
        if nv > 1e-9:
            basis.append(v / nv)
        if len(basis) == dim:
            break
    return basis


def _place_by_normal_coords(base: ModelPoint, basis, coords: np.ndarray) -> ModelPoint:
    v = sum(c * e for c, e in zip(coords, basis))
    t = float(np.linalg.norm(coords))
    if t < 1e-15:
        return base
    return ms.exp_map(base, np.asarray(v), t)


def check_2Nplus2(
    metric: FiniteMetric,
    x,
    y,
    pairs,
    kappa: float = 0.0,
    tol: float | None = None,
    restarts: int = 8,
    seed: int = 0,
):
    """Chain comparison through points on the diagonals of glued model simplices.

    Builds per-simplex realizations, minimizes the chain length over the
    diagonal parameters, and reports the slack over d(x, y).
    """
    if tol is None:
        tol = default_tol(metric)
    ix, iy = metric.index(x), metric.index(y)
    idx_pairs = [(metric.index(p), metric.index(q)) for p, q in pairs]
    n = len(idx_pairs)
    if n == 0:
        raise ValueError("need at least one pair")
    d = metric.d
    pw = ms.pomega(kappa)

    def _triple_ok(i, j, k):
        return kappa <= 0 or d[i, j] + d[j, k] + d[k, i] < 2.0 * pw - 1e-12

    p1, q1 = idx_pairs[0]
    pn, qn = idx_pairs[-1]
    end_triples = [(ix, p1, q1), (iy, pn, qn)]
    quad_triples = []
    for (pi, qi), (pj, qj) in zip(idx_pairs, idx_pairs[1:]):
        quad_triples.extend(itertools.combinations((pi, qi, pj, qj), 3))
    if any(not _triple_ok(*t) for t in end_triples + quad_triples):
        return ChainResult(UNDEF, None, None, None, None, None, kappa)

    def _triangle_leg(apex, p, q):
        """Function t -> distance from the apex to the point at parameter t on
        the realized segment [p q]."""
        if lengths_by_index[(p, q)] <= 1e-15:
            val = d[apex, p]
            return lambda t: val
        tri = ms.model_triangle(d[apex, p], d[p, q], d[q, apex], kappa)
        if tri is UNDEFINED:
            return None
        ang = ms.model_angle(d[apex, p], d[p, q], d[apex, q], kappa) if d[apex, p] > 0 else 0.0
        if ang is UNDEFINED:
            return None
        ap = d[apex, p]
        L = d[p, q]

        def leg(t):
            if ap <= 0:
                return t * L
            return ms.side_from_sas(ap, t * L, ang, kappa)

        return leg

    lengths_by_index = {pq: d[pq[0], pq[1]] for pq in idx_pairs}

    leg_x = _triangle_leg(ix, p1, q1)
    leg_y_rev = _triangle_leg(iy, pn, qn)
    if leg_x is None or leg_y_rev is None:
        return ChainResult(UNDEF, None, None, None, None, None, kappa)

    # per-simplex realizations give the middle chain terms
    mid_terms = []
    simplex_configs = []
    for k in range(n - 1):
        pi, qi = idx_pairs[k]
        pj, qj = idx_pairs[k + 1]
        quad = [pi, qi, pj, qj]
        dm = np.array([[d[a, b] for b in quad] for a in quad])
        config = ms.embed_simplex(dm, kappa)
        if config is ms.INFEASIBLE:
            raise SimplexInfeasibleError(
                f"quadruple {tuple(metric.labels[i] for i in quad)} is not realizable"
            )
        simplex_configs.append(config)
        pa, qa, pb, qb = config.points
        La, Lb = d[pi, qi], d[pj, qj]

        def term(t_a, t_b, pa=pa, qa=qa, pb=pb, qb=qb, La=La, Lb=Lb):
            za = pa if La <= 1e-15 else ms.geodesic_eval(pa, qa, t_a * La, kappa)
            zb = pb if Lb <= 1e-15 else ms.geodesic_eval(pb, qb, t_b * Lb, kappa)
            return ms.dist(za, zb, kappa)

        mid_terms.append(term)

    def chain(tvec):
        total = leg_x(tvec[0])
        for k, term in enumerate(mid_terms):
            total += term(tvec[k], tvec[k + 1])
        total += leg_y_rev(tvec[-1])
        return total

    rng = np.random.default_rng(seed)
    starts = [np.full(n, 0.5)]
    for _ in range(restarts):
        starts.append(rng.uniform(0.0, 1.0, size=n))
    best_val, best_t = math.inf, None
    for t0 in starts:
        res = minimize(
            chain, t0, method="L-BFGS-B", bounds=[(0.0, 1.0)] * n,
            options={"maxiter": 200},
        )
        if res.fun < best_val:
            best_val, best_t = float(res.fun), np.clip(res.x, 0.0, 1.0)
        if kappa <= 0:
            break  # convex objective: one start suffices

    defect = best_val - d[ix, iy]
    verdict = PASS if defect >= -tol else FAIL
    witness, z_points = _glue_chain(
        metric, ix, iy, idx_pairs, simplex_configs, best_t, kappa
    )
    return ChainResult(verdict, defect, best_val, best_t, witness, z_points, kappa)


def _glue_chain(metric, ix, iy, idx_pairs, simplex_configs, tvec, kappa):
    """Glued witness configuration in the 3-dimensional model space."""
    d = metric.d
    chart = ms.chart_for(kappa)
    s = ms.length_scale(kappa)
    n = len(idx_pairs)

    def lift(p2: np.ndarray) -> ModelPoint:
        # lift a 2-dim chart point into the 3-dim chart
        c = p2.coords
        if chart == ms.FLAT:
            return ModelPoint(np.array([c[0], c[1], 0.0]), chart)
        return ModelPoint(np.array([c[0], c[1], 0.0, c[2]]), chart)

    placed = {}
    p1, q1 = idx_pairs[0]
    tri0 = ms.model_triangle(d[ix, p1], d[p1, q1], d[q1, ix], kappa)
    if tri0 is UNDEFINED:
        return None, None
    cfg0 = ms.realize_triangle(tri0)
    x_t, p_t, q_t = (lift(pt) for pt in cfg0.points)
    placed[("x",)] = x_t
    placed[(0, "p")] = p_t
    placed[(0, "q")] = q_t

    def align(a_loc, b_loc, a_tgt, b_tgt, others, anchor):
        """Map `others` from the local simplex frame onto the placed pair.

        Gluing along [a b] leaves a rotation about that axis free; spend it by
        turning the off-axis component of the images' midpoint directly away
        from `anchor`, which unfolds the chain.
        """
        if ms.chart_dist(a_loc, b_loc) < 1e-14:
            # degenerate pair: translate by matching the single point
            out = []
            for w in others:
                v = ms.log_map(a_loc, w)
                basis_l = _frame(a_loc, _any_unit(a_loc))
                coords = _coords_in(a_loc, v, basis_l)
                basis_t = _frame(a_tgt, _any_unit(a_tgt))
                out.append(_place_by_normal_coords(a_tgt, basis_t, coords))
            return out
        e1l = ms.log_map(a_loc, b_loc)
        e1l = e1l / ms.tangent_norm(a_loc, e1l)
        basis_l = _frame(a_loc, e1l)
        e1t = ms.log_map(a_tgt, b_tgt)
        e1t = e1t / ms.tangent_norm(a_tgt, e1t)
        basis_t = _frame(a_tgt, e1t)
        coords = [
            _coords_in(a_loc, ms.log_map(a_loc, w), basis_l) for w in others
        ]
        if len(others) == 1:
            mid_loc = others[0]
        else:
            mid_loc = midpoint(others[0], others[1])
        cm = _coords_in(a_loc, ms.log_map(a_loc, mid_loc), basis_l)
        ca = _coords_in(a_tgt, ms.log_map(a_tgt, anchor), basis_t)
        phi_m = math.atan2(cm[2], cm[1]) if len(cm) >= 3 else 0.0
        phi_a = math.atan2(ca[2], ca[1]) if len(ca) >= 3 else 0.0
        if math.hypot(*ca[1:3]) < 1e-12:
            theta = -phi_m  # anchor on the axis: just planarize
        else:
            theta = (phi_a + math.pi) - phi_m
        ct, st = math.cos(theta), math.sin(theta)
        out = []
        for c in coords:
            c2 = c[1] * ct - c[2] * st
            c3 = c[1] * st + c[2] * ct
            out.append(
                _place_by_normal_coords(a_tgt, basis_t, np.array([c[0], c2, c3]))
            )
        return out

    def _any_unit(base):
        return np.asarray(ms.tangent_basis(base)[0])

    def _coords_in(base, v, basis):
        dot = (
            ms.minkowski_dot
            if base.chart == ms.HYPERBOLOID
            else (lambda a, b: float(np.asarray(a) @ np.asarray(b)))
        )
        return np.array([dot(v, e) for e in basis])

    def midpoint(a, b):
        L = ms.chart_dist(a, b)
        return a if L <= 1e-14 else ms.geodesic_eval(a, b, 0.5 * L)

    anchor = placed[("x",)]
    for k, config in enumerate(simplex_configs):
        pa, qa, pb, qb = (
            lift(pt) if len(pt.coords) < len(x_t.coords) else pt for pt in config.points
        )
        a_tgt, b_tgt = placed[(k, "p")], placed[(k, "q")]
        placed[(k + 1, "p")], placed[(k + 1, "q")] = align(
            pa, qa, a_tgt, b_tgt, [pb, qb], anchor
        )
        anchor = midpoint(a_tgt, b_tgt)

    pn, qn = idx_pairs[-1]
    trin = ms.model_triangle(d[iy, pn], d[pn, qn], d[qn, iy], kappa)
    if trin is UNDEFINED:
        return None, None
    cfgn = ms.realize_triangle(trin)
    yl, pl, ql = (lift(pt) for pt in cfgn.points)
    a_tgt, b_tgt = placed[(n - 1, "p")], placed[(n - 1, "q")]
    placed[("y",)] = align(pl, ql, a_tgt, b_tgt, [yl], anchor)[0]

    pts = [placed[("x",)]]
    z_points = []
    for k in range(n):
        pk, qk = placed[(k, "p")], placed[(k, "q")]
        L = ms.chart_dist(pk, qk)
        z = pk if L <= 1e-14 else ms.geodesic_eval(pk, qk, float(tvec[k]) * L)
        z_points.append(z)
        pts.extend([pk, qk])
    pts.append(placed[("y",)])
    return ModelConfig(tuple(pts), Curvature(kappa)), tuple(z_points)


# ---------------------------------------------------------------------------
# Overlap criterion for three triangles hung on a common triangle

@dataclass
class OverlapResult:
    verdict: str
    angle_sum: float | None
    overlaps: dict | None
    reason: str | None = None

    @property
    def any_overlap(self):
        return None if self.overlaps is None else any(self.overlaps.values())

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "angle_sum": self.angle_sum,
            "overlaps": None
            if self.overlaps is None
            else {f"{i}{j}": v for (i, j), v in self.overlaps.items()},
            "reason": self.reason,
        }


def overlap_check(sides, apex_dists, kappa: float = 0.0, tol: float = 1e-7):
    """Overlap verdicts for the three apex triangles hung on a base triangle.

    `sides[k]` is the base side opposite vertex k; `apex_dists[k]` is the
    common distance from the two admissible apexes to vertex k (a pair per
    apex is also accepted and checked for consistency).  Instances failing
    the check's hypotheses are REJECTED, not judged.
    """
    sides = [float(v) for v in sides]
    apex = _collapse_apex(apex_dists, tol)
    if apex is None:
        return OverlapResult(REJECTED, None, None, "inconsistent apex distance pairs")
    s = ms.length_scale(kappa)
    try:
        tri = ms.model_triangle(sides[2], sides[0], sides[1], kappa)
    except ValueError as e:
        return OverlapResult(REJECTED, None, None, str(e))
    if tri is UNDEFINED:
        return OverlapResult(REJECTED, None, None, "base triangle undefined")
    cfg = ms.realize_triangle(tri)
    xs = list(cfg.points)  # x1, x2, x3 with |x1x2|=sides[2], |x2x3|=sides[0], |x3x1|=sides[1]

    ps = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        # place apex i at distance apex[j] from x_j and apex[k] from x_k
        side_jk = ms.chart_dist(xs[j], xs[k]) / s
        try:
            beta = ms.model_angle(side_jk, apex[j], apex[k], kappa)
        except ValueError:
            return OverlapResult(REJECTED, None, None, "apex triangle degenerate")
        if beta is UNDEFINED:
            return OverlapResult(REJECTED, None, None, "apex placement undefined")
        e1 = ms.log_map(xs[j], xs[k])
        e1 = e1 / ms.tangent_norm(xs[j], e1)
        basis = _frame(xs[j], e1)
        best = None
        hs = ms.side_halfspace(xs[j], xs[k], xs[i])
        for sgn in (1.0, -1.0):
            v = math.cos(beta) * basis[0] + sgn * math.sin(beta) * basis[1]
            cand = ms.exp_map(xs[j], np.asarray(v), apex[j] * s)
            val = hs.side_value(cand)
            if best is None or val > best[1]:
                best = (cand, val)
        p_i, side_val = best
        if side_val < tol:
            return OverlapResult(REJECTED, None, None, f"apex {i} not strictly inside its halfspace")
        ps.append(p_i)

    # hypothesis (iii): hinge angle sums at each base vertex strictly below pi
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        a1 = _vertex_hinge(xs[i], xs[j], ps[k])
        a2 = _vertex_hinge(xs[i], ps[j], xs[k])
        if a1 + a2 >= math.pi - tol:
            return OverlapResult(REJECTED, None, None, f"hinge condition fails at base vertex {i}")

    angle_sum = sum(
        _vertex_hinge(ps[i], xs[(i + 1) % 3], xs[(i + 2) % 3]) for i in range(3)
    )

    overlaps = {}
    for a, b in itertools.combinations(range(3), 2):
        k = 3 - a - b
        overlaps[(a, b)] = _pair_overlaps(xs, ps, a, b, k)
    return OverlapResult(PASS, angle_sum, overlaps)


def _collapse_apex(apex_dists, tol):
    apex = []
    vals = list(apex_dists)
    if len(vals) == 3 and all(np.isscalar(v) or isinstance(v, float) for v in vals):
        return [float(v) for v in vals]
    # pairs form: entry i is (dist to x_{i+1}, dist to x_{i+2})
    by_vertex = {0: [], 1: [], 2: []}
    for i, pair in enumerate(vals):
        a, b = pair
        by_vertex[(i + 1) % 3].append(float(a))
        by_vertex[(i + 2) % 3].append(float(b))
    for k in range(3):
        lo, hi = min(by_vertex[k]), max(by_vertex[k])
        if hi - lo > tol * (1.0 + hi):
            return None
        apex.append(0.5 * (lo + hi))
    return apex


def _vertex_hinge(base, u, v):
    lu = ms.log_map(base, u)
    lv = ms.log_map(base, v)
    dot = (
        ms.minkowski_dot
        if base.chart == ms.HYPERBOLOID
        else (lambda a, b: float(np.asarray(a) @ np.asarray(b)))
    )
    nu = math.sqrt(max(dot(lu, lu), 0.0))
    nv = math.sqrt(max(dot(lv, lv), 0.0))
    c = dot(lu, lv) / (nu * nv)
    return math.acos(min(max(c, -1.0), 1.0))


def _pair_overlaps(xs, ps, a, b, k):
    """Rotation criterion at the shared base vertex x_k for apex triangles a, b."""
    base = xs[k]
    e1 = np.asarray(_frame(base, _unit_log(base, xs[(k + 1) % 3]))[0])
    basis = _frame(base, e1)
    va = _coords2(base, ms.log_map(base, ps[a]), basis)
    vb = _coords2(base, ms.log_map(base, ps[b]), basis)
    theta = math.atan2(vb[1], vb[0]) - math.atan2(va[1], va[0])
    w = _coords2(base, ms.log_map(base, xs[b]), basis)
    ct, st = math.cos(theta), math.sin(theta)
    w_rot = np.array([ct * w[0] - st * w[1], st * w[0] + ct * w[1]])
    moved = _place_by_normal_coords(base, basis, w_rot)
    # the hulls meet beyond the shared vertex exactly when the rotation fails
    # to bring the far vertices strictly closer
    return not ms.chart_dist(moved, xs[a]) < ms.chart_dist(xs[b], xs[a])


def _unit_log(base, target):
    v = ms.log_map(base, target)
    return v / ms.tangent_norm(base, v)


def _coords2(base, v, basis):
    dot = (
        ms.minkowski_dot
        if base.chart == ms.HYPERBOLOID
        else (lambda a, b: float(np.asarray(a) @ np.asarray(b)))
    )
    return np.array([dot(v, basis[0]), dot(v, basis[1])])
