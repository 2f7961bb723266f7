import math

import numpy as np
import pytest

import curvcomp.model_spaces as ms
from curvcomp import barycentric as bc


def flat(*c):
    return ms.ModelPoint(np.array(c, dtype=float), ms.FLAT)


def sphere_pt(*c):
    v = np.array(c, dtype=float)
    return ms.ModelPoint(v / np.linalg.norm(v), ms.SPHERE)


def hyp_pt(rng, dim=2, spread=1.0):
    base = ms.origin(ms.HYPERBOLOID, dim)
    v = ms.project_to_tangent(base, rng.standard_normal(dim + 1))
    return ms.exp_map(base, v, rng.uniform(0.1, spread))


class TestWeightVector:
    def test_renormalizes(self):
        w = bc.WeightVector(np.array([2.0, 2.0]))
        assert np.allclose(w.x, [0.5, 0.5])

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            bc.WeightVector(np.array([1.0, -0.5]))

    def test_rejects_zero_sum(self):
        with pytest.raises(ValueError):
            bc.WeightVector(np.array([0.0, 0.0]))


class TestFunctionArray:
    def test_cosh_rejected_off_hyperboloid(self):
        with pytest.raises(ValueError):
            bc.FunctionArray((flat(0, 0),), bc.COSH_DIST)

    def test_mixed_charts_rejected(self):
        with pytest.raises(ValueError):
            bc.FunctionArray((flat(0, 0), sphere_pt(1, 0)))

    def test_midpoint_convexity_spot_check(self):
        # each member is lam-convex along geodesics
        rng = np.random.default_rng(1)
        anchors = tuple(hyp_pt(rng) for _ in range(3))
        for form, lam in ((bc.HALF_SQUARED_DIST, 1.0), (bc.COSH_DIST, 1.0)):
            fa = bc.FunctionArray(anchors, form, lam)
            for _ in range(20):
                a, b = hyp_pt(rng), hyp_pt(rng)
                L = ms.chart_dist(a, b)
                mid = ms.geodesic_eval(a, b, 0.5 * L)
                lhs = fa.values(mid)
                rhs = (
                    0.5 * fa.values(a)
                    + 0.5 * fa.values(b)
                    - lam * L**2 / 8.0
                )
                assert np.all(lhs <= rhs + 1e-9)


class TestArgmin:
    def test_single_anchor(self):
        a = flat(0.3, -0.7)
        fa = bc.FunctionArray((a,))
        res = bc.argmin_strongly_convex(fa, np.array([1.0]))
        assert np.allclose(res.coords, a.coords, atol=1e-9)

    def test_flat_equal_weights(self):
        fa = bc.FunctionArray((flat(0, 0), flat(1, 0), flat(0, 1)))
        res = bc.argmin_strongly_convex(fa, np.ones(3))
        assert np.allclose(res.coords, [1 / 3, 1 / 3], atol=1e-9)

    def test_sphere_midpoint(self):
        a, b = sphere_pt(1, 0, 0), sphere_pt(0, 1, 0)
        fa = bc.FunctionArray((a, b))
        res = bc.argmin_strongly_convex(fa, np.array([0.5, 0.5]))
        expect = np.array([1.0, 1.0, 0.0]) / math.sqrt(2)
        assert np.allclose(res.coords, expect, atol=1e-8)

    def test_start_independence(self):
        rng = np.random.default_rng(2)
        anchors = tuple(flat(*rng.standard_normal(3)) for _ in range(4))
        fa = bc.FunctionArray(anchors)
        w = rng.uniform(0.1, 1.0, 4)
        r1 = bc.argmin_strongly_convex(fa, w, start=anchors[0])
        r2 = bc.argmin_strongly_convex(fa, w, start=flat(5.0, -5.0, 5.0))
        assert np.allclose(r1.coords, r2.coords, atol=1e-8)

    def test_cosh_form_midpoint(self):
        rng = np.random.default_rng(3)
        a, b = hyp_pt(rng), hyp_pt(rng)
        fa = bc.FunctionArray((a, b), bc.COSH_DIST)
        res = bc.argmin_strongly_convex(fa, np.array([0.5, 0.5]))
        L = ms.chart_dist(a, b)
        mid = ms.geodesic_eval(a, b, 0.5 * L)
        assert ms.chart_dist(res, mid) < 1e-7


class TestBarySimplex:
    def test_matches_flat_weighted_average(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            raw = rng.standard_normal((4, 3))
            w = rng.uniform(0.05, 1.0, 4)
            w = w / w.sum()
            fa = bc.FunctionArray(tuple(flat(*row) for row in raw))
            res = bc.bary_simplex(fa, bc.WeightVector(w))
            assert np.max(np.abs(res.coords - w @ raw)) < 1e-9

    def test_vertex_weight(self):
        rng = np.random.default_rng(5)
        raw = rng.standard_normal((3, 2))
        fa = bc.FunctionArray(tuple(flat(*row) for row in raw))
        res = bc.bary_simplex(fa, bc.WeightVector(np.array([0.0, 1.0, 0.0])))
        assert np.allclose(res.coords, raw[1], atol=1e-9)

    def test_face_restriction(self):
        rng = np.random.default_rng(6)
        raw = rng.standard_normal((4, 2))
        anchors = tuple(flat(*row) for row in raw)
        fa = bc.FunctionArray(anchors)
        w = np.array([0.3, 0.0, 0.5, 0.2])
        full = bc.bary_simplex(fa, bc.WeightVector(w))
        sub = bc.FunctionArray((anchors[0], anchors[2], anchors[3]))
        reduced = bc.bary_simplex(sub, bc.WeightVector(np.array([0.3, 0.5, 0.2])))
        assert np.allclose(full.coords, reduced.coords, atol=1e-8)

    def test_sphere_ball_membership(self):
        rng = np.random.default_rng(7)
        center = sphere_pt(0, 0, 1)
        for _ in range(20):
            anchors = []
            for _ in range(3):
                v = ms.project_to_tangent(center, rng.standard_normal(3))
                anchors.append(ms.exp_map(center, v, rng.uniform(0.0, math.pi / 4)))
            w = rng.uniform(0.1, 1.0, 3)
            fa = bc.FunctionArray(tuple(anchors))
            res = bc.bary_simplex(fa, bc.WeightVector(w))
            rad = max(ms.chart_dist(center, a) for a in anchors)
            assert ms.chart_dist(center, res) <= rad + 1e-8

    def test_lipschitz_ratio_bounded(self):
        rng = np.random.default_rng(8)
        raw = rng.standard_normal((4, 3))
        fa = bc.FunctionArray(tuple(flat(*row) for row in raw))
        ratios = []
        for _ in range(200):
            x = rng.uniform(0.1, 1.0, 4)
            y = x + rng.uniform(-0.05, 0.05, 4)
            y = np.clip(y, 0.05, None)
            px = bc.bary_simplex(fa, bc.WeightVector(x))
            py = bc.bary_simplex(fa, bc.WeightVector(y))
            l1 = float(np.abs(x / x.sum() - y / y.sum()).sum())
            if l1 < 1e-9:
                continue
            ratios.append(ms.chart_dist(px, py) / l1)
        # boundedness only; no reference constant exists for the ratio
        assert max(ratios) < 1e3


class TestHvArgmin:
    def test_nu_of_f_is_identity(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            raw = rng.standard_normal((3, 2))
            fa = bc.FunctionArray(tuple(flat(*row) for row in raw))
            w = rng.uniform(0.1, 1.0, 3)
            p = bc.bary_simplex(fa, bc.WeightVector(w))
            v = fa.values(p)
            nu = bc.h_v_argmin(fa, v)
            assert ms.chart_dist(nu, p) < 1e-5

    def test_two_anchor_midpoint(self):
        fa = bc.FunctionArray((flat(0.0, 0.0), flat(2.0, 0.0)))
        nu = bc.h_v_argmin(fa, np.array([100.0, 100.0]))
        assert np.allclose(nu.coords, [1.0, 0.0], atol=1e-6)

    def test_equal_offsets_identical(self):
        fa = bc.FunctionArray((flat(0, 0), flat(1, 1), flat(2, 0)))
        v = np.array([0.3, 0.1, 0.2])
        a = bc.h_v_argmin(fa, v)
        b = bc.h_v_argmin(fa, v.copy())
        assert np.allclose(a.coords, b.coords)

    def test_length_mismatch(self):
        fa = bc.FunctionArray((flat(0, 0),))
        with pytest.raises(ValueError):
            bc.h_v_argmin(fa, np.array([0.0, 1.0]))

    def test_half_inverse_bound(self):
        rng = np.random.default_rng(10)
        raw = rng.standard_normal((4, 2))
        fa = bc.FunctionArray(tuple(flat(*row) for row in raw))
        base = bc.bary_simplex(fa, bc.WeightVector(np.ones(4)))
        v0 = fa.values(base)
        for _ in range(100):
            dv = rng.uniform(-0.2, 0.2, 4)
            dw = rng.uniform(-0.2, 0.2, 4)
            nv = bc.h_v_argmin(fa, v0 + dv)
            nw = bc.h_v_argmin(fa, v0 + dw)
            gap = float(np.max(np.abs(dv - dw)))
            assert ms.chart_dist(nv, nw) ** 2 <= 2.0 * gap + 1e-8

    def test_boundary_characterization(self):
        rng = np.random.default_rng(11)
        raw = rng.standard_normal((3, 2))
        fa = bc.FunctionArray(tuple(flat(*row) for row in raw))
        p = bc.bary_simplex(fa, bc.WeightVector(rng.uniform(0.2, 1.0, 3)))
        fp = fa.values(p)
        for _ in range(100):
            q = flat(*(p.coords + 0.3 * rng.standard_normal(2)))
            assert float(np.max(fa.values(q) - fp)) >= -1e-8


class TestSupset:
    def test_domination(self):
        assert bc.supset_dominates([1.0, 2.0], [1.0, 1.5])
        assert not bc.supset_dominates([1.0, 1.0], [1.0, 1.5])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            bc.supset_dominates([1.0], [1.0, 2.0])


class TestFrechet:
    def test_flat_mean(self):
        pts = [flat(0, 0), flat(2, 0), flat(0, 2), flat(2, 2)]
        res = bc.frechet_mean(pts)
        assert np.allclose(res.coords, [1, 1], atol=1e-9)

    def test_weighted(self):
        pts = [flat(0, 0), flat(4, 0)]
        res = bc.frechet_mean(pts, weights=[3.0, 1.0])
        assert np.allclose(res.coords, [1, 0], atol=1e-9)
