"""Built-in test configurations: small metric spaces with known behavior."""

from __future__ import annotations

import math

import numpy as np

from . import model_spaces as ms
from .comparisons import FiniteMetric
from .documents import MetricDocument
from .extension import PartialShortMap
from .model_spaces import ModelPoint

SQRT3 = math.sqrt(3.0)
SQRT7 = math.sqrt(7.0)


def sixpoint() -> MetricDocument:
    """Six-point metric that passes the basepoint comparisons at curvature 0
    yet embeds in no space with curvature bounded below.

    Labels a, b, x, y, z, q; a and b are far apart with x, y, z halfway,
    and q sits near b at carefully chosen distances.
    """
    labels = ("a", "b", "x", "y", "z", "q")
    d = np.zeros((6, 6))

    def put(i, j, v):
        d[i, j] = d[j, i] = v

    put(0, 1, 4.0)
    for k in (2, 3, 4):  # x, y, z
        put(0, k, 2.0)
        put(1, k, 2.0)
    put(2, 3, 2.0)  # xy
    put(3, 4, 1.0)  # yz
    put(2, 4, 3.0)  # xz
    put(2, 5, 1.0)  # xq
    put(1, 5, 1.0)  # qb
    put(0, 5, 3.0)  # aq
    put(3, 5, SQRT3)  # qy
    put(4, 5, SQRT7)  # qz
    return MetricDocument("sixpoint", labels, d, kappa=0.0)


def tripod() -> MetricDocument:
    """Center c with three tips at distance 1, tips mutually at distance 2."""
    labels = ("c", "a", "b", "d")
    d = np.array(
        [
            [0.0, 1.0, 1.0, 1.0],
            [1.0, 0.0, 2.0, 2.0],
            [1.0, 2.0, 0.0, 2.0],
            [1.0, 2.0, 2.0, 0.0],
        ]
    )
    return MetricDocument("tripod", labels, d, kappa=0.0)


def hemisphere(n: int = 8) -> PartialShortMap:
    """Equally spaced equator points mapped identically into the circle,
    plus a pole at distance pi/2 from all of them with no image available."""
    if n < 3:
        raise ValueError("need at least 3 equator points")
    labels = tuple(f"e{k}" for k in range(n)) + ("pole",)
    ang = [2.0 * math.pi * k / n for k in range(n)]
    d = np.zeros((n + 1, n + 1))
    for i in range(n):
        for j in range(n):
            gap = abs(ang[i] - ang[j]) % (2.0 * math.pi)
            d[i, j] = min(gap, 2.0 * math.pi - gap)
    d[:n, n] = d[n, :n] = 0.5 * math.pi
    metric = FiniteMetric(labels, d)
    assigned = {
        f"e{k}": ModelPoint(np.array([math.cos(a), math.sin(a)]), ms.SPHERE)
        for k, a in zip(range(n), ang)
    }
    center = assigned["e0"]
    return PartialShortMap(metric, assigned, 1.0, center)


def sphere_sample(n: int = 5, seed: int = 0, dim: int = 2) -> MetricDocument:
    """Great-circle distance matrix of random points on the unit sphere."""
    if n < 2:
        raise ValueError("need at least 2 points")
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((n, dim + 1))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            c = min(max(float(pts[i] @ pts[j]), -1.0), 1.0)
            d[i, j] = d[j, i] = math.acos(c)
    labels = tuple(f"s{k}" for k in range(n))
    return MetricDocument(f"sphere-sample-{n}-{seed}", labels, d, kappa=1.0)


def tree_sample(n: int = 6, seed: int = 0) -> MetricDocument:
    """Path-length metric of a random weighted tree (a CAT(0) space)."""
    if n < 2:
        raise ValueError("need at least 2 points")
    rng = np.random.default_rng(seed)
    parent = [None] + [int(rng.integers(0, k)) for k in range(1, n)]
    weight = [0.0] + [float(rng.uniform(0.5, 2.0)) for _ in range(1, n)]
    d = np.zeros((n, n))

    def path_to_root(i):
        out = []
        while i is not None:
            out.append(i)
            i = parent[i]
        return out

    for i in range(n):
        for j in range(i + 1, n):
            pi, pj = path_to_root(i), path_to_root(j)
            common = set(pi) & set(pj)
            dist = 0.0
            for k in pi:
                if k in common:
                    break
                dist += weight[k]
            for k in pj:
                if k in common:
                    break
                dist += weight[k]
            d[i, j] = d[j, i] = dist
    labels = tuple(f"t{k}" for k in range(n))
    return MetricDocument(f"tree-sample-{n}-{seed}", labels, d, kappa=0.0)


FIXTURES = {
    "sixpoint": sixpoint,
    "tripod": tripod,
    "hemisphere": hemisphere,
    "sphere-sample": sphere_sample,
    "tree-sample": tree_sample,
}


def get_fixture(name: str, **params):
    if name not in FIXTURES:
        raise ValueError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}")
    return FIXTURES[name](**params)
