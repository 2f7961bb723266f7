"""File formats: metric documents, map documents, and solver instances.

Two metric encodings are supported: a JSON object with the distance matrix,
and a CSV of squared distances (header row of labels) that is square-rooted
on ingest.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from . import model_spaces as ms
from .comparisons import FiniteMetric
from .extension import ExtensionInstance, PartialShortMap
from .convexity import BallSystem
from .model_spaces import ModelPoint


class DocumentError(ValueError):
    """Malformed or inconsistent input document."""


@dataclass(frozen=True)
class MetricDocument:
    name: str
    labels: tuple
    d: np.ndarray
    kappa: float | None = None
    basepoint: str | None = None

    def __post_init__(self):
        labels = tuple(str(l) for l in self.labels)
        d = np.asarray(self.d, dtype=float)
        n = len(labels)
        if d.shape != (n, n):
            raise DocumentError("matrix shape does not match labels")
        if np.any(~np.isfinite(d)):
            raise DocumentError("distances must be finite")
        if np.any(d < 0):
            raise DocumentError("distances must be nonnegative")
        if np.max(np.abs(d - d.T)) > 1e-12 * (1.0 + float(np.max(d))):
            raise DocumentError("matrix is not symmetric")
        if np.any(np.abs(np.diag(d)) > 1e-12):
            raise DocumentError("diagonal must be zero")
        if self.basepoint is not None and str(self.basepoint) not in labels:
            raise DocumentError(f"basepoint {self.basepoint!r} not among labels")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "d", 0.5 * (d + d.T))

    def to_finite_metric(self) -> FiniteMetric:
        d = self.d.copy()
        np.fill_diagonal(d, 0.0)
        return FiniteMetric(self.labels, d)

    def to_json(self) -> str:
        obj = {
            "name": self.name,
            "labels": list(self.labels),
            "d": [[float(v) for v in row] for row in self.d],
        }
        if self.kappa is not None:
            obj["kappa"] = self.kappa
        if self.basepoint is not None:
            obj["basepoint"] = self.basepoint
        return json.dumps(obj, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "MetricDocument":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise DocumentError(f"invalid JSON: {e}") from e
        if not isinstance(obj, dict) or "labels" not in obj or "d" not in obj:
            raise DocumentError("metric document needs 'labels' and 'd'")
        return cls(
            name=str(obj.get("name", "metric")),
            labels=tuple(obj["labels"]),
            d=np.asarray(obj["d"], dtype=float),
            kappa=obj.get("kappa"),
            basepoint=obj.get("basepoint"),
        )

    def to_decrypting_csv(self) -> str:
        """Squared-distance CSV with a label header row."""
        out = io.StringIO()
        w = csv.writer(out)
        w.writerow(self.labels)
        for row in self.d:
            w.writerow([repr(float(v * v)) for v in row])
        return out.getvalue()

    @classmethod
    def from_decrypting_csv(cls, text: str, name: str = "metric") -> "MetricDocument":
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        if len(rows) < 2:
            raise DocumentError("decrypting CSV needs a header and a body")
        labels = tuple(s.strip() for s in rows[0])
        try:
            sq = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
        except ValueError as e:
            raise DocumentError(f"non-numeric entry: {e}") from e
        if np.any(sq < 0):
            raise DocumentError("squared distances must be nonnegative")
        return cls(name=name, labels=labels, d=np.sqrt(sq))


def ingest_metric(text: str, fmt: str | None = None) -> MetricDocument:
    """Parse a metric document, sniffing JSON vs decrypting CSV when needed."""
    if fmt == "json":
        return MetricDocument.from_json(text)
    if fmt in ("csv", "decrypting-csv"):
        return MetricDocument.from_decrypting_csv(text)
    if fmt is not None:
        raise DocumentError(f"unknown metric format {fmt!r}")
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return MetricDocument.from_json(text)
    return MetricDocument.from_decrypting_csv(text)


def _point(coords, chart) -> ModelPoint:
    return ModelPoint(np.asarray(coords, dtype=float), chart)


def _expect_ambient(kappa: float, chart_dim: int) -> int:
    return chart_dim if ms.chart_for(kappa) == ms.FLAT else chart_dim + 1


def instance_from_json(text: str) -> ExtensionInstance:
    """Extension/ball instance: kappa, chart_dim, targets, radii, center?."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"invalid JSON: {e}") from e
    for key in ("kappa", "chart_dim", "targets", "radii"):
        if key not in obj:
            raise DocumentError(f"instance document needs {key!r}")
    kappa = float(obj["kappa"])
    chart = ms.chart_for(kappa)
    ambient = _expect_ambient(kappa, int(obj["chart_dim"]))
    targets = []
    for row in obj["targets"]:
        if len(row) != ambient:
            raise DocumentError(
                f"target has {len(row)} coordinates, chart needs {ambient}"
            )
        p = _point(row, chart)
        p.validate()
        targets.append(p)
    center = None
    if obj.get("center") is not None:
        center = _point(obj["center"], chart)
        center.validate()
    try:
        return ExtensionInstance(
            tuple(targets), np.asarray(obj["radii"], dtype=float), kappa, center
        )
    except ValueError as e:
        raise DocumentError(str(e)) from e


def instance_to_json(inst: ExtensionInstance) -> str:
    chart_dim = inst.dim
    obj = {
        "kappa": inst.kappa,
        "chart_dim": chart_dim,
        "targets": [[float(v) for v in t.coords] for t in inst.targets],
        "radii": [float(r) for r in inst.radii],
    }
    if inst.center is not None:
        obj["center"] = [float(v) for v in inst.center.coords]
    return json.dumps(obj, indent=2)


def ball_system_from_json(text: str) -> BallSystem:
    inst = instance_from_json(text)
    return BallSystem(inst.targets, inst.radii, inst.kappa)


def map_from_json(text: str) -> PartialShortMap:
    """Map document: a metric plus assigned images in a chart."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"invalid JSON: {e}") from e
    if "metric" not in obj or "assigned" not in obj:
        raise DocumentError("map document needs 'metric' and 'assigned'")
    doc = MetricDocument.from_json(json.dumps(obj["metric"]))
    kappa = float(obj.get("kappa", doc.kappa or 0.0))
    chart = ms.chart_for(kappa)
    assigned = {}
    for label, coords in obj["assigned"].items():
        if label not in doc.labels:
            raise DocumentError(f"assigned label {label!r} not in the metric")
        p = _point(coords, chart)
        p.validate()
        assigned[label] = p
    center = None
    if obj.get("center") is not None:
        center = _point(obj["center"], chart)
        center.validate()
    return PartialShortMap(doc.to_finite_metric(), assigned, kappa, center)


def map_to_json(f: PartialShortMap, name: str = "map") -> str:
    doc = MetricDocument(name, f.source.labels, f.source.d, f.kappa or None)
    obj = {
        "metric": json.loads(doc.to_json()),
        "assigned": {
            str(k): [float(v) for v in p.coords] for k, p in f.assigned.items()
        },
        "kappa": f.kappa,
    }
    if f.center is not None:
        obj["center"] = [float(v) for v in f.center.coords]
    return json.dumps(obj, indent=2)


def sniff_document(text: str) -> str:
    """Best-effort document kind: 'metric', 'map', 'instance', or 'csv'."""
    stripped = text.lstrip()
    if not stripped.startswith("{"):
        return "csv"
    try:
        obj = json.loads(stripped)
    except json.JSONDecodeError:
        return "csv"
    if "assigned" in obj:
        return "map"
    if "targets" in obj:
        return "instance"
    return "metric"
