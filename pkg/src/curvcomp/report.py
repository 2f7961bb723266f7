"""Run reports: a single JSON or CSV document per invocation, with optional
figure rendering of the defect landscape."""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field


@dataclass
class RunReport:
    command: str
    config: dict
    results: list = field(default_factory=list)
    exit_code: int = 0
    started: float = field(default_factory=time.monotonic)
    elapsed_ms: float | None = None

    def finish(self, exit_code: int):
        self.exit_code = exit_code
        self.elapsed_ms = (time.monotonic() - self.started) * 1000.0
        return self

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "exit": self.exit_code,
            "elapsed_ms": self.elapsed_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_plain)

    def to_csv(self) -> str:
        """Flat delimited view: one row per result record."""
        rows = []
        for res in self.results:
            flat = _flatten(res)
            rows.append(flat)
        keys = []
        for r in rows:
            for k in r:
                if k not in keys:
                    keys.append(k)
        out = io.StringIO()
        w = csv.writer(out)
        w.writerow(["command", "exit"] + keys)
        for r in rows:
            w.writerow([self.command, self.exit_code] + [r.get(k, "") for k in keys])
        return out.getvalue()

    def render(self, fmt: str = "json") -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        raise ValueError(f"unknown report format {fmt!r}")


def _plain(obj):
    try:
        import numpy as np

        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, (np.floating, np.integer)):
            return obj.item()
    except ImportError:
        pass
    return str(obj)


def _flatten(obj, prefix=""):
    flat = {}
    if isinstance(obj, dict):
        for k, v in obj.items():
            key = f"{prefix}{k}"
            if isinstance(v, dict):
                flat.update(_flatten(v, key + "."))
            elif isinstance(v, (list, tuple)):
                flat[key] = json.dumps(v, default=_plain)
            else:
                flat[key] = v
    else:
        flat[prefix or "value"] = obj
    return flat


def render_figures(report: RunReport, out_dir: str) -> list:
    """Write diagnostic figures for the report into out_dir; returns paths."""
    import os

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(out_dir, exist_ok=True)
    paths = []

    defects = []
    for res in report.results:
        if isinstance(res, dict):
            if res.get("defect") is not None:
                defects.append(float(res["defect"]))
            for rec in res.get("records", []):
                if rec.get("defect") is not None:
                    defects.append(float(rec["defect"]))
    if defects:
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.hist(defects, bins=min(40, max(5, len(defects) // 5 + 1)), color="#34688c")
        ax.axvline(0.0, color="black", linewidth=1)
        ax.set_xlabel("defect")
        ax.set_ylabel("count")
        ax.set_title(f"{report.command}: defect distribution")
        path = os.path.join(out_dir, f"{report.command}_defects.png")
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)
        paths.append(path)

    points = []
    for res in report.results:
        if isinstance(res, dict) and isinstance(res.get("point"), list):
            points.append(res["point"])
        if isinstance(res, dict) and isinstance(res.get("witness"), list):
            w = res["witness"]
            if w and isinstance(w[0], (int, float)):
                points.append(w)
    plottable = [p for p in points if len(p) in (2, 3)]
    if plottable:
        fig = plt.figure(figsize=(5, 5))
        if any(len(p) == 3 for p in plottable):
            ax = fig.add_subplot(projection="3d")
            for p in plottable:
                q = list(p) + [0.0] * (3 - len(p))
                ax.scatter(*q, color="#b04030")
        else:
            ax = fig.add_subplot()
            for p in plottable:
                ax.scatter(p[0], p[1], color="#b04030")
            ax.set_aspect("equal")
        ax.set_title(f"{report.command}: solution points")
        path = os.path.join(out_dir, f"{report.command}_points.png")
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)
        paths.append(path)
    return paths
