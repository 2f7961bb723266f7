"""Command-line front door: ingest documents, run checks and solvers, emit
one report per invocation.

Exit codes: 0 when every tuple passes / the instance is feasible, 1 when
something fails or is left unknown, 2 on input errors.
"""

from __future__ import annotations

import json
import math
import sys

import click
import numpy as np

from . import comparisons as cp
from . import convexity as cv
from . import documents as docs
from . import extension as ex
from . import fixtures as fx
from . import model_spaces as ms
from . import barycentric as bc
from .report import RunReport, render_figures

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _emit(report: RunReport, out: str | None, fmt: str, figures: str | None):
    text = report.render(fmt)
    if figures:
        report.config["figures"] = render_figures(report, figures)
        text = report.render(fmt)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


def _config(**kw) -> dict:
    return {k: v for k, v in kw.items() if v is not None}


def run_options(fn):
    fn = click.option("--kappa", type=float, default=0.0, show_default=True,
                      help="Curvature of the model space.")(fn)
    fn = click.option("--tol", type=float, default=None,
                      help="Verdict tolerance (defaults scale with the data).")(fn)
    fn = click.option("--seed", type=int, default=0, show_default=True)(fn)
    fn = click.option("--restarts", type=int, default=None,
                      help="Multistart count for the searching solvers.")(fn)
    fn = click.option("--max-iter", type=int, default=None)(fn)
    fn = click.option("--out", type=click.Path(), default=None,
                      help="Write the report here instead of stdout.")(fn)
    fn = click.option("--format", "fmt", type=click.Choice(["json", "csv"]),
                      default="json", show_default=True)(fn)
    fn = click.option("--figures", type=click.Path(), default=None,
                      help="Directory for diagnostic figures.")(fn)
    return fn


@click.group()
def main():
    """Comparison geometry toolkit: curvature checks and extension solvers."""


def _load_metric(path, kappa):
    text = _read_input(path)
    doc = docs.ingest_metric(text)
    if doc.kappa is not None and kappa == 0.0:
        kappa = doc.kappa
    return doc, doc.to_finite_metric(), kappa


def _comparison_command(check_fn, name):
    @main.command(name=name)
    @click.argument("input", default="-")
    @run_options
    def cmd(input, kappa, tol, seed, restarts, max_iter, out, fmt, figures):
        try:
            doc, metric, kappa = _load_metric(input, kappa)
        except (docs.DocumentError, OSError, ValueError) as e:
            click.echo(f"input error: {e}", err=True)
            sys.exit(EXIT_INPUT)
        report = RunReport(name, _config(kappa=kappa, tol=tol, seed=seed,
                                         input=doc.name))
        res = check_fn(metric, kappa, tol)
        report.results.append(res.to_dict())
        code = EXIT_PASS if res.all_pass else EXIT_FAIL
        _emit(report.finish(code), out, fmt, figures)
        sys.exit(code)

    cmd.__doc__ = check_fn.__doc__
    return cmd


check1p3 = _comparison_command(cp.check_1plus3, "check1p3")
check2p2 = _comparison_command(cp.check_2plus2, "check2p2")


@main.command()
@click.argument("input", default="-")
@click.option("--basepoint", default=None,
              help="Run for one basepoint only (default: the document's, else all).")
@run_options
def check1pn(input, basepoint, kappa, tol, seed, restarts, max_iter, out, fmt, figures):
    """Existential basepoint comparison (witness search)."""
    try:
        doc, metric, kappa = _load_metric(input, kappa)
    except (docs.DocumentError, OSError, ValueError) as e:
        click.echo(f"input error: {e}", err=True)
        sys.exit(EXIT_INPUT)
    bases = [basepoint] if basepoint else (
        [doc.basepoint] if doc.basepoint else list(metric.labels)
    )
    report = RunReport("check1pn", _config(kappa=kappa, tol=tol, seed=seed,
                                           restarts=restarts, input=doc.name))
    ok = True
    for b in bases:
        res = cp.check_1plusN(
            metric, b, kappa, tol,
            restarts=restarts if restarts is not None else 32,
            seed=seed,
            max_iter=max_iter if max_iter is not None else 200,
        )
        report.results.append(res.to_dict(metric.labels))
        ok = ok and res.verdict == cp.PASS
    code = EXIT_PASS if ok else EXIT_FAIL
    _emit(report.finish(code), out, fmt, figures)
    sys.exit(code)


@main.command()
@click.argument("input", default="-")
@click.option("--x", "x_label", required=True)
@click.option("--y", "y_label", required=True)
@click.option("--pairs", required=True,
              help="Comma-separated pairs 'p1:q1,p2:q2,...'.")
@run_options
def check2n2(input, x_label, y_label, pairs, kappa, tol, seed, restarts, max_iter,
             out, fmt, figures):
    """Chain comparison through glued model simplices."""
    try:
        doc, metric, kappa = _load_metric(input, kappa)
        pair_list = []
        for chunk in pairs.split(","):
            p, q = chunk.split(":")
            pair_list.append((p.strip(), q.strip()))
    except (docs.DocumentError, OSError, ValueError) as e:
        click.echo(f"input error: {e}", err=True)
        sys.exit(EXIT_INPUT)
    report = RunReport("check2n2", _config(kappa=kappa, tol=tol, seed=seed,
                                           input=doc.name))
    try:
        res = cp.check_2Nplus2(
            metric, x_label, y_label, pair_list, kappa, tol,
            restarts=restarts if restarts is not None else 8, seed=seed,
        )
    except (cp.SimplexInfeasibleError, ValueError) as e:
        click.echo(f"input error: {e}", err=True)
        sys.exit(EXIT_INPUT)
    report.results.append(res.to_dict())
    code = EXIT_PASS if res.verdict in (cp.PASS, cp.UNDEF) else EXIT_FAIL
    _emit(report.finish(code), out, fmt, figures)
    sys.exit(code)


@main.command()
@click.argument("input", default="-")
@run_options
def extend(input, kappa, tol, seed, restarts, max_iter, out, fmt, figures):
    """Extend a partial short map point by point."""
    try:
        f = docs.map_from_json(_read_input(input))
    except (docs.DocumentError, OSError, ValueError) as e:
        click.echo(f"input error: {e}", err=True)
        sys.exit(EXIT_INPUT)
    report = RunReport("extend", _config(kappa=f.kappa, tol=tol, seed=seed))
    rep = ex.extend_map(f, seed=seed, tol=tol)
    report.results.append(rep.to_dict())
    code = EXIT_PASS if rep.success else EXIT_FAIL
    _emit(report.finish(code), out, fmt, figures)
    sys.exit(code)


@main.command()
@click.option("--sides", required=True, help="Triangle side lengths 'a,b,c'.")
@click.option("--radii", required=True, help="Distances from the fourth point 'r1,r2,r3'.")
@click.option("--direction", type=click.Choice([ex.CBB_STYLE, ex.CAT_STYLE]),
              default=ex.CBB_STYLE, show_default=True)
@run_options
def fourpoint(sides, radii, direction, kappa, tol, seed, restarts, max_iter,
              out, fmt, figures):
    """Four-point extension decision over a realized triangle."""
    try:
        side_vals = [float(v) for v in sides.split(",")]
        radii_vals = [float(v) for v in radii.split(",")]
        if len(side_vals) != 3 or len(radii_vals) != 3:
            raise ValueError("need exactly three sides and three radii")
    except ValueError as e:
        click.echo(f"input error: {e}", err=True)
        sys.exit(EXIT_INPUT)
    report = RunReport("fourpoint", _config(kappa=kappa, tol=tol, seed=seed,
                                            direction=direction))
    try:
        res = ex.four_point_decision(side_vals, radii_vals, kappa, direction, seed=seed)
    except ValueError as e:
        click.echo(f"input error: {e}", err=True)
        sys.exit(EXIT_INPUT)
    report.results.append(res.to_dict())
    code = EXIT_PASS if res.feasible else EXIT_FAIL
    _emit(report.finish(code), out, fmt, figures)
    sys.exit(code)


@main.command()
@click.argument("input", default="-")
@run_options
def cheb(input, kappa, tol, seed, restarts, max_iter, out, fmt, figures):
    """Minimax extension solve for an instance document."""
    try:
        inst = docs.instance_from_json(_read_input(input))
    except (docs.DocumentError, OSError) as e:
        click.echo(f"input error: {e}", err=True)
        sys.exit(EXIT_INPUT)
    report = RunReport("cheb", _config(kappa=inst.kappa, tol=tol, seed=seed,
                                       restarts=restarts))
    res = ex.chebyshev_extend(
        inst,
        restarts=restarts if restarts is not None else 4,
        seed=seed,
        max_iter=max_iter if max_iter is not None else 200,
    )
    report.results.append(res.to_dict())
    feasible = res.defect <= (tol if tol is not None else res.tol)
    code = EXIT_PASS if feasible else EXIT_FAIL
    _emit(report.finish(code), out, fmt, figures)
    sys.exit(code)


@main.command()
@click.argument("input", default="-")
@click.option("--form", type=click.Choice([bc.HALF_SQUARED_DIST, bc.COSH_DIST]),
              default=bc.HALF_SQUARED_DIST, show_default=True)
@run_options
def barycenter(input, form, kappa, tol, seed, restarts, max_iter, out, fmt, figures):
    """Barycenter of anchors for a weight vector (instance JSON with 'weights')."""
    try:
        text = _read_input(input)
        obj = json.loads(text)
        inst = docs.instance_from_json(text)
        weights = np.asarray(obj.get("weights", np.ones(inst.n)), dtype=float)
    except (docs.DocumentError, OSError, json.JSONDecodeError, ValueError) as e:
        click.echo(f"input error: {e}", err=True)
        sys.exit(EXIT_INPUT)
    report = RunReport("barycenter", _config(kappa=inst.kappa, tol=tol, seed=seed))
    try:
        fa = bc.FunctionArray(inst.targets, form)
        point = bc.bary_simplex(fa, bc.WeightVector(weights))
    except (ValueError, bc.IterationCapError) as e:
        click.echo(f"input error: {e}", err=True)
        sys.exit(EXIT_INPUT)
    report.results.append({
        "point": [float(v) for v in point.coords],
        "weights": [float(v) for v in bc.WeightVector(weights).x],
    })
    _emit(report.finish(EXIT_PASS), out, fmt, figures)
    sys.exit(EXIT_PASS)


@main.command()
@click.argument("input", default="-")
@click.option("--point", "point_str", required=True,
              help="Comma-separated chart coordinates of the point to project.")
@run_options
def project(input, point_str, kappa, tol, seed, restarts, max_iter, out, fmt, figures):
    """Closest point of a ball intersection (instance JSON as the ball system)."""
    try:
        bs = docs.ball_system_from_json(_read_input(input))
        coords = np.array([float(v) for v in point_str.split(",")])
        p = ms.ModelPoint(coords, ms.chart_for(bs.kappa))
        p.validate()
    except (docs.DocumentError, OSError, ValueError) as e:
        click.echo(f"input error: {e}", err=True)
        sys.exit(EXIT_INPUT)
    report = RunReport("project", _config(kappa=bs.kappa, tol=tol, seed=seed))
    res = cv.closest_point(bs, p, tol=tol, seed=seed)
    if res is cv.EMPTY:
        report.results.append({"empty": True})
        code = EXIT_FAIL
    else:
        report.results.append(res.to_dict())
        code = EXIT_PASS
    _emit(report.finish(code), out, fmt, figures)
    sys.exit(code)


@main.command()
@click.argument("input", default="-")
@run_options
def helly(input, kappa, tol, seed, restarts, max_iter, out, fmt, figures):
    """Common point of a ball system, or an empty-intersection witness."""
    try:
        bs = docs.ball_system_from_json(_read_input(input))
    except (docs.DocumentError, OSError) as e:
        click.echo(f"input error: {e}", err=True)
        sys.exit(EXIT_INPUT)
    report = RunReport("helly", _config(kappa=bs.kappa, tol=tol, seed=seed))
    res = cv.helly_witness(bs, tol=tol, seed=seed)
    report.results.append(res.to_dict())
    code = EXIT_PASS if res.feasible else EXIT_FAIL
    _emit(report.finish(code), out, fmt, figures)
    sys.exit(code)


@main.command()
@click.argument("name")
@click.option("--n", type=int, default=None, help="Point count where applicable.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None)
def fixture(name, n, seed, out):
    """Emit a built-in fixture document (pipe into the check commands)."""
    params = {}
    if name in ("hemisphere", "sphere-sample", "tree-sample") and n is not None:
        params["n"] = n
    if name in ("sphere-sample", "tree-sample"):
        params["seed"] = seed
    try:
        obj = fx.get_fixture(name, **params)
    except (ValueError, TypeError) as e:
        click.echo(f"input error: {e}", err=True)
        sys.exit(EXIT_INPUT)
    if isinstance(obj, ex.PartialShortMap):
        text = docs.map_to_json(obj, name=name)
    else:
        text = obj.to_json()
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)
    sys.exit(EXIT_PASS)


if __name__ == "__main__":
    main()
