"""``cope`` command line interface.

Exit codes: 0 on success, 2 on invalid input, 3 when a resource guard
(vertex enumeration size, LP bit budget) stops the computation.
"""
from __future__ import annotations

import functools
import json
import sys
import time
from pathlib import Path

import click

from . import __version__
from .engine import ennr, reduce_to_nnr, verify_model
from .field import FieldError, make_field
from .geometry import GeometryError, ResourceGuardError
from .io import (
    InputError, cope_to_json, digest, fixture_names, fixture_path, load_fixture,
    read_cope, read_matrix,
)
from .lp import LpResourceError
from .matrix import (
    CopeValidationError, Matrix, MatrixError, check_rank_separation, rank, validate_cope,
)
from .oracle import decide_nnr, min_nnr_rank3, nnr_bounds
from .svg import render_planar_svg

EXIT_INPUT = 2
EXIT_RESOURCE = 3


def _fail(msg: str, code: int):
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except CopeValidationError as exc:
            _fail(f"invalid COPE ({exc.kind}): {exc}", EXIT_INPUT)
        except (ResourceGuardError, LpResourceError) as exc:
            _fail(f"resource guard: {exc}", EXIT_RESOURCE)
        except (InputError, MatrixError, FieldError, GeometryError) as exc:
            _fail(str(exc), EXIT_INPUT)
    return wrapper


def _resolve(path: str) -> str:
    """Plain paths win; otherwise ``fixtures/NAME.json`` names a shipped fixture."""
    base, sep, key = path.partition("#")
    if Path(base).exists():
        return path
    stem = Path(base).stem
    if stem in fixture_names():
        return str(fixture_path(stem)) + sep + key
    return path


def _field(backend: str, tol: float):
    return make_field(backend, tol=tol)


def _load_cope(path: str, field, blocks: str | None = None):
    path = _resolve(path)
    if "#" in path:
        m = read_matrix(path, field)
        heights = [int(x) for x in blocks.split(",")] if blocks else [m.rows]
        return validate_cope(m, heights)
    c = read_cope(path, field)
    if blocks:
        c = validate_cope(c.data, [int(x) for x in blocks.split(",")], c.form)
    return c


def _emit(obj: dict, as_json: bool, human) -> None:
    if as_json:
        click.echo(json.dumps(obj, indent=2, sort_keys=True))
    else:
        human(obj)


backend_opt = click.option("--backend", type=click.Choice(["exact", "float"]), default="exact",
                           show_default=True, help="Scalar arithmetic.")
tol_opt = click.option("--tol", type=float, default=1e-9, show_default=True,
                       help="Zero tolerance of the float backend.")
json_opt = click.option("--json", "as_json", is_flag=True, help="Print a JSON report.")
seed_opt = click.option("--seed", type=int, default=None, help="Extra seed for heuristic restarts.")
oracle_opt = click.option("--oracle", "strategy", type=click.Choice(["auto", "exact", "heuristic"]),
                          default="auto", show_default=True, help="NNR decision strategy.")
max_k_opt = click.option("--max-k", type=int, default=None,
                         help="Largest inner dimension to scan (default r^2).")
blocks_opt = click.option("--blocks", default=None,
                          help="Measurement block heights, e.g. 2,2 (overrides the file).")


@click.group()
@click.version_option(__version__, prog_name="cope")
def main():
    """Contextuality analysis of COPE matrices."""


# ---------------------------------------------------------------------------
# analyze

def analysis_report(c, strategy="auto", max_k=None, seed=None) -> dict:
    f = c.field
    r = rank(c.data)
    bounds = nnr_bounds(c.data, strategy, seed)
    result = ennr(c, strategy, max_k, seed)
    n = c.data.cols
    sep = check_rank_separation(c.data, Matrix.identity(n, f))
    if result.value is not None:
        ctx = {"verdict": "noncontextual", "model_size": result.value}
    elif result.status == "no_model":
        ctx = {"verdict": "contextual",
               "certificate": result.fixed_rank.to_json(include_lp=False)}
    else:
        ctx = {"verdict": "undetermined"}
    nnr_exact = bounds["exact"]
    nnr_val = bounds["lower"] if nnr_exact else None
    report = {
        "input": {"digest": digest(c.data), "shape": list(c.data.shape),
                  "block_heights": list(c.block_heights)},
        "backend": f.describe(),
        "oracle": strategy,
        "rank": r,
        "nnr": {"lower": bounds["lower"], "upper": bounds["upper"], "exact": nnr_exact,
                "value": nnr_val,
                "verdict": bounds["verdict"].to_json() if bounds["verdict"] else None},
        "ennr": result.to_json(),
        "contextuality": ctx,
        "gap": (nnr_val is not None and result.value is not None and nnr_val < result.value),
        "trivial_model": {"R": "C", "E": "identity", "ranks": [sep.rank_r, sep.rank_e],
                          "rank_separated": not sep.equal_ranks},
    }
    return report


def _print_analysis(rep: dict) -> None:
    nnr = rep["nnr"]
    en = rep["ennr"]
    click.echo(f"digest      {rep['input']['digest']}  shape {rep['input']['shape']}")
    click.echo(f"backend     {rep['backend']['mode']}")
    click.echo(f"rank        {rep['rank']}")
    if nnr["exact"]:
        click.echo(f"NNR         {nnr['value']} (exact)")
    else:
        click.echo(f"NNR         between {nnr['lower']} and {nnr['upper']}")
    if en["value"] is not None:
        extra = f" (undecided at k = {en['unknown_at']})" if en["unknown_at"] else ""
        click.echo(f"ENNR        {en['value']}{extra}")
    elif en["status"] == "no_model":
        click.echo("ENNR        none: no noncontextual model exists")
    else:
        click.echo("ENNR        not found in the scanned range")
    for step in en["transcript"]:
        click.echo(f"  k={step['k']}: {step['answer']:<8} {step['method']}: {step['reason']}")
    click.echo(f"verdict     {rep['contextuality']['verdict']}")
    if rep["gap"]:
        click.echo("gap         minimal models are contextual (NNR < ENNR)")
    t = rep["trivial_model"]
    click.echo(f"trivial     (C, I) ranks {t['ranks'][0]}/{t['ranks'][1]}"
               + (" rank-separated" if t["rank_separated"] else ""))
    if "timing" in rep:
        click.echo(f"time        {rep['timing']['seconds']:.2f} s")


@main.command()
@click.argument("path")
@backend_opt
@tol_opt
@max_k_opt
@json_opt
@seed_opt
@oracle_opt
@_guarded
def analyze(path, backend, tol, max_k, as_json, seed, strategy):
    """Rank, NNR, ENNR and contextuality verdict of a COPE file."""
    f = _field(backend, tol)
    c = _load_cope(path, f)
    start = time.perf_counter()
    rep = analysis_report(c, strategy, max_k, seed)
    rep["timing"] = {"seconds": round(time.perf_counter() - start, 3)}
    _emit(rep, as_json, _print_analysis)


# ---------------------------------------------------------------------------
# verify

@main.command()
@click.argument("c_path")
@click.argument("r_path")
@click.argument("e_path")
@click.option("--noncontextual", is_flag=True, help="Also require rank C = rank R = rank E.")
@blocks_opt
@backend_opt
@tol_opt
@json_opt
@_guarded
def verify(c_path, r_path, e_path, noncontextual, blocks, backend, tol, as_json):
    """Check that R E is an ontological model of C (paths may be FILE.json#KEY)."""
    f = _field(backend, tol)
    c = _load_cope(c_path, f, blocks)
    r = read_matrix(_resolve(r_path), f)
    e = read_matrix(_resolve(e_path), f)
    if r.rows != c.data.rows:
        raise InputError(f"R ({r_path}) has {r.rows} rows but C has {c.data.rows}")
    if e.cols != c.data.cols:
        raise InputError(f"E ({e_path}) has {e.cols} columns but C has {c.data.cols}")
    if r.cols != e.rows:
        raise InputError(f"R ({r_path}) has {r.cols} columns but E ({e_path}) has {e.rows} rows")
    v = verify_model(c, r, e, noncontextual)
    _emit(v.to_json(), as_json,
          lambda o: click.echo("pass" if o["ok"] else f"fail: {o['failed_check']}: {o['message']}"))
    sys.exit(0 if v.ok else 1)


# ---------------------------------------------------------------------------
# nnr / ennr / reduce

@main.command()
@click.argument("path")
@click.option("--k", "k", type=int, default=None, help="Decide NNR <= k instead of bounding.")
@backend_opt
@tol_opt
@json_opt
@seed_opt
@oracle_opt
@_guarded
def nnr(path, k, backend, tol, as_json, seed, strategy):
    """Nonnegative rank bounds, or a yes/no/unknown answer for one k."""
    f = _field(backend, tol)
    c = _load_cope(path, f)
    if k is not None:
        v = decide_nnr(c.data, k, strategy, seed)
        _emit(v.to_json(), as_json,
              lambda o: click.echo(f"NNR <= {o['k']}: {o['answer']} ({o['method']}: {o['reason']})"))
        return
    b = nnr_bounds(c.data, strategy, seed)
    out = {"rank": b["rank"], "lower": b["lower"], "upper": b["upper"], "exact": b["exact"],
           "verdict": b["verdict"].to_json() if b["verdict"] else None}
    _emit(out, as_json, lambda o: click.echo(
        f"NNR = {o['lower']}" if o["exact"] else f"{o['lower']} <= NNR <= {o['upper']}"))


@main.command("ennr")
@click.argument("path")
@backend_opt
@tol_opt
@max_k_opt
@json_opt
@seed_opt
@oracle_opt
@_guarded
def ennr_cmd(path, backend, tol, max_k, as_json, seed, strategy):
    """Smallest size of a noncontextual model, with the scan transcript."""
    f = _field(backend, tol)
    c = _load_cope(path, f)
    res = ennr(c, strategy, max_k, seed).to_json()

    def human(o):
        click.echo(f"ENNR = {o['value']} ({o['status']})")
        for s in o["transcript"]:
            click.echo(f"  k={s['k']}: {s['answer']} ({s['method']})")
    _emit(res, as_json, human)


@main.command()
@click.argument("path")
@click.option("--k", "k", type=int, required=True, help="Target inner dimension.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None,
              help="Write the padded COPE here instead of stdout.")
@backend_opt
@tol_opt
@_guarded
def reduce(path, k, output, backend, tol):
    """Emit the padded COPE whose NNR is k iff a size-k noncontextual model exists."""
    f = _field(backend, tol)
    c = _load_cope(path, f)
    red = reduce_to_nnr(c, k)
    cope = red.as_cope(c.block_heights)
    doc = cope_to_json(cope, name=f"reduced-k{k}")
    doc["heights"] = [f.format(h) for h in red.heights]
    text = json.dumps(doc, indent=1) + "\n"
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


# ---------------------------------------------------------------------------
# render

@main.command()
@click.argument("path")
@click.option("-o", "--output", type=click.Path(dir_okay=False), required=True)
@click.option("--no-witness", is_flag=True, help="Skip the minimal nested polygon.")
@backend_opt
@tol_opt
@_guarded
def render(path, output, no_witness, backend, tol):
    """Draw inner (green), outer (black) and witness (red) polygons of a rank-3 COPE."""
    f = _field(backend, tol)
    c = _load_cope(path, f)
    r = rank(c.data)
    if r != 3:
        raise InputError(f"render needs a rank-3 COPE (planar geometry); this one has rank {r}")
    from .geometry import enumerate_vertices
    k, _, _, pic, poly = min_nnr_rank3(c.data)
    outer = enumerate_vertices(pic.outer).points()
    inner = pic.inner.points()
    witness = None if no_witness else poly.points()
    svg = render_planar_svg(inner, outer, witness, title=f"COPE {digest(c.data)}")
    Path(output).write_text(svg)
    click.echo(f"wrote {output} (witness with {k} vertices)" if witness else f"wrote {output}")


# ---------------------------------------------------------------------------
# fixtures

@main.group()
def fixtures():
    """Shipped example matrices."""


@fixtures.command("list")
def fixtures_list():
    for name in fixture_names():
        desc = load_fixture(name).get("description", "")
        click.echo(f"{name:<20} {desc}")


@fixtures.command("emit")
@click.argument("name")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@_guarded
def fixtures_emit(name, output):
    text = fixture_path(name).read_text()
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


if __name__ == "__main__":  # pragma: no cover
    main()
