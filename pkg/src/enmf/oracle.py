"""Nonnegative-rank decision strategies.

``decide_nnr`` answers "does ``C`` have an NMF of inner dimension ``k``?"
with ``yes`` (and a verified witness), ``no`` (only from exact reasoning),
or ``unknown``.  Rank-3 inputs are decided exactly through the planar
nested-polygon picture; other inputs fall back on a restarted HALS search
that can only ever produce witnesses.
"""
from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field as dc_field

import numpy as np

from .field import make_field
from .geometry import HPolytope, VPolytope, enumerate_vertices
from .io import digest, matrix_rows_text
from .lp import find_nonnegative_solution
from .matrix import Matrix, MatrixError, rank, rank_factorize, validate_cope
from .nested2d import min_nested_polygon_2d

__all__ = [
    "NnrVerdict",
    "PlanarPicture",
    "planar_picture",
    "nnr_bounds",
    "nnr_exact_rank3",
    "min_nnr_rank3",
    "nnr_heuristic",
    "nnr_trivial",
    "decide_nnr",
    "is_stable_nmf",
    "lexicographic_before",
    "first_admissible_subset",
    "StabilityCapError",
    "HEURISTIC_RESTARTS",
    "HEURISTIC_ITERATIONS",
    "HEURISTIC_TOLERANCE",
    "STABILITY_CAP",
]

HEURISTIC_RESTARTS = 64
HEURISTIC_ITERATIONS = 5000
HEURISTIC_TOLERANCE = 1e-8
STABILITY_CAP = 12

YES, NO, UNKNOWN = "yes", "no", "unknown"


@dataclass
class NnrVerdict:
    digest: str
    k: int
    answer: str
    method: str
    reason: str = ""
    r_factor: Matrix | None = None
    e_factor: Matrix | None = None
    exact: bool = True
    restarts: int | None = None
    best_residual: float | None = None
    extra: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"digest": self.digest, "k": self.k, "answer": self.answer,
               "method": self.method, "reason": self.reason, "exact": self.exact}
        if self.r_factor is not None:
            out["witness"] = {"R": matrix_rows_text(self.r_factor),
                              "E": matrix_rows_text(self.e_factor)}
        if self.restarts is not None:
            out["restarts"] = self.restarts
        if self.best_residual is not None:
            out["best_residual"] = float(f"{self.best_residual:.3e}")
        out.update(self.extra)
        return out


def _check_nonnegative(c: Matrix) -> None:
    if not c.is_nonnegative():
        raise MatrixError("nonnegative rank needs a nonnegative matrix")


def _verify_witness(c: Matrix, r: Matrix, e: Matrix) -> bool:
    return r.is_nonnegative() and e.is_nonnegative() and (r @ e) == c


def _pad(r: Matrix, e: Matrix, k: int) -> tuple[Matrix, Matrix]:
    """Append zero columns/rows so the inner dimension becomes ``k``."""
    extra = k - r.cols
    if extra <= 0:
        return r, e
    f = r.field
    return (Matrix.hstack([r, Matrix.zeros(r.rows, extra, f)]),
            Matrix.vstack([e, Matrix.zeros(extra, e.cols, f)]))


# ---------------------------------------------------------------------------
# trivial and low-rank paths

def nnr_trivial(c: Matrix, k: int) -> NnrVerdict | None:
    """``C = C I`` or ``C = I C`` when ``k`` reaches a dimension of ``C``."""
    f = c.field
    m, n = c.shape
    if n <= k:
        r, e = _pad(c, Matrix.identity(n, f), k)
    elif m <= k:
        r, e = _pad(Matrix.identity(m, f), c, k)
    else:
        return None
    return NnrVerdict(digest(c), k, YES, "trivial", "identity factor", r, e)


def _low_rank_witness(c: Matrix) -> tuple[Matrix, Matrix]:
    """NMF of inner dimension ``rank C`` for ``rank C <= 2`` (always exists)."""
    f = c.field
    cols = [j for j in range(c.cols) if any(f.sign(x) for x in c.col(j))]
    rk = rank(c)
    for subset in itertools.combinations(cols, rk):
        r = c.select_columns(list(subset))
        e_cols = []
        for j in range(c.cols):
            z = find_nonnegative_solution(r, list(c.col(j)))
            if z is None:
                break
            e_cols.append(z)
        else:
            return r, Matrix.from_columns(e_cols, f)
    raise MatrixError("no extreme-column factorization found")  # pragma: no cover


# ---------------------------------------------------------------------------
# exact rank-3 geometry

@dataclass(frozen=True)
class PlanarPicture:
    """Inner and outer polygons of a rank-3 nonnegative matrix."""

    inner: VPolytope
    outer: HPolytope
    left: Matrix          # A with u = 1, acting on lifted points (y1, y2, 1-y1-y2)
    right: Matrix         # B, columns are lifted inner points
    rows: tuple           # kept (nonzero) rows
    cols: tuple           # kept (nonzero) columns
    col_sums: tuple       # column sums used for normalisation


def _lift(points, f) -> Matrix:
    return Matrix.from_columns([[p[0], p[1], f.one - p[0] - p[1]] for p in points], f)


def planar_picture(c: Matrix) -> PlanarPicture:
    f = c.field
    _check_nonnegative(c)
    rows = tuple(i for i in range(c.rows) if any(f.sign(x) for x in c.row(i)))
    cols = tuple(j for j in range(c.cols) if any(f.sign(x) for x in c.col(j)))
    sub = c.select_rows(list(rows)).select_columns(list(cols))
    sums = sub.column_sums()
    normed = Matrix([[x / s for x, s in zip(row, sums)] for row in sub.row_list()], f)
    fac = rank_factorize(validate_cope(normed, [normed.rows]))
    if fac.inner_dim != 3:
        raise MatrixError(f"planar picture needs rank 3, got {fac.inner_dim}")
    a, b = fac.left, fac.right
    inner = VPolytope.from_points([[b[0, j], b[1, j]] for j in range(b.cols)], f)
    h_rows, offs = [], []
    for i in range(a.rows):
        row = [a[i, 0] - a[i, 2], a[i, 1] - a[i, 2]]
        if all(f.sign(x) == 0 for x in row):
            continue
        h_rows.append(row)
        offs.append(-a[i, 2])
    outer = HPolytope(2, Matrix(h_rows, f), tuple(offs))
    return PlanarPicture(inner, outer, a, b, rows, cols, tuple(sums))


def _embed_back(c: Matrix, pic: PlanarPicture, r_sub: Matrix, e_sub: Matrix):
    f = c.field
    k = r_sub.cols
    r_rows = [[f.zero] * k for _ in range(c.rows)]
    for ii, i in enumerate(pic.rows):
        r_rows[i] = list(r_sub.row(ii))
    e_rows = [[f.zero] * c.cols for _ in range(k)]
    for jj, j in enumerate(pic.cols):
        s = pic.col_sums[jj]
        for t in range(k):
            e_rows[t][j] = e_sub[t, jj] * s
    return Matrix(r_rows, f), Matrix(e_rows, f)


def min_nnr_rank3(c: Matrix, max_k: int | None = None):
    """Exact nonnegative rank of a rank-3 matrix with a witness.

    Returns ``(k, R, E, picture, polygon)``; with ``max_k`` the search may
    stop early, returning ``(None, ...)`` when the rank exceeds ``max_k``.
    """
    f = c.field
    pic = planar_picture(c)
    outer_v = enumerate_vertices(pic.outer)
    res = min_nested_polygon_2d(pic.inner, outer_v, max_k=max_k)
    if res is None:
        return None, None, None, pic, None
    g = _lift(res.polygon.points(), f)
    r_sub = pic.left @ g
    e_cols = []
    for j in range(pic.right.cols):
        z = find_nonnegative_solution(g, list(pic.right.col(j)))
        if z is None:
            raise MatrixError("witness polygon does not contain an inner point")
        e_cols.append(z)
    e_sub = Matrix.from_columns(e_cols, f)
    r, e = _embed_back(c, pic, r_sub, e_sub)
    if not _verify_witness(c, r, e):
        raise MatrixError("rank-3 witness failed verification")
    return res.k, r, e, pic, res.polygon


def nnr_exact_rank3(c: Matrix, k: int) -> NnrVerdict:
    if rank(c) != 3:
        raise MatrixError("exact planar oracle needs a rank-3 matrix")
    kk, r, e, _, poly = min_nnr_rank3(c, max_k=k)
    dg = digest(c)
    if kk is None:
        return NnrVerdict(dg, k, NO, "exact_rank3",
                          f"no nested polygon with at most {k} vertices between the "
                          f"inner and outer polygons")
    r, e = _pad(r, e, k)
    return NnrVerdict(dg, k, YES, "exact_rank3", f"nested polygon with {kk} vertices",
                      r, e, extra={"minimum": kk})


# ---------------------------------------------------------------------------
# heuristic search

def _seed_from(c: Matrix, k: int, seed: int | None) -> int:
    base = hashlib.sha256(f"{digest(c)}:{k}".encode()).digest()
    s = int.from_bytes(base[:8], "little")
    return s ^ (seed or 0)


def _hals(c: np.ndarray, k: int, restarts: int, iterations: int, rng, tol: float):
    """Batched HALS; returns best (W, H, relative residual)."""
    m, n = c.shape
    norm = np.linalg.norm(c) or 1.0
    scale = np.sqrt(c.mean() / k) if c.mean() > 0 else 1.0
    w = rng.random((restarts, m, k)) * scale + 1e-3
    h = rng.random((restarts, k, n)) * scale + 1e-3
    eps = 1e-16
    best = (None, None, np.inf)
    for it in range(iterations):
        wtc = np.einsum("rmk,mn->rkn", w, c)
        wtw = np.einsum("rmk,rml->rkl", w, w)
        for t in range(k):
            num = wtc[:, t, :] - np.einsum("rl,rln->rn", wtw[:, t, :], h) + wtw[:, t, t, None] * h[:, t, :]
            h[:, t, :] = np.maximum(num / (wtw[:, t, t, None] + eps), 0.0)
        cht = np.einsum("mn,rkn->rmk", c, h)
        hht = np.einsum("rkn,rln->rkl", h, h)
        for t in range(k):
            num = cht[:, :, t] - np.einsum("rml,rl->rm", w, hht[:, :, t]) + w[:, :, t] * hht[:, t, t, None]
            w[:, :, t] = np.maximum(num / (hht[:, t, t, None] + eps), 0.0)
        if it % 50 == 49 or it == iterations - 1:
            res = np.linalg.norm(c[None] - w @ h, axis=(1, 2)) / norm
            i = int(np.argmin(res))
            if res[i] < best[2]:
                best = (w[i].copy(), h[i].copy(), float(res[i]))
            if best[2] <= tol:
                break
    return best


def nnr_heuristic(c: Matrix, k: int, restarts: int = HEURISTIC_RESTARTS,
                  iterations: int = HEURISTIC_ITERATIONS, seed: int | None = None,
                  tol: float = HEURISTIC_TOLERANCE) -> NnrVerdict:
    """Restarted HALS; ``yes`` with a float witness or ``unknown``, never ``no``."""
    _check_nonnegative(c)
    arr = c.to_numpy()
    rng = np.random.default_rng(_seed_from(c, k, seed))
    w, h, res = _hals(arr, k, restarts, iterations, rng, tol)
    dg = digest(c)
    if w is not None and res <= tol:
        ff = make_field("float", tol=max(tol * max(1.0, float(np.abs(arr).max())) * 10, 1e-12))
        r = Matrix(w.tolist(), ff)
        e = Matrix(h.tolist(), ff)
        if _verify_witness(c.with_field(ff), r, e):
            return NnrVerdict(dg, k, YES, "heuristic", "HALS reached the residual tolerance",
                              r, e, exact=False, restarts=restarts, best_residual=res)
    return NnrVerdict(dg, k, UNKNOWN, "heuristic",
                      "no factorization found; absence is not proved",
                      exact=False, restarts=restarts, best_residual=res)


# ---------------------------------------------------------------------------
# dispatch

def decide_nnr(c: Matrix, k: int, strategy: str = "auto", seed: int | None = None,
               restarts: int = HEURISTIC_RESTARTS,
               iterations: int = HEURISTIC_ITERATIONS) -> NnrVerdict:
    """Answer "NNR(C) <= k?" with the chosen strategy (exact, heuristic or auto)."""
    if strategy not in ("auto", "exact", "heuristic"):
        raise ValueError(f"unknown oracle strategy {strategy!r}")
    _check_nonnegative(c)
    rk = rank(c)
    dg = digest(c)
    if k < rk:
        return NnrVerdict(dg, k, NO, "rank_bound", f"rank {rk} exceeds {k}")
    trivial = nnr_trivial(c, k)
    if trivial is not None:
        return trivial
    if rk <= 2:
        r, e = _low_rank_witness(c)
        r, e = _pad(r, e, k)
        return NnrVerdict(dg, k, YES, "low_rank", f"rank {rk} equals nonnegative rank", r, e)
    if rk == 3 and strategy in ("auto", "exact"):
        return nnr_exact_rank3(c, k)
    if strategy == "exact":
        return NnrVerdict(dg, k, UNKNOWN, "exact_rank3",
                          f"exact oracle covers rank 3 only (rank is {rk})")
    return nnr_heuristic(c, k, restarts=restarts, iterations=iterations, seed=seed)


def nnr_bounds(c: Matrix, strategy: str = "auto", seed: int | None = None,
               restarts: int = HEURISTIC_RESTARTS,
               iterations: int = HEURISTIC_ITERATIONS) -> dict:
    """Lower and upper bounds on the nonnegative rank with supporting verdicts."""
    _check_nonnegative(c)
    rk = rank(c)
    m, n = c.shape
    out = {"rank": rk, "lower": rk, "upper": min(m, n), "exact": False, "verdict": None}
    if rk <= 2 or rk == min(m, n):
        v = decide_nnr(c, rk, strategy, seed, restarts, iterations)
        out.update(upper=rk, exact=True, verdict=v)
        return out
    if rk == 3 and strategy in ("auto", "exact"):
        kk, r, e, _, _ = min_nnr_rank3(c)
        v = NnrVerdict(digest(c), kk, YES, "exact_rank3",
                       f"minimum nested polygon has {kk} vertices", r, e,
                       extra={"minimum": kk})
        out.update(lower=kk, upper=kk, exact=True, verdict=v)
        return out
    if strategy == "exact":
        return out
    for k in range(rk, min(m, n)):
        v = nnr_heuristic(c, k, restarts=restarts, iterations=iterations, seed=seed)
        if v.answer == YES:
            out.update(upper=k, verdict=v)
            break
    return out


# ---------------------------------------------------------------------------
# stability

class StabilityCapError(ValueError):
    """Subset enumeration would exceed the size cap."""


def lexicographic_before(s, t) -> bool:
    """Smaller sets first; equal sizes compare sorted entries left to right."""
    s, t = sorted(s), sorted(t)
    if len(s) != len(t):
        return len(s) < len(t)
    for a, b in zip(s, t):
        if a != b:
            return a < b
    return False


def first_admissible_subset(vectors: Matrix, target) -> tuple:
    """Lexicographically first set of columns whose conic hull contains ``target``."""
    f = vectors.field
    if all(f.sign(x) == 0 for x in target):
        return ()
    k = vectors.cols
    for size in range(1, k + 1):
        for subset in itertools.combinations(range(k), size):
            if find_nonnegative_solution(vectors.select_columns(list(subset)), list(target)) is not None:
                return subset
    return None


def is_stable_nmf(r_factor: Matrix, e_factor: Matrix, c: Matrix):
    """``(stable, first_violation)``; the violation names a column or row of ``C``."""
    f = c.field
    if not (r_factor @ e_factor) == c:
        raise MatrixError("factors do not multiply to the matrix")
    k = r_factor.cols
    if k > STABILITY_CAP or c.cols > STABILITY_CAP or c.rows > STABILITY_CAP:
        raise StabilityCapError(f"stability check limited to dimensions <= {STABILITY_CAP}")
    for i in range(c.cols):
        support = tuple(t for t in range(k) if f.sign(e_factor[t, i]) != 0)
        first = first_admissible_subset(r_factor, c.col(i))
        if support != first:
            return False, {"kind": "column", "index": i, "support": list(support),
                           "first_admissible": list(first) if first is not None else None}
    rows_as_cols = e_factor.T
    for j in range(c.rows):
        support = tuple(t for t in range(k) if f.sign(r_factor[j, t]) != 0)
        first = first_admissible_subset(rows_as_cols, c.row(j))
        if support != first:
            return False, {"kind": "row", "index": j, "support": list(support),
                           "first_admissible": list(first) if first is not None else None}
    return True, None
