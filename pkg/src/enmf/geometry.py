"""Convex polytopes in vertex and inequality form over a scalar backend."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .field import pow2_exponent
from .lp import LinearProgram, find_nonnegative_solution, solve
from .matrix import Matrix, MatrixError, _gram_schmidt, dot, rank

__all__ = [
    "GeometryError",
    "UnboundedError",
    "ResourceGuardError",
    "HPolytope",
    "VPolytope",
    "SimplexBody",
    "outer_from_effects",
    "inner_from_states",
    "enumerate_vertices",
    "contains",
    "polar_dual",
    "barycenter",
    "regular_simplex_directions",
    "inscribed_simplex",
    "circumscribed_simplex",
    "section_simplex",
    "distances",
    "project_affine",
    "convex_hull_2d",
    "affine_basis",
    "MAX_ENUM_DIM",
    "MAX_ENUM_FACETS",
]

MAX_ENUM_DIM = 6
MAX_ENUM_FACETS = 24


class GeometryError(ValueError):
    pass


class UnboundedError(GeometryError):
    pass


class ResourceGuardError(GeometryError):
    """Input exceeds the desk-scale limits of brute-force enumeration."""


def _vec(field, values) -> list:
    return [field(v) if field.exact else float(v) for v in values]


def _sub(u, v):
    return [a - b for a, b in zip(u, v)]


def _add(u, v):
    return [a + b for a, b in zip(u, v)]


def _scale(s, u):
    return [s * a for a in u]


def _same_point(f, u, v) -> bool:
    return all(f.sign(a - b) == 0 for a, b in zip(u, v))


# ---------------------------------------------------------------------------
# representations

@dataclass(frozen=True)
class HPolytope:
    """``{x : A x >= b}`` intersected with optional equalities ``e.x = c``."""

    dim: int
    inequality_matrix: Matrix
    offsets: tuple
    equalities: tuple = ()

    def __post_init__(self):
        a = self.inequality_matrix
        if a.cols != self.dim or a.rows != len(self.offsets):
            raise GeometryError("inequality system does not match dimension")
        f = a.field
        for i in range(a.rows):
            if all(f.sign(x) == 0 for x in a.row(i)):
                raise GeometryError(f"inequality row {i} is zero")

    @property
    def field(self):
        return self.inequality_matrix.field

    def slacks(self, point: Sequence) -> list:
        return [s - b for s, b in zip(self.inequality_matrix @ point, self.offsets)]


@dataclass(frozen=True)
class VPolytope:
    """Convex hull of the columns of ``vertices``; redundant points removed."""

    dim: int
    vertices: Matrix

    @property
    def field(self):
        return self.vertices.field

    @property
    def count(self) -> int:
        return self.vertices.cols

    def points(self) -> list[list]:
        return [list(c) for c in self.vertices.columns()]

    @classmethod
    def from_points(cls, points: Sequence[Sequence], field, reduce: bool = True) -> "VPolytope":
        pts = [_vec(field, p) for p in points]
        if not pts:
            raise GeometryError("empty point set")
        dim = len(pts[0])
        uniq: list[list] = []
        for p in pts:
            if not any(_same_point(field, p, q) for q in uniq):
                uniq.append(p)
        if reduce:
            if dim == 2:
                uniq = convex_hull_2d(uniq, field)
            else:
                uniq = _remove_redundant(uniq, field)
        return cls(dim, Matrix.from_columns(uniq, field))


@dataclass(frozen=True)
class SimplexBody(VPolytope):
    """A simplex: vertex count equals affine dimension plus one."""

    def __post_init__(self):
        pts = self.points()
        if len(pts) > 1:
            diffs = [_sub(p, pts[0]) for p in pts[1:]]
            if rank(Matrix(diffs, self.field)) != len(pts) - 1:
                raise GeometryError("simplex vertices are affinely dependent")

    @classmethod
    def of(cls, points, field) -> "SimplexBody":
        pts = [_vec(field, p) for p in points]
        return cls(len(pts[0]), Matrix.from_columns(pts, field))


def _remove_redundant(points: list[list], field) -> list[list]:
    keep = list(points)
    i = 0
    while i < len(keep):
        others = keep[:i] + keep[i + 1:]
        if others and _in_hull(others, keep[i], field):
            keep = others
            continue
        i += 1
    return keep


def _in_hull(points: list[list], x: Sequence, field) -> bool:
    dim = len(x)
    rows = [[p[d] for p in points] for d in range(dim)] + [[field.one] * len(points)]
    sol = find_nonnegative_solution(Matrix(rows, field), list(x) + [field.one])
    return sol is not None


def convex_hull_2d(points: list[list], field) -> list[list]:
    """Counter-clockwise hull vertices (monotone chain, exact orientation tests)."""
    f = field
    pts = sorted(points, key=lambda p: (f.to_float(p[0]), f.to_float(p[1])))
    # stable exact ordering fix-up for float ties
    for i in range(1, len(pts)):
        j = i
        while j > 0 and _lex_less(f, pts[j], pts[j - 1]):
            pts[j], pts[j - 1] = pts[j - 1], pts[j]
            j -= 1
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and f.sign(cross(lower[-2], lower[-1], p)) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and f.sign(cross(upper[-2], upper[-1], p)) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return hull if hull else pts[:1]


def _lex_less(f, p, q) -> bool:
    s = f.sign(p[0] - q[0])
    if s != 0:
        return s < 0
    return f.sign(p[1] - q[1]) < 0


# ---------------------------------------------------------------------------
# constructions from factorizations

def outer_from_effects(a: Matrix, l: int) -> HPolytope:
    """``{x : A x >= 0, 1^T A x = l}``."""
    if rank(a) != a.cols:
        raise GeometryError("effect matrix must have full column rank")
    f = a.field
    return HPolytope(a.cols, a, tuple([f.zero] * a.rows),
                     ((tuple(a.column_sums()), f(l)),))


def inner_from_states(b: Matrix) -> VPolytope:
    return VPolytope.from_points(b.columns(), b.field)


def barycenter(p: VPolytope) -> list:
    f = p.field
    pts = p.points()
    if not pts:
        raise GeometryError("empty polytope")
    inv = f.one / f(len(pts)) if f.exact else 1.0 / len(pts)
    total = pts[0]
    for q in pts[1:]:
        total = _add(total, q)
    return _scale(inv, total)


# ---------------------------------------------------------------------------
# vertex enumeration and membership

def _check_bounded(h: HPolytope) -> None:
    f = h.field
    a = h.inequality_matrix
    n = h.dim
    rows = []
    rhs = []
    for i in range(a.rows):
        r = list(a.row(i))
        rows.append(r + [-x for x in r])
        rhs.append(h.offsets[i])
    for e, c in h.equalities:
        e = list(e)
        rows.append(e + [-x for x in e])
        rhs.append(c)
        rows.append([-x for x in e] + e)
        rhs.append(-c)
    m = Matrix(rows, f)
    for j in range(n):
        for sgn in (1, -1):
            cost = [f.zero] * (2 * n)
            cost[j] = f(sgn) if f.exact else float(sgn)
            cost[n + j] = -cost[j]
            sol = solve(LinearProgram(tuple(cost), m, tuple(rhs)))
            if sol.status == "unbounded":
                raise UnboundedError(f"polyhedron is unbounded along coordinate {j}")
            if sol.status == "infeasible":
                raise GeometryError("polyhedron is empty")


def enumerate_vertices(h: HPolytope) -> VPolytope:
    """All vertices by brute force over facet subsets (desk scale only)."""
    f = h.field
    a = h.inequality_matrix
    if h.dim > MAX_ENUM_DIM or a.rows > MAX_ENUM_FACETS:
        raise ResourceGuardError(
            f"vertex enumeration limited to dimension <= {MAX_ENUM_DIM} and "
            f"<= {MAX_ENUM_FACETS} facets (got {h.dim}, {a.rows})")
    _check_bounded(h)
    eq_rows = [list(e) for e, _ in h.equalities]
    eq_rhs = [c for _, c in h.equalities]
    if eq_rows:
        _, piv = Matrix(eq_rows, f).T.rref()
        eq_rows = [eq_rows[i] for i in piv]
        eq_rhs = [eq_rhs[i] for i in piv]
    need = h.dim - len(eq_rows)
    found: list[list] = []
    for subset in itertools.combinations(range(a.rows), need):
        sys_rows = eq_rows + [list(a.row(i)) for i in subset]
        sys_rhs = eq_rhs + [h.offsets[i] for i in subset]
        try:
            x = Matrix(sys_rows, f).solve(sys_rhs) if sys_rows else []
        except MatrixError:
            continue
        if all(f.sign(s) >= 0 for s in h.slacks(x)):
            if not any(_same_point(f, x, y) for y in found):
                found.append(x)
    if not found:
        raise GeometryError("polytope has no vertices")
    return VPolytope.from_points(found, f)


def contains(outer, point: Sequence) -> bool:
    f = outer.field
    x = _vec(f, point)
    if len(x) != outer.dim:
        raise GeometryError(f"point has dimension {len(x)}, polytope {outer.dim}")
    if isinstance(outer, HPolytope):
        if any(f.sign(s) < 0 for s in outer.slacks(x)):
            return False
        return all(f.sign(dot(e, x, f.zero) - c) == 0 for e, c in outer.equalities)
    return _in_hull(outer.points(), x, f)


def polar_dual(p, center: Sequence | None = None):
    """Polar ``{y : <y, x> <= 1 for all x in p}``, optionally about ``center``."""
    f = p.field
    c = _vec(f, center) if center is not None else None
    if isinstance(p, VPolytope):
        pts = p.points()
        if c is not None:
            pts = [_sub(q, c) for q in pts]
        h = HPolytope(p.dim, Matrix([[-x for x in q] for q in pts], f),
                      tuple([-f.one] * len(pts)))
        try:
            _check_bounded(h)
        except UnboundedError as exc:
            raise GeometryError("origin is not interior to the polytope") from exc
        return h
    if p.equalities:
        raise GeometryError("polar of a lower-dimensional body is unbounded")
    a = p.inequality_matrix
    offs = list(p.offsets)
    if c is not None:
        offs = [b - s for b, s in zip(offs, a @ c)]
    gens = []
    for i in range(a.rows):
        if f.sign(offs[i]) >= 0:
            raise GeometryError("origin is not interior to the polytope")
        gens.append([x / offs[i] for x in a.row(i)])
    return VPolytope.from_points(gens, f)


# ---------------------------------------------------------------------------
# simplexes

def regular_simplex_directions(s: int) -> list[list[Fraction]]:
    """``s+1`` rational directions in R^s summing to zero, close to a regular simplex.

    Coordinates are multiples of 2^-16; the last direction is minus the sum of
    the others so the origin is an exact convex combination.
    """
    if s < 1:
        return [[]]
    # regular simplex on the unit sphere: v_i . v_j = -1/s
    verts = [[0.0] * s for _ in range(s + 1)]
    for i in range(s):
        norm2 = sum(x * x for x in verts[i][:i])
        verts[i][i] = math.sqrt(max(0.0, 1.0 - norm2))
        for j in range(i + 1, s + 1):
            partial = sum(verts[i][t] * verts[j][t] for t in range(i))
            verts[j][i] = (-1.0 / s - partial) / verts[i][i]
    den = 1 << 16
    out = [[Fraction(round(x * den), den) for x in v] for v in verts[:s]]
    out.append([-sum(col) for col in zip(*out)])
    return out


def affine_basis(points: Sequence[Sequence], center: Sequence, field) -> list[list]:
    """Orthogonal (unnormalized) basis of the direction space of ``aff(points)``."""
    return _gram_schmidt([_sub(p, center) for p in points], field)


def _pow2(z: int, f):
    if f.exact:
        return f(Fraction(2) ** z)
    return math.ldexp(1.0, z)


def _approx_inverse_length(w, f):
    n2 = dot(w, w, f.zero)
    e = pow2_exponent(n2 if f.exact else float(n2), "down")
    return _pow2(-(e // 2), f)


def inscribed_simplex(p, center: Sequence, basis: list[list] | None = None,
                      max_steps: int = 256) -> SimplexBody:
    """Simplex ``center + 2^z_j f_j`` inside ``p`` that contains ``center``.

    ``p`` may be in either representation; ``basis`` spans the directions of
    its affine hull (computed from the vertices when omitted).  Each length
    is the largest power of two accepted by an exact containment test.
    """
    f = p.field
    c = _vec(f, center)
    if basis is None:
        if not isinstance(p, VPolytope):
            raise GeometryError("an H-polytope needs an explicit direction basis")
        basis = affine_basis(p.points(), c, f)
    s = len(basis)
    if s == 0:
        return SimplexBody.of([c], f)
    if not contains(p, c):
        raise GeometryError("center is not inside the polytope")
    scaled = [_scale(_approx_inverse_length(w, f), w) for w in basis]
    vertices = []
    for r in regular_simplex_directions(s):
        d = [f.zero] * len(c)
        for coef, w in zip(r, scaled):
            d = _add(d, _scale(f(coef) if f.exact else float(coef), w))
        z = 0
        if contains(p, _add(c, _scale(_pow2(z, f), d))):
            while contains(p, _add(c, _scale(_pow2(z + 1, f), d))):
                z += 1
                if z > max_steps:
                    raise UnboundedError("inscribed simplex search did not terminate")
        else:
            while True:
                z -= 1
                if -z > max_steps:
                    raise GeometryError("center is not interior to the polytope")
                if contains(p, _add(c, _scale(_pow2(z, f), d))):
                    break
        vertices.append(_add(c, _scale(_pow2(z, f), d)))
    return SimplexBody.of(vertices, f)


def _polar_simplex_vertices(tverts: list[list], f) -> list[list]:
    """Vertices of ``{y : t_j . y <= 1}`` for a simplex with vertices ``t_j``."""
    out = []
    for j in range(len(tverts)):
        rows = [t for i, t in enumerate(tverts) if i != j]
        out.append(Matrix(rows, f).solve([f.one] * len(rows)))
    return out


def _standard_basis(s, f):
    return [[f.one if i == j else f.zero for j in range(s)] for i in range(s)]


def circumscribed_simplex(p) -> SimplexBody:
    """Simplex containing ``p`` (polar of an inscribed simplex of the polar)."""
    f = p.field
    if isinstance(p, HPolytope):
        verts = enumerate_vertices(p)
    else:
        verts = p
    c = barycenter(verts)
    basis = affine_basis(verts.points(), c, f)
    if isinstance(p, HPolytope):
        rows = [list(r) for r in p.inequality_matrix.row_list()]
        offs = list(p.offsets)
    else:
        local = [[dot(_sub(q, c), w, f.zero) for w in basis] for q in verts.points()]
        if len(basis) == 0:
            return SimplexBody.of([c], f)
        hp = polar_dual(VPolytope.from_points(local, f))
        # hp = {y : -q.y >= -1}; its inscribed simplex is inside the polar of p
        inner = inscribed_simplex(hp, [f.zero] * len(basis), _standard_basis(len(basis), f))
        loc = _polar_simplex_vertices(inner.points(), f)
        amb = []
        for y in loc:
            x = list(c)
            for coef, w in zip(y, basis):
                x = _add(x, _scale(coef, w))
            amb.append(x)
        return SimplexBody.of(amb, f)
    return section_simplex(rows, offs, c, basis, f)


def section_simplex(rows, offsets, center, basis, f) -> SimplexBody:
    """Circumscribed simplex of ``{x in center + span(basis) : rows x >= offsets}``."""
    c = list(center)
    gens = []
    for a, b in zip(rows, offsets):
        a_loc = [dot(a, w, f.zero) for w in basis]
        off = b - dot(a, c, f.zero)
        if all(f.sign(x) == 0 for x in a_loc):
            if f.sign(off) > 0:
                raise GeometryError("section is empty")
            continue
        if f.sign(off) >= 0:
            raise GeometryError("center is not interior to the section")
        gens.append([x / off for x in a_loc])
    s = len(basis)
    if s == 0:
        return SimplexBody.of([c], f)
    polar = VPolytope.from_points(gens, f)
    inner = inscribed_simplex(polar, [f.zero] * s, _standard_basis(s, f))
    ambient = []
    for y in _polar_simplex_vertices(inner.points(), f):
        x = list(c)
        for coef, w in zip(y, basis):
            x = _add(x, _scale(coef, w))
        ambient.append(x)
    return SimplexBody.of(ambient, f)


# ---------------------------------------------------------------------------
# metric quantities (squared, so they stay in the field)

def _sq_dist_to_affine(x, pts, f):
    base = pts[0]
    diffs = _gram_schmidt([_sub(q, base) for q in pts[1:]], f)
    r = _sub(x, base)
    for d in diffs:
        coef = dot(r, d, f.zero) / dot(d, d, f.zero)
        r = _sub(r, _scale(coef, d))
    return dot(r, r, f.zero)


def distances(s1: VPolytope, s2: VPolytope, center: Sequence) -> tuple:
    """``(d1^2, d2^2)``: center to the nearest facet of ``s1``; diameter of ``s2``."""
    f = s1.field
    c = _vec(f, center)
    v1 = s1.points()
    if len(v1) < 2:
        raise GeometryError("s1 must have at least two vertices")
    d1 = None
    for j in range(len(v1)):
        facet = v1[:j] + v1[j + 1:]
        d = _sq_dist_to_affine(c, facet, f)
        if d1 is None or f.sign(d - d1) < 0:
            d1 = d
    v2 = s2.points()
    d2 = f.zero
    for a, b in itertools.combinations(v2, 2):
        diff = _sub(a, b)
        d = dot(diff, diff, f.zero)
        if f.sign(d - d2) > 0:
            d2 = d
    return d1, d2


def project_affine(p: VPolytope, span_points: Matrix) -> VPolytope:
    """Orthogonal projection of every vertex onto the affine span of the columns."""
    f = p.field
    pts = [list(c) for c in span_points.columns()]
    base = pts[0]
    basis = _gram_schmidt([_sub(q, base) for q in pts[1:]], f)
    out = []
    for x in p.points():
        r = _sub(x, base)
        proj = list(base)
        for d in basis:
            coef = dot(r, d, f.zero) / dot(d, d, f.zero)
            proj = _add(proj, _scale(coef, d))
        out.append(proj)
    return VPolytope(p.dim, Matrix.from_columns(out, f))
