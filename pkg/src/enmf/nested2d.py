"""Minimum-vertex convex polygon nested between two convex polygons.

Greedy chord advancing: from a start point on the outer boundary, walk along
the tangent line of the inner polygon until it leaves the outer polygon and
repeat.  The best start point is found exactly by tracking the greedy step
as a piecewise projective map of the start parameter, so every comparison
stays in the scalar field.
"""
from __future__ import annotations

from dataclasses import dataclass

from .geometry import GeometryError, HPolytope, VPolytope, enumerate_vertices

__all__ = ["NestedPolygonResult", "min_nested_polygon_2d", "greedy_polygon"]


@dataclass(frozen=True)
class NestedPolygonResult:
    k: int
    polygon: VPolytope
    start: tuple  # (edge index, parameter) of the first witness vertex


def _cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1]


def _sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


class _Annulus:
    def __init__(self, inner: VPolytope, outer: VPolytope):
        f = inner.field
        self.f = f
        self.P = [tuple(p) for p in inner.points()]
        self.Q = [tuple(q) for q in outer.points()]
        self.n = len(self.Q)
        if self.n < 3:
            raise GeometryError("outer polygon must be two-dimensional")
        self.D = [_sub(self.Q[(e + 1) % self.n], self.Q[e]) for e in range(self.n)]
        self.N = [_dot(d, d) for d in self.D]
        for p in self.P:
            for e in range(self.n):
                if f.sign(_cross(self.D[e], _sub(p, self.Q[e]))) < 0:
                    raise GeometryError("inner polygon is not contained in the outer one")
        self.breaks = [self._edge_breakpoints(e) for e in range(self.n)]

    # -- primitives --------------------------------------------------------
    def point(self, e, t):
        q, d = self.Q[e], self.D[e]
        return (q[0] + t * d[0], q[1] + t * d[1])

    def _line_param(self, e, a, b):
        """Parameter on edge ``e`` where the line through ``a, b`` crosses it."""
        f = self.f
        u = _sub(b, a)
        den = _cross(u, self.D[e])
        if f.sign(den) == 0:
            return None
        return _cross(u, _sub(a, self.Q[e])) / den

    def _edge_breakpoints(self, e):
        f = self.f
        cands = []
        m = len(self.P)
        if m > 1:
            for j in range(m):
                cands.append(self._line_param(e, self.P[j], self.P[(j + 1) % m]))
        for v in self.P:
            for q in self.Q:
                if f.sign(v[0] - q[0]) != 0 or f.sign(v[1] - q[1]) != 0:
                    cands.append(self._line_param(e, v, q))
        out = []
        for t in cands:
            if t is None or f.sign(t) <= 0 or f.sign(t - f.one) >= 0:
                continue
            if not any(f.sign(t - s) == 0 for s in out):
                out.append(t)
        out.sort(key=f.to_float)
        return out

    def tangent(self, x):
        """Inner vertex ``v`` with the whole inner polygon left of ray ``x -> v``."""
        f = self.f
        best = None
        for v in self.P:
            d = _sub(v, x)
            if f.sign(d[0]) == 0 and f.sign(d[1]) == 0:
                continue
            if all(f.sign(_cross(d, _sub(w, x))) >= 0 for w in self.P):
                if best is None or f.sign(_dot(d, d) - _dot(_sub(best, x), _sub(best, x))) > 0:
                    best = v
        if best is None:
            raise GeometryError("no tangent from boundary point; inner polygon degenerate")
        return best

    def exit(self, x, v):
        """Edge index and scale where the ray ``x -> v`` leaves the outer polygon."""
        f = self.f
        d = _sub(v, x)
        best_e, best_s = None, None
        for e in range(self.n):
            den = _cross(self.D[e], d)
            if f.sign(den) >= 0:
                continue
            s = _cross(self.D[e], _sub(x, self.Q[e])) / (-den)
            if best_s is None or f.sign(s - best_s) < 0:
                best_e, best_s = e, s
        if best_e is None:
            raise GeometryError("ray does not leave the outer polygon")
        return best_e, best_s

    def step(self, lifted_edge, t):
        """One greedy chord from lifted position ``(E, t)``; returns ``(E', t', point)``."""
        f = self.f
        e = lifted_edge % self.n
        x = self.point(e, t)
        v = self.tangent(x)
        e2, s = self.exit(x, v)
        y = (x[0] + s * (v[0] - x[0]), x[1] + s * (v[1] - x[1]))
        t2 = _dot(_sub(y, self.Q[e2]), self.D[e2]) / self.N[e2]
        if f.sign(t2 - f.one) >= 0:
            e2, t2 = (e2 + 1) % self.n, f.zero
        elif f.sign(t2) <= 0:
            t2 = f.zero
        delta = (e2 - e) % self.n
        if delta == 0 and f.sign(t2 - t) <= 0:
            delta = self.n
        return lifted_edge + delta, t2, y

    def run(self, e0, t0, steps):
        """Concrete greedy walk; returns visited points and final lifted position."""
        pts = [self.point(e0, t0)]
        big, t = e0, t0
        for _ in range(steps):
            big, t, y = self.step(big, t)
            pts.append(y)
        return pts, big, t

    def closes(self, e0, t0, k):
        f = self.f
        _, big, t = self.run(e0, t0, k)
        return f.sign((f(big) if f.exact else float(big)) + t - t0 - (e0 + self.n)) >= 0

    def step_matrix(self, e, v, e2):
        """2x2 projective matrix sending the parameter on ``e`` to that on ``e2``."""
        d, d2, q, q2 = self.D[e], self.D[e2], self.Q[e], self.Q[e2]
        c0 = -_cross(d2, _sub(v, q2))
        a0 = _cross(d2, d)
        b0 = _cross(d2, _sub(q, v))
        p0 = _dot(_sub(v, q2), d2)
        p1 = _dot(d, d2)
        p2 = _dot(_sub(q, v), d2)
        nn = self.N[e2]
        return ((p0 * a0 + c0 * p1, p0 * b0 + c0 * p2), (nn * a0, nn * b0))


def _mat_mul(s, p):
    return ((s[0][0] * p[0][0] + s[0][1] * p[1][0], s[0][0] * p[0][1] + s[0][1] * p[1][1]),
            (s[1][0] * p[0][0] + s[1][1] * p[1][0], s[1][0] * p[0][1] + s[1][1] * p[1][1]))


def _apply(m, t):
    return (m[0][0] * t + m[0][1]) / (m[1][0] * t + m[1][1])


def _invert(m, s):
    return (m[1][1] * s - m[0][1]) / (m[0][0] - m[1][0] * s)


def _det(m):
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


@dataclass
class _Piece:
    e0: int
    lo: object
    hi: object
    phi: tuple
    lifted: int
    constant: bool = False


def _advance(ann: _Annulus, pc: _Piece) -> list[_Piece]:
    f = ann.f
    e = pc.lifted % ann.n
    a, b = _apply(pc.phi, pc.lo), _apply(pc.phi, pc.hi)
    if pc.constant or f.sign(b - a) == 0:
        big, t2, _ = ann.step(pc.lifted, a)
        const = ((f.zero, t2), (f.zero, f.one))
        return [_Piece(pc.e0, pc.lo, pc.hi, const, big, True)]
    cuts = [a] + [t for t in ann.breaks[e] if f.sign(t - a) > 0 and f.sign(b - t) > 0] + [b]
    out = []
    for i in range(len(cuts) - 1):
        a1, b1 = cuts[i], cuts[i + 1]
        lo = pc.lo if i == 0 else _invert(pc.phi, a1)
        hi = pc.hi if i == len(cuts) - 2 else _invert(pc.phi, b1)
        mid = (a1 + b1) / 2
        x = ann.point(e, mid)
        v = ann.tangent(x)
        e2, _ = ann.exit(x, v)
        delta = (e2 - e) % ann.n or ann.n
        s = ann.step_matrix(e, v, e2)
        phi = _mat_mul(s, pc.phi)
        if f.sign(_det(phi)) == 0:
            big, t2, _ = ann.step(pc.lifted, mid)
            out.append(_Piece(pc.e0, lo, hi, ((f.zero, t2), (f.zero, f.one)), big, True))
        else:
            out.append(_Piece(pc.e0, lo, hi, phi, pc.lifted + delta))
    return out


def _candidates(ann: _Annulus, pc: _Piece) -> list:
    """Start parameters that maximise the closing slack on a piece."""
    f = ann.f
    cands = [pc.lo, pc.hi]
    if pc.constant:
        return cands
    (al, be), (ga, de) = pc.phi
    c = f(pc.e0 + ann.n - pc.lifted) if f.exact else float(pc.e0 + ann.n - pc.lifted)
    mid = (pc.lo + pc.hi) / 2
    sgn = f.sign(ga * mid + de)
    # sgn * [(al t + be) - (t + c)(ga t + de)] = A t^2 + B t + C
    qa = -ga * sgn
    qb = (al - de - c * ga) * sgn
    if f.sign(qa) < 0:
        tv = -qb / (2 * qa)
        if f.sign(tv - pc.lo) > 0 and f.sign(pc.hi - tv) > 0:
            cands.append(tv)
    return cands


def _to_vpolygon(outer) -> VPolytope:
    if isinstance(outer, HPolytope):
        return enumerate_vertices(outer)
    return VPolytope.from_points(outer.points(), outer.field)


def greedy_polygon(inner: VPolytope, outer, start_edge: int = 0, start_t=None):
    """Greedy nested polygon from a single boundary start point."""
    outer = _to_vpolygon(outer)
    ann = _Annulus(VPolytope.from_points(inner.points(), inner.field), outer)
    f = ann.f
    t0 = f.zero if start_t is None else start_t
    pts = [ann.point(start_edge, t0)]
    big, t = start_edge, t0
    target = f(start_edge + ann.n) if f.exact else float(start_edge + ann.n)
    while True:
        big, t, y = ann.step(big, t)
        if f.sign((f(big) if f.exact else float(big)) + t - t0 - target) >= 0:
            break
        pts.append(y)
    return VPolytope.from_points(pts, f)


def min_nested_polygon_2d(inner: VPolytope, outer,
                          max_k: int | None = None) -> NestedPolygonResult | None:
    """Smallest convex polygon ``G`` with ``inner <= G <= outer`` and a witness.

    With ``max_k`` the search stops early and ``None`` means no nested polygon
    with at most ``max_k`` vertices exists.
    """
    if inner.dim != 2:
        raise GeometryError("inner polygon must be given in 2-D coordinates")
    outer_v = _to_vpolygon(outer)
    inner_v = VPolytope.from_points(inner.points(), inner.field)
    ann = _Annulus(inner_v, outer_v)
    f = ann.f
    k_greedy = greedy_polygon(inner_v, outer_v).count
    limit = k_greedy if max_k is None else min(max_k, k_greedy)
    pieces = [_Piece(e, f.zero, f.one, ((f.one, f.zero), (f.zero, f.one)), e)
              for e in range(ann.n)]
    for j in range(1, limit + 1):
        nxt = []
        for pc in pieces:
            nxt.extend(_advance(ann, pc))
        pieces = nxt
        if j < 3:
            continue
        for pc in pieces:
            for t0 in _candidates(ann, pc):
                if ann.closes(pc.e0, t0, j):
                    pts, _, _ = ann.run(pc.e0, t0, j - 1)
                    poly = VPolytope.from_points(pts, f)
                    return NestedPolygonResult(poly.count, poly, (pc.e0, t0))
    if max_k is not None and max_k < k_greedy:
        return None
    pts = greedy_polygon(inner_v, outer_v)
    return NestedPolygonResult(pts.count, pts, (0, f.zero))
