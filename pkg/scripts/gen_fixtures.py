"""Regenerate the JSON fixtures shipped in ``src/enmf/fixtures``.

Every entry is derived symbolically from closed-form trigonometric or
radical expressions and written as ``a + b*sqrt(5)`` in the scalar grammar.
Entries that involve ``t = sqrt(5 - 2 sqrt(5))`` are first moved into
Q(sqrt 5) by a diagonal rescaling that leaves the relevant products,
row spaces and kernels unchanged.  Run from the repository root:

    python3 scripts/gen_fixtures.py
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import sympy as sp

OUT = Path(__file__).resolve().parent.parent / "src" / "enmf" / "fixtures"
S5 = sp.sqrt(5)
T = sp.sqrt(5 - 2 * S5)
X = sp.Symbol("X")


def to_q5(expr) -> tuple[sp.Rational, sp.Rational]:
    """Exact ``(a, b)`` with ``expr == a + b sqrt(5)``; fails loudly otherwise."""
    expr = sp.nsimplify(expr) if expr.is_Float else expr
    if expr == 0:
        return sp.Integer(0), sp.Integer(0)
    poly = sp.Poly(sp.minimal_polynomial(expr, X), X)
    deg = poly.degree()
    if deg == 1:
        c1, c0 = poly.all_coeffs()
        return sp.Rational(-c0, c1), sp.Integer(0)
    if deg != 2:
        raise ValueError(f"{expr} is not in Q(sqrt 5) (degree {deg})")
    c2, c1, c0 = [sp.Rational(c) for c in poly.all_coeffs()]
    disc = c1 * c1 - 4 * c2 * c0
    q2 = disc / 5
    q = sp.sqrt(q2)
    if not q.is_Rational:
        raise ValueError(f"{expr} lies in a different quadratic field")
    a = -c1 / (2 * c2)
    b = q / (2 * c2)
    val = sp.N(expr, 60)
    for cand in (b, -b):
        if abs(sp.N(a + cand * S5, 60) - val) < sp.Float(10) ** -40:
            return a, cand
    raise ValueError(f"could not match a root for {expr}")


def fmt(expr) -> str:
    a, b = to_q5(sp.simplify(expr))

    def r(x):
        x = sp.Rational(x)
        return str(x.p) if x.q == 1 else f"{x.p}/{x.q}"

    return r(a) if b == 0 else f"({r(a)})+({r(b)})*sqrt(5)"


def fmt_matrix(m) -> list[list[str]]:
    m = sp.Matrix(m)
    return [[fmt(m[i, j]) for j in range(m.cols)] for i in range(m.rows)]


def check_zero(m, label):
    m = sp.Matrix(m).applyfunc(lambda e: sp.nsimplify(sp.simplify(e)))
    if any(sp.N(e, 50) != 0 and abs(sp.N(e, 50)) > 1e-40 for e in m):
        raise AssertionError(f"cross-check failed: {label}")


def th(i):
    return 2 * sp.pi * i / 5


# ---------------------------------------------------------------------------
# pentagon family

def c1_matrix():
    col = [2 * (S5 - 1), 8 - 2 * S5, 2 * (S5 - 1), 3 - S5, 3 - S5]
    return sp.Matrix(5, 5, lambda i, j: col[(i + j) % 5] / 10)


def pentagon_geometry():
    c = (S5 - 1) / 10
    K = sp.Matrix(5, 2, lambda i, j: sp.sin(th(i + 1)) if j == 0 else sp.cos(th(i + 1)))
    p = sp.Matrix([c] * 5)
    tan = sp.tan(sp.pi / 5)
    # states ordered x^5, x^1, ..., x^4 so that the product is C1 column for column
    xs = [sp.Matrix([c * (sp.cos(th(i)) * tan + sp.sin(th(i))),
                     c * (sp.sin(th(i)) * tan - sp.cos(th(i)))]) for i in range(5)]
    a_u = sp.Matrix(5, 3, lambda i, j: 2 / (5 - S5) if j == 0 else K[i, j - 1])
    b_i = sp.Matrix(3, 5, lambda i, j: (5 - S5) / 10 if i == 0 else xs[j][i - 1])
    check_zero(a_u * b_i - c1_matrix(), "A_U B_I = C1")
    # rescale the sine coordinate into Q(sqrt 5)
    d = sp.diag(1, T, 1)
    a_q, b_q = a_u * d, d.inv() * b_i
    check_zero(a_q * b_q - c1_matrix(), "rescaled A_U B_I = C1")
    ys = [(sp.Rational(2, 5)) * (K * x + p) for x in xs]
    y_mat = sp.Matrix.hstack(*ys)
    u_mat = (S5 - 1) / 5 * sp.eye(5)
    return {
        "A_U": fmt_matrix(a_q),
        "B_I": fmt_matrix(b_q),
        "I_vertices": fmt_matrix(y_mat),
        "U_vertices": fmt_matrix(u_mat),
        "ratio": fmt((S5 - 1) / 2),
    }


def appendix_e():
    q = (5 - S5) / 10
    w = 2 * S5 / 10
    a1 = sp.Matrix([[q, w, q, 0, 0], [0, q, w, q, 0], [0, 0, q, w, q],
                    [q, 0, 0, q, w], [w, q, 0, 0, q]])
    b1 = sp.Matrix([[0, q, w, q, 0], [q, w, q, 0, 0], [w, q, 0, 0, q],
                    [q, 0, 0, q, w], [0, 0, q, w, q]])
    check_zero(a1 * b1 - c1_matrix(), "A1 B1 = C1")
    r5 = 1 / S5
    a2 = sp.Matrix([[0, 1 - r5, 0, (5 - S5) / 10],
                    [r5, r5, 0, 0],
                    [1 - r5, 0, (5 - S5) / 10, 0],
                    [0, 0, 1 - r5, (3 * S5 - 5) / 10],
                    [0, 0, (3 * S5 - 5) / 10, 1 - r5]])
    b2 = sp.Matrix([
        [2 / S5 - sp.Rational(1, 2), (5 - S5) / 20, 0, (3 * S5 - 5) / 10, 3 * (5 - S5) / 20],
        [2 / S5 - sp.Rational(1, 2), 3 * (5 - S5) / 20, (3 * S5 - 5) / 10, 0, (5 - S5) / 20],
        [1 - 2 / S5, 0, (5 - S5) / 10, 1 - r5, r5],
        [1 - 2 / S5, r5, 1 - r5, (5 - S5) / 10, 0]])
    check_zero(a2 * b2 - c1_matrix(), "A2 B2 = C1")
    qa = sp.Matrix([
        [T / 5, r5 - sp.Rational(2, 5), sp.Rational(1, 5)],
        [0, sp.Rational(3, 5) - r5, sp.Rational(1, 5)],
        [-T / 5, r5 - sp.Rational(2, 5), sp.Rational(1, 5)],
        [-sp.sqrt(50 - 22 * S5) / 10, (1 - S5) / 10, sp.Rational(1, 5)],
        [sp.sqrt(50 - 22 * S5) / 10, (1 - S5) / 10, sp.Rational(1, 5)]])
    s1 = sp.sqrt(S5 / 8 + sp.Rational(5, 8))
    s2 = sp.sqrt(sp.Rational(5, 8) - S5 / 8)
    qb = sp.Matrix([
        [0, s1, s2, -s2, -s1],
        [1, (S5 - 1) / 4, (-S5 - 1) / 4, (-S5 - 1) / 4, (S5 - 1) / 4],
        [1, 1, 1, 1, 1]])
    check_zero(qa * qb - c1_matrix(), "quantum A1 B1 = C1")
    d = sp.diag(T, 1, 1)
    qa2, qb2 = qa * d, d.inv() * qb
    check_zero(qa2 * qb2 - c1_matrix(), "rescaled quantum pair")
    return {
        "C1": fmt_matrix(c1_matrix()),
        "A1": fmt_matrix(a1), "B1": fmt_matrix(b1),
        "A2": fmt_matrix(a2), "B2": fmt_matrix(b2),
        "quantum_A": fmt_matrix(qa2), "quantum_B": fmt_matrix(qb2),
    }


def appendix_d():
    g2 = sp.Matrix([
        [T, sp.sqrt((S5 + 5) / 2) / 2, sp.sqrt(10 - 2 * S5) / 4, 0,
         -sp.sqrt((5 - S5) / 2), -T],
        [-1, (1 - S5) / 4, (S5 + 1) / 4, S5 - 1, (3 - S5) / 2, -1],
        [(5 - S5) / 10] * 6])
    bi = sp.Matrix([
        [sp.sqrt((25 - 11 * S5) / 2), T, 0, -T, -sp.sqrt((25 - 11 * S5) / 2)],
        [(1 - S5) / 2, S5 - 2, 3 - S5, S5 - 2, (1 - S5) / 2],
        [(5 - S5) / 10] * 5])
    e_bar = sp.Matrix([
        [3 * (632 * S5 - 463) / 7676, (11425 - 7 * S5) / 38380, (11805 - 3427 * S5) / 38380,
         (528 * S5 - 1237) / 7676, (5400 - 2443 * S5) / 38380, (4576 - 6243 / S5) / 7676],
        [(42 - 11 * S5) / 76, sp.Rational(3, 380) * (11 * S5 + 15),
         sp.Rational(3, 380) * (11 * S5 + 15), (42 - 11 * S5) / 76,
         (22 * S5 - 65) / 380, (22 * S5 - 65) / 380],
        [(528 * S5 - 1237) / 7676, (11805 - 3427 * S5) / 38380, (11425 - 7 * S5) / 38380,
         3 * (632 * S5 - 463) / 7676, (4576 - 6243 / S5) / 7676, (5400 - 2443 * S5) / 38380],
        [(-24 * S5 - 31) / 7676, 9 * (27 * S5 - 205) / 38380, (6895 - 1657 * S5) / 38380,
         7 * (495 - 112 * S5) / 7676, 13 * (619 * S5 - 80) / 38380, (3440 - 2593 / S5) / 7676],
        [7 * (495 - 112 * S5) / 7676, (6895 - 1657 * S5) / 38380, 9 * (27 * S5 - 205) / 38380,
         (-24 * S5 - 31) / 7676, (3440 - 2593 / S5) / 7676, 13 * (619 * S5 - 80) / 38380]]).T
    y_star = sp.Matrix([
        [0, 0, 0, 5 - 2 * S5, (S5 - 1) / 2, 0],
        [0, 0, 0, 0, 1, 1],
        [5 - 2 * S5, 0, 0, 0, 0, (S5 - 1) / 2],
        [3 - S5, 1, (3 - S5) / 4, 0, 0, 0],
        [0, (3 - S5) / 4, 1, 3 - S5, 0, 0]]).T
    # the printed E-bar satisfies G E = B
    check_zero(g2 * e_bar - bi, "G2 E_bar = B_I")
    d = sp.diag(1 / T, 1, 1)
    g_q, b_q = d * g2, d * bi
    check_zero(g_q * e_bar - b_q, "rescaled G2 E_bar = B_I")
    return {
        "G2": fmt_matrix(g_q),
        "B_I": fmt_matrix(b_q),
        "E_bar2": fmt_matrix(e_bar),
        "Y_star": fmt_matrix(y_star),
        "objective": fmt((7 - 3 * S5) / 2),
    }


def cope(entries, heights, name, description):
    return {"name": name, "description": description, "radicand": 5,
            "l": len(heights), "block_heights": heights, "entries": entries}


def main() -> int:
    OUT.mkdir(parents=True, exist_ok=True)
    files = {
        "pentagon.json": cope(fmt_matrix(c1_matrix()), [5], "pentagon",
                              "5x5 rank-3 COPE of two nested regular pentagons"),
        "boxworld.json": cope([[str(x) for x in row] for row in
                               [[1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0], [0, 1, 0, 1]]],
                              [2, 2], "boxworld", "box-world COPE, two dichotomic measurements"),
        "identity4.json": cope([["1" if i == j else "0" for j in range(4)] for i in range(4)],
                               [4], "identity4", "4x4 identity, a classical COPE"),
        "pentagon_geometry.json": {"name": "pentagon_geometry", "radicand": 5,
                                   "description": "inner pentagon, outer simplex and their factors",
                                   "matrices": pentagon_geometry()},
        "appendix_d.json": {"name": "appendix_d", "radicand": 5,
                            "description": "shear LP instance with no rank-preserving map",
                            "matrices": appendix_d()},
        "appendix_e.json": {"name": "appendix_e", "radicand": 5,
                            "description": "explicit size-5, size-4 and quantum models",
                            "matrices": appendix_e()},
    }
    for name, payload in files.items():
        if "matrices" in payload:
            payload["scalars"] = {k: v for k, v in payload["matrices"].items()
                                  if isinstance(v, str)}
            payload["matrices"] = {k: v for k, v in payload["matrices"].items()
                                   if not isinstance(v, str)}
        (OUT / name).write_text(json.dumps(payload, indent=1) + "\n")
        print("wrote", OUT / name)
    return 0


if __name__ == "__main__":
    sys.exit(main())
