"""Random instances with known answers, shared by several test modules."""
from fractions import Fraction

from enmf.lp import LinearProgram
from enmf.matrix import Matrix, validate_cope


def _convex_quad(rng):
    # four points on distinct sides of a box, in counter-clockwise order
    while True:
        q = [(rng.randint(1, 9), 0), (10, rng.randint(1, 9)),
             (rng.randint(1, 9), 10), (0, rng.randint(1, 9))]
        # reject if one vertex lies on the segment of its neighbours
        ok = True
        for i in range(4):
            a, b, c = q[i - 1], q[i], q[(i + 1) % 4]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if cross <= 0:
                ok = False
        if ok:
            return q


def _facet_rows(q):
    rows = []
    for i in range(len(q)):
        a, b = q[i], q[(i + 1) % len(q)]
        # inward normal of a CCW edge: left side is (-(by-ay), bx-ax)
        nx, ny = -(b[1] - a[1]), b[0] - a[0]
        rows.append((nx, ny, -(nx * a[0] + ny * a[1])))
    return rows


def planted_nnr4(rng, f, size=5):
    """Slack matrix of a quadrilateral against itself (plus redundant data): NNR 4."""
    q = _convex_quad(rng)
    rows = _facet_rows(q)
    pts = list(q)
    if size == 5:
        # a redundant supporting line through a vertex and an extra edge point
        v = q[rng.randrange(4)]
        nx, ny = _facet_rows(q)[q.index(v)][:2]
        px, py = _facet_rows(q)[q.index(v) - 1][:2]
        dx, dy = nx + px, ny + py
        rows.append((dx, dy, -(dx * v[0] + dy * v[1])))
        a, b = q[0], q[1]
        t = Fraction(rng.randint(1, 4), 5)
        pts.append((a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])))
    data = [[Fraction(r[0] * p[0] + r[1] * p[1] + r[2]) for p in pts] for r in rows]
    return _scale(rng, data, f)


def planted_nnr3(rng, f, size=5):
    """Positive W (m x 3) times positive H (3 x n); rank 3 with NNR 3."""
    from enmf.matrix import rank
    while True:
        w = [[rng.randint(1, 7) for _ in range(3)] for _ in range(size)]
        h = [[rng.randint(0, 7) for _ in range(size)] for _ in range(3)]
        m = Matrix(w, f) @ Matrix(h, f)
        if rank(m) == 3 and all(any(x != 0 for x in m.col(j)) for j in range(size)):
            return m


def _scale(rng, data, f):
    rs = [rng.randint(1, 5) for _ in data]
    cs = [rng.randint(1, 5) for _ in data[0]]
    return Matrix([[f(x * rs[i] * cs[j]) if f.exact else float(x * rs[i] * cs[j])
                    for j, x in enumerate(row)] for i, row in enumerate(data)], f)


def planted_shear(rng, f, r=None, k=None, n=None):
    """``G`` (r x k, full rank) and ``B = G E0`` with ``E0 >= 0`` of rank r."""
    from enmf.matrix import rank
    r = r or rng.randint(2, 3)
    k = k or rng.randint(r, r + 2)
    n = n or rng.randint(r, 5)
    while True:
        g = Matrix([[rng.randint(-5, 5) for _ in range(k)] for _ in range(r)], f)
        w = Matrix([[rng.randint(0, 3) for _ in range(r)] for _ in range(k)], f)
        h = Matrix([[rng.randint(0, 3) for _ in range(n)] for _ in range(r)], f)
        e0 = w @ h
        if rank(g) == r and rank(e0) == r and rank(g @ e0) == r:
            return g, g @ e0, e0


def random_cope(rng, f, blocks=None, n=None, rank_hint=None):
    """Random valid A-form COPE with integer-rational entries."""
    blocks = blocks or [rng.randint(2, 3) for _ in range(rng.randint(1, 3))]
    n = n or rng.randint(2, 6)
    k = rank_hint or rng.randint(1, 4)
    cols = []
    # columns are mixtures of k extreme columns, giving rank <= k
    extremes = []
    for _ in range(k):
        col = []
        for h in blocks:
            w = [rng.randint(1, 6) for _ in range(h)]
            col += [Fraction(x, sum(w)) for x in w]
        extremes.append(col)
    for _ in range(n):
        mix = [rng.randint(0, 4) for _ in range(k)]
        if sum(mix) == 0:
            mix[0] = 1
        tot = sum(mix)
        cols.append([sum(Fraction(mix[t], tot) * extremes[t][i] for t in range(k))
                     for i in range(len(extremes[0]))])
    return validate_cope(Matrix.from_columns(cols, f), blocks)


def random_bounded_lp(rng, f):
    """Feasible (planted point) with positive costs, hence bounded."""
    m, n = rng.randint(1, 5), rng.randint(1, 5)
    a = [[rng.randint(-4, 5) for _ in range(n)] for _ in range(m)]
    x0 = [rng.randint(0, 3) for _ in range(n)]
    b = [sum(ai * xi for ai, xi in zip(row, x0)) - rng.randint(0, 3) for row in a]
    c = [rng.randint(1, 6) for _ in range(n)]
    return LinearProgram.build(c, Matrix(a, f), b), (c, a, b)
