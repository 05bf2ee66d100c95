"""Independent reference implementations used only by the tests.

Each oracle avoids the package's own algorithms: minors instead of row
reduction, Qhull instead of double description, plain boxes instead of
pruned enumeration.
"""

from __future__ import annotations

import itertools
from math import gcd

import numpy as np
from scipy.spatial import ConvexHull


def det(m):
    """Laplace expansion along the first row."""
    n = len(m)
    if n == 0:
        return 1
    if n == 1:
        return m[0][0]
    total = 0
    for j in range(n):
        if m[0][j]:
            minor = [row[:j] + row[j + 1:] for row in m[1:]]
            total += (-1) ** j * m[0][j] * det(minor)
    return total


def determinantal_divisors(m):
    """``d_k`` = gcd of all k x k minors, for k = 1 .. rank."""
    rows, cols = len(m), len(m[0]) if m else 0
    out = []
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for ri in itertools.combinations(range(rows), k):
            for ci in itertools.combinations(range(cols), k):
                g = gcd(g, det([[m[i][j] for j in ci] for i in ri]))
        if g == 0:
            break
        out.append(g)
    return out


def invariant_factors(m):
    """Smith invariants from the determinantal divisors, zeros appended."""
    d = determinantal_divisors(m)
    facs = [d[0]] + [d[i] // d[i - 1] for i in range(1, len(d))] if d else []
    n = min(len(m), len(m[0]) if m else 0)
    return tuple(facs) + (0,) * (n - len(facs))


def grid_scan_count(vertices, k):
    """Lattice points of ``k * conv(vertices)`` by testing every box point against Qhull facets."""
    pts = np.array(vertices, dtype=float) * k
    hull = ConvexHull(pts)
    lo = np.floor(pts.min(axis=0)).astype(int)
    hi = np.ceil(pts.max(axis=0)).astype(int)
    count = 0
    for p in itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)]):
        x = np.array(p, dtype=float)
        if np.all(hull.equations[:, :-1] @ x + hull.equations[:, -1] <= 1e-9):
            count += 1
    return count


def _primitive(v):
    g = 0
    for x in v:
        g = gcd(g, x)
    return tuple(x // g for x in v) if g else tuple(v)


def supporting_normals(gens):
    """All primitive normals through ``dim - 1`` generators that keep every generator on one side."""
    d = len(gens[0])
    if d == 1:
        return [(1,)] if all(g[0] >= 0 for g in gens) else [(-1,)] if all(g[0] <= 0 for g in gens) else []
    cands = set()
    for sub in itertools.combinations(gens, d - 1):
        if d == 2:
            (a, b), = sub
            n = (-b, a)
        else:
            (a1, a2, a3), (b1, b2, b3) = sub
            n = (a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1)
        if any(n):
            cands.add(_primitive(n))
            cands.add(_primitive(tuple(-x for x in n)))
    return sorted(n for n in cands if all(sum(a * b for a, b in zip(n, g)) >= 0 for g in gens))


def brute_hilbert_basis(gens):
    """Hilbert basis of ``cone(gens)`` in dimension <= 3 by exhaustive reduction.

    Returns ``(normals, basis)``: supporting normals describing the cone
    and the irreducible points; the cone must be full-dimensional and
    pointed.  Every Hilbert basis element lies in the zonotope of the
    primitive generators, so ``phi <= C`` bounds the search, ``phi`` being
    the sum of the normals.
    """
    d = len(gens[0])
    normals = supporting_normals(gens)
    rays = [_primitive(g) for g in gens]
    phi = tuple(sum(col) for col in zip(*normals))
    val = lambda x: sum(a * b for a, b in zip(phi, x))  # noqa: E731
    cap = sum(val(r) for r in rays)
    bound = max(-(-cap * abs(x) // val(r)) for r in rays for x in r)
    inside = lambda x: all(sum(a * b for a, b in zip(n, x)) >= 0 for n in normals)  # noqa: E731
    pts = [x for x in itertools.product(range(-bound, bound + 1), repeat=d) if any(x) and inside(x) and val(x) <= cap]
    pts.sort(key=val)
    basis = []
    for x in pts:
        vx = val(x)
        if not any(
            val(y) < vx and inside(tuple(a - b for a, b in zip(x, y))) for y in pts if val(y) < vx
        ):
            basis.append(x)
    return normals, basis


def kernel_box(rays, bound):
    """Nonnegative relations ``sum l_j rays_j = 0`` with ``l_j <= bound_j``."""
    k, n = len(rays), len(rays[0])
    out = []
    for l in itertools.product(*[range(b + 1) for b in bound]):
        if all(sum(l[j] * rays[j][i] for j in range(k)) == 0 for i in range(n)):
            out.append(l)
    return out


def kernel_box_split(rays, bound):
    """Same output as :func:`kernel_box`, by meeting in the middle.

    Both halves of the ray list are scanned over their full boxes and
    matched on opposite partial sums.
    """
    k, n = len(rays), len(rays[0])
    h = k // 2

    def sums(idx):
        table = {}
        for l in itertools.product(*[range(bound[j] + 1) for j in idx]):
            v = tuple(sum(c * rays[j][i] for c, j in zip(l, idx)) for i in range(n))
            table.setdefault(v, []).append(l)
        return table

    left = sums(list(range(h)))
    right = sums(list(range(h, k)))
    out = []
    for v, ls in left.items():
        for r in right.get(tuple(-x for x in v), ()):
            out.extend(a + r for a in ls)
    return sorted(out)
