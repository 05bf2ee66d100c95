"""Lattice polytopes: facets, polar duality, lattice points, normal form.

Facets are computed with the double description method on the
homogenised cone; lattice points with a depth-first coordinate sweep whose
per-coordinate bounds come from interval arithmetic over the facet
inequalities, so no LP solver is involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor
from typing import Iterable, Sequence

from .linalg import (
    IntegerMatrix,
    Vector,
    dot,
    hermite_normal_form,
    lattice_from_generators,
    primitive,
    rational_rank,
    saturate_lattice,
    solve_rational,
)


class DegeneratePolytopeError(ValueError):
    """The polytope is not full-dimensional."""


class OriginNotInteriorError(ValueError):
    """An operation needs the origin in the interior of the polytope."""


class NotReflexiveError(ValueError):
    pass


# ---------------------------------------------------------------------------
# double description


def extreme_rays(constraints: Sequence[Sequence[int]], dim: int) -> list[tuple[Vector, int]]:
    """Extreme rays of the pointed cone ``{y : a . y >= 0 for a in constraints}``.

    Returns ``(ray, tight)`` pairs where ``ray`` is a primitive integer vector
    and ``tight`` is a bitmask of the constraints vanishing on it.  The
    constraint matrix must have rank ``dim``.
    """
    rows = [tuple(int(x) for x in a) for a in constraints]
    basis: list[int] = []
    for i, a in enumerate(rows):
        if rational_rank([rows[j] for j in basis] + [a]) > len(basis):
            basis.append(i)
            if len(basis) == dim:
                break
    if len(basis) < dim:
        raise ValueError("cone is not pointed (constraint rank below dimension)")

    sub = [rows[i] for i in basis]
    rays: list[tuple[Vector, int]] = []
    for k in range(dim):
        sol = solve_rational(sub, [int(k == j) for j in range(dim)], dim)
        den = 1
        for x in sol:
            den = den * x.denominator // _gcd(den, x.denominator)
        ray = primitive([int(x * den) for x in sol])
        rays.append((ray, _tight_mask(rows, ray, basis)))

    done = set(basis)
    for i, a in enumerate(rows):
        if i in done:
            continue
        bit = 1 << i
        pos, neg, zero = [], [], []
        for ray, tight in rays:
            v = dot(a, ray)
            if v > 0:
                pos.append((ray, tight, v))
            elif v < 0:
                neg.append((ray, tight, v))
            else:
                zero.append((ray, tight | bit))
        new = [(r, t) for r, t, _ in pos] + zero
        if neg:
            masks = [t for _, t in rays]
            for rp, tp, vp in pos:
                for rn, tn, vn in neg:
                    common = tp & tn
                    if bin(common).count("1") < dim - 2:
                        continue
                    if any((common & t) == common and t != tp and t != tn for t in masks):
                        continue
                    ray = primitive([vp * y - vn * x for x, y in zip(rp, rn)])
                    new.append((ray, common | bit))
        rays = new
    return sorted(rays)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _tight_mask(rows, ray, indices) -> int:
    mask = 0
    for i in indices:
        if dot(rows[i], ray) == 0:
            mask |= 1 << i
    return mask


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class Facet:
    """Inequality ``<normal, x> >= -offset`` with a primitive normal."""

    normal: Vector
    offset: int


@dataclass(frozen=True)
class FacetSystem:
    inequalities: tuple[Facet, ...]

    def __iter__(self):
        return iter(self.inequalities)

    def __len__(self):
        return len(self.inequalities)

    def contains(self, x: Sequence[int]) -> bool:
        return all(dot(f.normal, x) + f.offset >= 0 for f in self.inequalities)


@dataclass(frozen=True, eq=False)
class LatticePolytope:
    """Convex hull of integer points, stored by its vertices.

    Redundant input points are removed when the hull is full-dimensional.
    """

    vertices: tuple[Vector, ...]
    dim: int
    _facets: FacetSystem | None = field(default=None, repr=False, compare=False)

    def __init__(self, points: Iterable[Sequence[int]], *, _facets: FacetSystem | None = None):
        pts = sorted({tuple(int(x) for x in p) for p in points})
        if not pts:
            raise ValueError("empty polytope")
        d = len(pts[0])
        if any(len(p) != d for p in pts):
            raise ValueError("points of mixed dimension")
        object.__setattr__(self, "dim", d)
        object.__setattr__(self, "_facets", _facets)
        if _facets is None and affine_rank(pts) == d:
            fs = _facets_of_points(pts)
            object.__setattr__(self, "_facets", fs)
            pts = [p for p in pts if _is_vertex(p, fs, d)]
        object.__setattr__(self, "vertices", tuple(pts))

    @property
    def is_full_dimensional(self) -> bool:
        return affine_rank(self.vertices) == self.dim

    def __eq__(self, other):
        return isinstance(other, LatticePolytope) and set(self.vertices) == set(other.vertices)

    def __hash__(self):
        return hash(frozenset(self.vertices))

    def dilate(self, k: int) -> "LatticePolytope":
        return LatticePolytope([tuple(k * x for x in v) for v in self.vertices])

    def transform(self, u: IntegerMatrix) -> "LatticePolytope":
        return LatticePolytope([u.apply(v) for v in self.vertices])


@dataclass(frozen=True)
class RationalPolytope:
    """Polar dual with at least one non-integral vertex."""

    vertices: tuple[tuple[Fraction, ...], ...]
    inequalities: tuple[Facet, ...]

    @property
    def rational_vertices(self):
        return [v for v in self.vertices if any(x.denominator != 1 for x in v)]


@dataclass(frozen=True)
class PolytopeNormalForm:
    """Canonical vertex matrix; equal for lattice-equivalent polytopes."""

    matrix: tuple[tuple[int, ...], ...]
    ordering: str = "min row-HNF over refined vertex orderings"


def affine_rank(points: Sequence[Sequence[int]]) -> int:
    if len(points) <= 1:
        return 0
    p0 = points[0]
    return rational_rank([tuple(a - b for a, b in zip(p, p0)) for p in points[1:]])


def _facets_of_points(pts: Sequence[Vector]) -> FacetSystem:
    d = len(pts[0])
    cone = [tuple(p) + (1,) for p in pts]
    facets = []
    for ray, _ in extreme_rays(cone, d + 1):
        normal = primitive(ray[:d])
        offset = -min(dot(normal, p) for p in pts)
        facets.append(Facet(normal, offset))
    return FacetSystem(tuple(sorted(set(facets), key=lambda f: (f.normal, f.offset))))


def _is_vertex(p, fs: FacetSystem, d: int) -> bool:
    tight = [f.normal for f in fs if dot(f.normal, p) + f.offset == 0]
    return rational_rank(tight) == d if tight else False


# ---------------------------------------------------------------------------
# operations


def facet_enumeration(p: LatticePolytope) -> FacetSystem:
    """Exact H-representation of a full-dimensional lattice polytope."""
    if p._facets is None:
        raise DegeneratePolytopeError(
            f"polytope has affine dimension {affine_rank(p.vertices)} < {p.dim}"
        )
    return p._facets


def _require_interior_origin(p: LatticePolytope) -> FacetSystem:
    fs = facet_enumeration(p)
    if any(f.offset <= 0 for f in fs):
        raise OriginNotInteriorError("origin is not an interior point")
    return fs


def polar_dual(p: LatticePolytope) -> LatticePolytope | RationalPolytope:
    """Polar ``{y : <y, x> >= -1 for all x in p}``.

    Returns a :class:`LatticePolytope` when every dual vertex is integral
    and a :class:`RationalPolytope` otherwise.
    """
    fs = _require_interior_origin(p)
    verts = [tuple(Fraction(a, f.offset) for a in f.normal) for f in fs]
    if all(x.denominator == 1 for v in verts for x in v):
        ivs = [tuple(int(x) for x in v) for v in verts]
        ineqs = []
        for v in p.vertices:
            n = primitive(v)
            ineqs.append(Facet(n, -min(dot(n, y) for y in ivs)))
        known = FacetSystem(tuple(sorted(set(ineqs), key=lambda f: (f.normal, f.offset))))
        return LatticePolytope(ivs, _facets=known)
    ineqs = tuple(Facet(primitive(v), 0) for v in p.vertices)
    return RationalPolytope(tuple(sorted(verts)), ineqs)


def is_reflexive(p: LatticePolytope) -> bool:
    """Every facet sits at lattice distance one from the origin."""
    fs = _require_interior_origin(p)
    return all(f.offset == 1 for f in fs)


def _bounding_box(vertices) -> tuple[list[int], list[int]]:
    d = len(vertices[0])
    lo = [ceil(min(v[i] for v in vertices)) for i in range(d)]
    hi = [floor(max(v[i] for v in vertices)) for i in range(d)]
    return lo, hi


def h_polytope_points(normals, offsets, lo, hi, count: bool = False):
    """Integer points of ``{x : n . x + o >= 0}`` inside the box ``[lo, hi]``.

    Coordinates are fixed left to right.  Bounds for the next coordinate
    come from each inequality with the unfixed coordinates replaced by
    their best case over the box, so the sweep never leaves the polytope's
    projection by more than the box slack.  With ``count=True`` the number
    of points is returned instead, using memoisation on the slack vector.
    Points are produced in lexicographic order.
    """
    d = len(lo)
    m = len(normals)
    if any(hi[i] < lo[i] for i in range(d)):
        return 0 if count else []
    for n, o in zip(normals, offsets):
        if not any(n) and o < 0:
            return 0 if count else []
    # suffix[i][r] = best case of sum_{j >= i} n_rj x_j over the box
    suffix = [[0] * m for _ in range(d + 1)]
    for i in range(d - 1, -1, -1):
        for r, n in enumerate(normals):
            a = n[i]
            suffix[i][r] = suffix[i + 1][r] + (a * hi[i] if a > 0 else a * lo[i])
    active = []
    for i in range(d):
        active.append([r for r, n in enumerate(normals) if any(n[j] for j in range(i, d))])
    coef = [[(r, normals[r][i]) for r in active[i]] for i in range(d)]

    def interval(i, partial):
        a_lo, a_hi = lo[i], hi[i]
        rest = suffix[i + 1]
        for r, a in coef[i]:
            need = -partial[r] - rest[r]
            if a > 0:
                b = -((-need) // a)
                if b > a_lo:
                    a_lo = b
            elif a < 0:
                b = need // a
                if b < a_hi:
                    a_hi = b
            elif need > 0:
                return 1, 0
        return a_lo, a_hi

    if count:
        memo: dict = {}

        def rec_count(i, partial):
            if i == d:
                return 1
            key = (i, tuple(partial[r] for r in active[i]))
            hit = memo.get(key)
            if hit is not None:
                return hit
            a_lo, a_hi = interval(i, partial)
            if i == d - 1:
                total = max(0, a_hi - a_lo + 1)
            else:
                total = 0
                col = [n[i] for n in normals]
                for x in range(a_lo, a_hi + 1):
                    total += rec_count(i + 1, [p + c * x for p, c in zip(partial, col)])
            memo[key] = total
            return total

        return rec_count(0, list(offsets))

    out: list[Vector] = []
    point = [0] * d

    def rec(i, partial):
        if i == d:
            out.append(tuple(point))
            return
        a_lo, a_hi = interval(i, partial)
        col = [n[i] for n in normals]
        for x in range(a_lo, a_hi + 1):
            point[i] = x
            rec(i + 1, [p + c * x for p, c in zip(partial, col)])

    rec(0, list(offsets))
    return out


def _affine_chart(p: LatticePolytope):
    """Lattice chart ``x = base + B t`` of the affine hull of a lower-dim polytope."""
    base = p.vertices[0]
    diffs = [tuple(a - b for a, b in zip(v, base)) for v in p.vertices[1:]]
    sat = saturate_lattice(lattice_from_generators(diffs, p.dim))
    basis = sat.basis
    coords = []
    cols = list(zip(*basis))
    for v in p.vertices:
        sol = solve_rational(cols, [a - b for a, b in zip(v, base)], len(basis))
        coords.append(tuple(int(x) for x in sol))
    return base, basis, coords


def lattice_points(p: LatticePolytope) -> list[Vector]:
    """All integer points of ``conv(p)``, sorted lexicographically."""
    if not p.is_full_dimensional:
        if len(p.vertices) == 1:
            return [p.vertices[0]]
        base, basis, coords = _affine_chart(p)
        inner = lattice_points(LatticePolytope(coords))
        pts = [tuple(b + sum(t * v[i] for t, v in zip(tp, basis)) for i, b in enumerate(base)) for tp in inner]
        return sorted(pts)
    fs = facet_enumeration(p)
    lo, hi = _bounding_box(p.vertices)
    return h_polytope_points([f.normal for f in fs], [f.offset for f in fs], lo, hi)


def is_terminal_fano_polytope(p: LatticePolytope) -> bool:
    """Only lattice points are the vertices and the origin (reflexive input)."""
    if not is_reflexive(p):
        raise NotReflexiveError("terminality test expects a reflexive polytope")
    origin = (0,) * p.dim
    return set(lattice_points(p)) == set(p.vertices) | {origin}


def ehrhart_count(p: LatticePolytope, k: int) -> int:
    """Number of integer points of the dilate ``k * p``."""
    if k < 0:
        raise ValueError("dilation factor must be nonnegative")
    if k == 0:
        return 1
    if not p.is_full_dimensional:
        return len(lattice_points(p.dilate(k)))
    fs = facet_enumeration(p)
    lo, hi = _bounding_box([[k * x for x in v] for v in p.vertices])
    return h_polytope_points([f.normal for f in fs], [k * f.offset for f in fs], lo, hi, count=True)


# ---------------------------------------------------------------------------
# normal form


def _refine(pm, vcol, fcol):
    """Colour refinement on the vertex/facet pairing matrix."""
    nf, nv = len(pm), len(pm[0])
    while True:
        fsig = [(fcol[f], tuple(sorted((pm[f][v], vcol[v]) for v in range(nv)))) for f in range(nf)]
        frank = {s: i for i, s in enumerate(sorted(set(fsig)))}
        new_f = [frank[s] for s in fsig]
        vsig = [(vcol[v], tuple(sorted((pm[f][v], new_f[f]) for f in range(nf)))) for v in range(nv)]
        vrank = {s: i for i, s in enumerate(sorted(set(vsig)))}
        new_v = [vrank[s] for s in vsig]
        if len(vrank) == len(set(vcol)) and len(frank) == len(set(fcol)):
            return new_v, new_f
        vcol, fcol = new_v, new_f


def _leaf_orderings(pm):
    nv = len(pm[0])
    vcol, fcol = _refine(pm, [0] * nv, [0] * len(pm))
    stack = [(vcol, fcol)]
    while stack:
        vcol, fcol = stack.pop()
        if len(set(vcol)) == nv:
            yield sorted(range(nv), key=lambda v: vcol[v])
            continue
        cells: dict[int, list[int]] = {}
        for v, c in enumerate(vcol):
            cells.setdefault(c, []).append(v)
        target = min(c for c, mem in cells.items() if len(mem) > 1)
        for v in cells[target]:
            # split the cell: v first, rest after, everything else keeps order
            nvcol = [2 * c + (0 if (u == v or c != target) else 1) for u, c in enumerate(vcol)]
            stack.append(_refine(pm, nvcol, fcol))


def normal_form(p: LatticePolytope) -> PolytopeNormalForm:
    """Canonical form under GL(n, Z) and vertex permutations.

    The vertex/facet pairing matrix is invariant under unimodular maps, so
    an equivariant colour refinement plus individualisation yields a set
    of vertex orderings that is an orbit invariant.  For each ordering the
    row Hermite form of the vertex matrix removes the GL(n, Z) freedom;
    the lexicographically smallest one is the normal form.
    """
    fs = facet_enumeration(p)
    verts = p.vertices
    pm = [[dot(f.normal, v) + f.offset for v in verts] for f in fs]
    best = None
    for order in _leaf_orderings(pm):
        cols = [verts[i] for i in order]
        h, _ = hermite_normal_form(IntegerMatrix.from_columns(cols))
        key = h.entries
        if best is None or key < best:
            best = key
    return PolytopeNormalForm(best)
