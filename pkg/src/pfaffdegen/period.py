"""Batyrev's period series of a Calabi-Yau complete intersection in a toric Fano variety.

The relation cone ``L(B)`` of nonnegative integer relations among the rays
is handled in coordinates of a Hermite basis of the relation lattice.  The
period's ``s``-th coefficient sums, over the relations of degree ``s``, the
product over the partition groups ``J_i`` of multinomial coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb, factorial, prod
from typing import Sequence

from .fan import FaceFan, is_cartier
from .linalg import (
    IntegerMatrix,
    Vector,
    coordinates_in_basis,
    dot,
    integer_kernel_basis,
    hnf_rows,
    lattice_from_generators,
    rational_rank,
    solve_rational,
)
from .polytope import extreme_rays, h_polytope_points


class PeriodError(ValueError):
    pass


class NotPointedError(PeriodError):
    pass


class NoGradingError(PeriodError):
    pass


@dataclass(frozen=True)
class RayDecomposition:
    rays: tuple[Vector, ...]
    parts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        flat = sorted(i for p in self.parts for i in p)
        if flat != list(range(len(self.rays))) or any(not p for p in self.parts):
            raise PeriodError("J-sets must be nonempty, disjoint and cover every ray exactly once")


@dataclass(frozen=True)
class RelationCone:
    """``{x in Z^r : x @ basis >= 0}``, where the rows of ``basis`` span the relation lattice.

    For the cone of a ray configuration the ambient points are
    ``x @ basis in Z^k``.
    """

    k: int
    basis: tuple[Vector, ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    def to_ambient(self, x: Sequence[int]) -> Vector:
        return tuple(sum(xi * b[j] for xi, b in zip(x, self.basis)) for j in range(self.k))

    def to_coordinates(self, l: Sequence[int]) -> Vector:
        x = coordinates_in_basis(self.basis, l)
        if x is None:
            raise PeriodError(f"{tuple(l)} is not in the relation lattice")
        return x

    def contains(self, l: Sequence[int]) -> bool:
        return all(v >= 0 for v in l) and coordinates_in_basis(self.basis, l) is not None

    @property
    def constraints(self) -> list[Vector]:
        """Columns of the basis: the inequalities ``l_j >= 0`` in coordinates."""
        return [tuple(b[j] for b in self.basis) for j in range(self.k)]

    @property
    def is_pointed(self) -> bool:
        return rational_rank(self.constraints) == self.rank

    def extreme_rays(self) -> list[Vector]:
        if not self.is_pointed:
            raise NotPointedError("relation cone contains a line")
        return [r for r, _ in extreme_rays(self.constraints, self.rank)]

    @property
    def dim(self) -> int:
        rays = self.extreme_rays() if self.rank else []
        return rational_rank(rays) if rays else 0


@dataclass(frozen=True)
class HilbertBasisSet:
    cone: RelationCone
    generators: tuple[Vector, ...]  # ambient coordinates, sorted


@dataclass(frozen=True)
class GradingFunctional:
    """Rational functional on relation-lattice coordinates."""

    coefficients: tuple[Fraction, ...]

    def __call__(self, x: Sequence[int]) -> Fraction:
        return sum((c * xi for c, xi in zip(self.coefficients, x)), Fraction(0))


@dataclass(frozen=True)
class SpecializationRelations:
    vectors: tuple[Vector, ...]


@dataclass(frozen=True)
class PeriodSeries:
    coefficients: tuple[int, ...]

    def __getitem__(self, s: int) -> int:
        return self.coefficients[s]

    def __len__(self) -> int:
        return len(self.coefficients)


# ---------------------------------------------------------------------------
# cone and lattice points


def relation_cone(rays: Sequence[Sequence[int]]) -> RelationCone:
    rays = [tuple(r) for r in rays]
    if not rays:
        raise PeriodError("no rays")
    n = len(rays[0])
    if rational_rank(rays) < n:
        raise PeriodError("rays do not span the lattice rationally")
    kernel = integer_kernel_basis(IntegerMatrix.from_columns(rays))
    return RelationCone(len(rays), kernel.basis)


def cone_from_inequalities(inequalities: Sequence[Sequence[int]], dim: int) -> RelationCone:
    """The cone ``{x in Z^dim : a . x >= 0}`` viewed through the identity basis.

    Ambient points are then the inequality values ``(a . x)_a``; the basis
    is brought to Hermite form, which only reparametrises ``x``.
    """
    if rational_rank(inequalities) < dim:
        raise NotPointedError("cone contains a line")
    rows = [tuple(a[i] for a in inequalities) for i in range(dim)]
    return RelationCone(len(inequalities), hnf_rows(rows, len(inequalities)))


def box_points(c: RelationCone, upper: Sequence[int]) -> list[Vector]:
    """Coordinates ``x`` with ``0 <= (x @ basis)_j <= upper_j`` for every j.

    The basis must be in row echelon form: each coordinate is then pinned
    to a finite range by its own pivot column.
    """
    r, k = c.rank, c.k
    b = c.basis
    pivots = []
    for row in b:
        p = next(j for j, v in enumerate(row) if v)
        if row[p] < 0 or (pivots and p <= pivots[-1]):
            raise PeriodError("box enumeration needs an echelon basis with positive pivots")
        pivots.append(p)
    last = [max((i for i in range(r) if b[i][j]), default=-1) for j in range(k)]
    closing = [[j for j in range(k) if last[j] == i] for i in range(r)]
    if any(last[j] == -1 and upper[j] < 0 for j in range(k)):
        return []
    out: list[Vector] = []
    x = [0] * r

    def rec(i, partial):
        if i == r:
            out.append(tuple(x))
            return
        p, a = pivots[i], b[i][pivots[i]]
        lo = -(partial[p] // a)
        hi = (upper[p] - partial[p]) // a
        row = b[i]
        for v in range(lo, hi + 1):
            nxt = [q + v * c_ for q, c_ in zip(partial, row)]
            if all(0 <= nxt[j] <= upper[j] for j in closing[i]):
                x[i] = v
                rec(i + 1, nxt)

    rec(0, [0] * k)
    return out


def hilbert_basis(c: RelationCone) -> HilbertBasisSet:
    """Minimal generators of the semigroup of lattice points of a pointed cone.

    Every generator lies in the zonotope spanned by the extreme rays, so
    the candidates are the cone points bounded coordinatewise by the sum of
    the extreme rays.  Scanning candidates by increasing total, a point is
    kept iff subtracting no smaller kept point stays in the cone.
    """
    rays = [c.to_ambient(x) for x in c.extreme_rays()]
    upper = [sum(col) for col in zip(*rays)] if rays else [0] * c.k
    candidates = [c.to_ambient(x) for x in box_points(c, upper)]
    candidates = sorted((l for l in candidates if any(l)), key=lambda l: (sum(l), l))
    found: list[Vector] = []
    for l in candidates:
        # l - h is in the lattice, so it is in the cone iff it is nonnegative
        if not any(all(a >= b for a, b in zip(l, h)) for h in found):
            found.append(l)
    return HilbertBasisSet(c, tuple(sorted(found)))


def grading_functional(h: HilbertBasisSet) -> GradingFunctional:
    """``lambda`` with ``lambda(f) = 1`` on every generator, unique on their span."""
    if not h.generators:
        raise NoGradingError("empty Hilbert basis")
    c = h.cone
    coords = [c.to_coordinates(f) for f in h.generators]
    # lambda = sum mu_i x_i with mu in the row span of the generator coordinates
    span = lattice_from_generators(coords, c.rank).basis
    gram = [[dot(f, s) for s in span] for f in coords]
    nu = solve_rational(gram, [1] * len(coords), len(span))
    if nu is None:
        raise NoGradingError("no uniform grading: generators cannot all sit at level 1")
    mu = tuple(sum((w * s[i] for w, s in zip(nu, span)), Fraction(0)) for i in range(c.rank))
    return GradingFunctional(mu)


def level_points(c: RelationCone, lam: GradingFunctional, s: int) -> list[Vector]:
    """Cone points ``l`` (ambient coordinates) with ``lambda(l) = s``, sorted.

    The level set is a lattice polytope slice: it is parametrised by the
    degree-zero sublattice of ``lambda`` around one integral point, bounded
    by the slice vertices (scaled extreme rays), and scanned with the
    interval-pruned enumerator.
    """
    if s < 0:
        raise ValueError("level must be nonnegative")
    q = 1
    for x in lam.coefficients:
        q = q * x.denominator // _gcd(q, x.denominator)
    cvec = [int(x * q) for x in lam.coefficients]
    g = _content(cvec)
    target = s * q
    if target % g:
        return []
    cvec = [x // g for x in cvec]
    target //= g
    rays = c.extreme_rays()
    if any(dot(cvec, r) <= 0 for r in rays):
        raise NoGradingError("grading is not positive on the cone")
    x0 = _particular_solution(cvec, target)
    h = integer_kernel_basis(IntegerMatrix([cvec])).basis
    cons = c.constraints
    normals = [tuple(dot(a, hv) for hv in h) for a in cons]
    offsets = [dot(a, x0) for a in cons]
    if not h:
        pts = [()] if all(o >= 0 for o in offsets) else []
    else:
        verts = []
        for r in rays:
            v = [Fraction(target * x, dot(cvec, r)) - y for x, y in zip(r, x0)]
            t = solve_rational([tuple(hv[i] for hv in h) for i in range(c.rank)], v, len(h))
            verts.append(t)
        lo = [_ceil(min(t[i] for t in verts)) for i in range(len(h))]
        hi = [_floor(max(t[i] for t in verts)) for i in range(len(h))]
        pts = h_polytope_points(normals, offsets, lo, hi)
    base = c.to_ambient(x0)
    dirs = [c.to_ambient(hv) for hv in h]
    out = []
    for t in pts:
        l = base
        for ti, d in zip(t, dirs):
            if ti:
                l = [a + ti * b for a, b in zip(l, d)]
        out.append(tuple(l))
    return sorted(out)


def level_points_bruteforce(c: RelationCone, lam: GradingFunctional, s: int, bound: Sequence[int]) -> list[Vector]:
    """Oracle: scan the coordinate box ``[0, bound]`` and filter by level."""
    pts = [x for x in box_points(c, bound) if lam(x) == s]
    return sorted(c.to_ambient(x) for x in pts)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def _content(v):
    g = 0
    for x in v:
        g = _gcd(g, x)
    return g


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _floor(x: Fraction) -> int:
    return x.numerator // x.denominator


def _particular_solution(c: Sequence[int], target: int) -> list[int]:
    """Integer ``x`` with ``c . x = target`` for a primitive row ``c``."""
    # extended Euclid, folding in one coordinate at a time
    x = [0] * len(c)
    g, coeffs = 0, []
    for i, a in enumerate(c):
        if a == 0:
            coeffs.append(0)
            continue
        if g == 0:
            g, coeffs = a, [0] * i + [1]
            continue
        u, v, g2 = _ext_gcd(g, a)
        coeffs = [u * w for w in coeffs] + [v]
        g = g2
    if g < 0:
        g, coeffs = -g, [-w for w in coeffs]
    coeffs += [0] * (len(c) - len(coeffs))
    for i, w in enumerate(coeffs):
        x[i] = w * (target // g)
    return x


def _ext_gcd(a, b):
    """``(u, v, g)`` with ``u a + v b = g = gcd(a, b)``."""
    u0, v0, u1, v1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    return u0, v0, a


# ---------------------------------------------------------------------------
# period coefficients


def period_term(parts: Sequence[Sequence[int]], l: Sequence[int], fact: Sequence[int] | None = None) -> int:
    """``prod_i (sum_{j in J_i} l_j)! / prod_j l_j!``; ``fact`` is an optional factorial table."""
    if fact is None:
        fact = [factorial(n) for n in range(sum(l) + 1)]
    num = prod(fact[sum(l[j] for j in p)] for p in parts)
    den = prod(fact[x] for x in l)
    q, r = divmod(num, den)
    if r:
        raise PeriodError(f"non-integral period term at {tuple(l)}")
    return q


def period_coefficient(d: RayDecomposition, c: RelationCone, lam: GradingFunctional, s: int, fact: list[int] | None = None) -> int:
    """``a_s``; ``fact`` is a factorial table extended in place as needed."""
    if fact is None:
        fact = [1]
    pts = level_points(c, lam, s)
    top = max((sum(l) for l in pts), default=0)
    while len(fact) <= top:
        fact.append(fact[-1] * len(fact))
    return sum(period_term(d.parts, l, fact) for l in pts)


def period_coefficients(d: RayDecomposition, c: RelationCone, lam: GradingFunctional, s_max: int) -> PeriodSeries:
    if s_max < 0:
        raise ValueError("s_max must be nonnegative")
    fact = [1]
    return PeriodSeries(tuple(period_coefficient(d, c, lam, s, fact) for s in range(s_max + 1)))


# ---------------------------------------------------------------------------
# closed forms


def _multinomial(*ks: int) -> int:
    out, total = 1, 0
    for k in ks:
        if k < 0:
            return 0
        total += k
        out *= comb(total, k)
    return out


def _c(n: int, k: int) -> int:
    return comb(n, k) if 0 <= k <= n else 0


def _x5(s: int) -> int:
    total = 0
    for n, o, p in ((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)):
        rest = s - n - o - p
        for k in range(rest + 1):
            for l in range(rest - k + 1):
                m = rest - k - l
                total += (
                    _c(2 * s, 2 * k + n + o)
                    * _c(2 * s, 2 * m + o + p)
                    * _multinomial(2 * m + o + p, 2 * l + n + p, n + o + 2 * k)
                )
    return _c(2 * s, s) ** 2 * total


def _x7(s: int) -> int:
    total = 0
    for k in range(s + 1):
        for l in range(s - k + 1):
            for m in range(s - k - l + 1):
                n = s - k - l - m
                if k * n:
                    continue
                total += _c(2 * s, m + n) * _multinomial(s, k + m, l + n) * _multinomial(2 * k + l + m, m + n, l + n)
    return _c(2 * s, s) * total


def _x10(s: int) -> int:
    total = 0
    for k in range(s + 1):
        for l in range(s - k + 1):
            m = s - k - l
            total += _c(2 * s, k + m) * _c(2 * s, m) ** 2 * _c(2 * s - m, k) * _c(2 * s - k - m, l)
    return _c(2 * s, s) * total


def _block25_terms(s: int) -> list[int]:
    return [
        _c(s, k) * _c(s, m) * _multinomial(k, s - k - m, m)
        for k in range(s + 1)
        for m in range(s - k + 1)
    ]


def _x25(s: int) -> int:
    # the double sum over both blocks, evaluated term by term
    terms = _block25_terms(s)
    return sum(a * b for a in terms for b in terms)


def b25(s: int) -> int:
    """Single-block sum ``sum_{k+l+m=s} C(s,k) C(s,m) s!/(k! l! m!)``."""
    return sum(_block25_terms(s))


CLOSED_FORMS = {"X5": _x5, "X7": _x7, "X10": _x10, "X25": _x25}


def closed_form_oracle(family: str, s: int) -> int:
    try:
        f = CLOSED_FORMS[family.upper()]
    except KeyError:
        raise PeriodError(f"no closed form for {family}") from None
    if s < 0:
        raise ValueError("s must be nonnegative")
    return f(s)


def hadamard_square_check(series: Sequence[int], s_max: int) -> bool:
    """``a_s == b_s^2`` for ``s <= s_max`` with ``b`` the single-block sum."""
    if len(series) <= s_max:
        raise PeriodError("series shorter than s_max")
    return all(series[s] == b25(s) ** 2 for s in range(s_max + 1))


def hadamard_extension(s_max: int) -> PeriodSeries:
    """X25 period from the squared single-block sums."""
    return PeriodSeries(tuple(b25(s) ** 2 for s in range(s_max + 1)))


# ---------------------------------------------------------------------------
# specialization and partitions


def check_specialization(rels: SpecializationRelations, h: HilbertBasisSet) -> bool:
    """All generator differences lie in the lattice spanned by ``rels``."""
    gens = h.generators
    if len(gens) < 2:
        return True
    if not rels.vectors:
        return all(g == gens[0] for g in gens)
    k = len(gens[0])
    lat = lattice_from_generators(rels.vectors, k)
    return all(
        coordinates_in_basis(lat.basis, [a - b for a, b in zip(f, gens[0])]) is not None for f in gens[1:]
    )


def find_j_partition(fan: FaceFan, cutting_degrees: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    """First partition of the rays into Cartier groups ``J_i`` of class ``(d_i / index) (-K)``.

    The anticanonical class is the sum of all ray divisors; classes are
    compared through their pairings with a basis of the relation lattice.
    Groups are searched in increasing lexicographic order, each containing
    the smallest ray not covered yet, so the result is deterministic.
    """
    k = len(fan.rays)
    index = sum(cutting_degrees)
    rels = relation_cone(fan.rays).basis
    anti = [sum(r) for r in rels]
    cache: dict[int, list[tuple[int, ...]]] = {}

    def groups(deg):
        if deg not in cache:
            out = []
            for size in range(1, k + 1):
                for g in combinations(range(k), size):
                    if all(index * sum(r[j] for j in g) == deg * a for r, a in zip(rels, anti)):
                        values = [1 if j in g else 0 for j in range(k)]
                        if is_cartier(fan, values):
                            out.append(g)
            cache[deg] = out
        return cache[deg]

    degrees = sorted(cutting_degrees)

    def search(covered, remaining):
        if not remaining:
            return [] if covered == (1 << k) - 1 else None
        first = next(j for j in range(k) if not covered >> j & 1)
        tried = set()
        for i, deg in enumerate(remaining):
            if deg in tried:
                continue
            tried.add(deg)
            for g in groups(deg):
                if g[0] != first:
                    continue
                mask = sum(1 << j for j in g)
                if mask & covered:
                    continue
                rest = search(covered | mask, remaining[:i] + remaining[i + 1:])
                if rest is not None:
                    return [g] + rest
        return None

    found = search(0, degrees)
    if found is None:
        raise PeriodError("no partition of the rays into Cartier divisors of the required classes")
    return tuple(found)
