"""Weighted 5x5 skew matrices, their Pfaffian ideals and binomial degenerations."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Mapping, Sequence

from .linalg import (
    SublatticeBasis,
    Vector,
    dot,
    integer_kernel_basis,
    IntegerMatrix,
    lattice_from_generators,
    lattice_index,
    orthogonal_lattice,
    primitive,
    solve_rational,
)
from .polytope import LatticePolytope, extreme_rays

PAIRS = tuple(combinations(range(1, 6), 2))
CORNERS = ((1, 2), (4, 5))
COORDINATE = "coordinate"
GENERAL = "general-polynomial"


class DegreeTableError(ValueError):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class NotBinomialError(ValueError):
    pass


class FamilyError(ValueError):
    pass


@dataclass(frozen=True)
class WeightedSkewMatrix:
    """Upper triangle of a 5x5 skew matrix with weighted degrees.

    ``entries[(i, j)]`` names the ambient coordinate sitting at position
    ``(i, j)`` (1-based); general-polynomial entries carry a symbolic name
    and may only sit at the corners.
    """

    degrees: Mapping[tuple[int, int], int]
    entries: Mapping[tuple[int, int], str]
    kinds: Mapping[tuple[int, int], str] = field(default_factory=dict)
    corners: tuple[tuple[int, int], ...] = CORNERS

    def __post_init__(self):
        if set(self.degrees) != set(PAIRS) or set(self.entries) != set(PAIRS):
            raise DegreeTableError("degree table and entries must cover all ten pairs i<j")
        for pair in PAIRS:
            if self.kind(pair) == GENERAL and pair not in self.corners:
                raise FamilyError(f"general-polynomial entry at non-corner position {pair}")

    def kind(self, pair) -> str:
        return self.kinds.get(pair, COORDINATE)

    def entry(self, i: int, j: int) -> str:
        return self.entries[(i, j)] if i < j else self.entries[(j, i)]

    @classmethod
    def from_rows(cls, degree_rows, entry_rows, general=(), corners=CORNERS):
        """Build from upper-triangular row lists (row i lists columns i+1..5)."""
        degrees, entries = {}, {}
        for i, (drow, erow) in enumerate(zip(degree_rows, entry_rows), start=1):
            for j, (d, e) in enumerate(zip(drow, erow), start=i + 1):
                degrees[(i, j)] = d
                entries[(i, j)] = e
        kinds = {tuple(p): GENERAL for p in general}
        return cls(degrees, entries, kinds, tuple(tuple(c) for c in corners))


@dataclass(frozen=True)
class WeightedProjectiveAmbient:
    coordinates: tuple[str, ...]
    weights: tuple[int, ...]

    def __post_init__(self):
        if len(self.coordinates) != len(self.weights):
            raise FamilyError("one weight per coordinate")
        if len(set(self.coordinates)) != len(self.coordinates):
            raise FamilyError("duplicate coordinate names")
        if any(w <= 0 for w in self.weights):
            raise FamilyError("weights must be positive")

    def index(self, name: str) -> int:
        try:
            return self.coordinates.index(name)
        except ValueError:
            raise FamilyError(f"unknown coordinate {name!r}") from None

    def weight(self, name: str) -> int:
        return self.weights[self.index(name)]


@dataclass(frozen=True)
class BinomialRelation:
    """``x^plus - x^minus`` as exponent vectors over the ambient coordinates."""

    plus: Vector
    minus: Vector
    omitted: int = 0

    def __post_init__(self):
        if any(a and b for a, b in zip(self.plus, self.minus)):
            raise NotBinomialError("binomial terms share a variable")

    @property
    def difference(self) -> Vector:
        return tuple(a - b for a, b in zip(self.plus, self.minus))

    def is_homogeneous(self, weights: Sequence[int]) -> bool:
        return dot(weights, self.difference) == 0

    def render(self, names: Sequence[str]) -> str:
        def mono(e):
            parts = []
            for n, k in zip(names, e):
                if k:
                    parts.append(n if k == 1 else f"{n}^{k}")
            return "*".join(parts) or "1"

        return f"{mono(self.plus)} - {mono(self.minus)}"


@dataclass(frozen=True)
class PfaffianHilbertSeries:
    """``prod_blocks N_b(t) / prod_j (1 - t^w_j)`` expanded exactly."""

    numerator: tuple[tuple[int, int], ...]
    weights: tuple[int, ...]
    _cache: list = field(default_factory=list, repr=False, compare=False, hash=False)

    def coefficients(self, upto: int) -> list[int]:
        if len(self._cache) <= upto:
            c = [0] * (upto + 1)
            for e, v in self.numerator:
                if e <= upto:
                    c[e] += v
            for w in self.weights:
                for i in range(w, upto + 1):
                    c[i] += c[i - w]
            self._cache[:] = c
        return list(self._cache[: upto + 1])

    def coefficient(self, k: int) -> int:
        if k < 0:
            raise ValueError("degree must be nonnegative")
        return self.coefficients(k)[k]


@dataclass(frozen=True)
class FamilyDescriptor:
    """One Calabi-Yau family: Pfaffian blocks, ambient space, toric data."""

    name: str
    blocks: tuple[WeightedSkewMatrix, ...]
    ambient: WeightedProjectiveAmbient
    cutting_degrees: tuple[int, ...]
    rays: tuple[Vector, ...] | None = None
    j_partition: tuple[tuple[int, ...], ...] | None = None
    specialization_relations: tuple[Vector, ...] = ()
    expected: Mapping = field(default_factory=dict)
    derived: bool = False

    def consistency_errors(self) -> list[str]:
        """Violations of the entry/coordinate bookkeeping.

        Not raised at construction, so that a corrupted descriptor still
        loads and the violation is reported as a failed check.
        """
        errors = []
        names = set(self.ambient.coordinates)
        for b in self.blocks:
            for pair in PAIRS:
                name = b.entries[pair]
                if b.kind(pair) != COORDINATE:
                    continue
                if name not in names:
                    errors.append(f"entry {pair} names unknown coordinate {name!r}")
                elif self.ambient.weight(name) != b.degrees[pair]:
                    errors.append(
                        f"coordinate {name} has weight {self.ambient.weight(name)} "
                        f"but sits at {pair} of degree {b.degrees[pair]}"
                    )
        used = [b.entries[p] for b in self.blocks for p in PAIRS if b.kind(p) == COORDINATE]
        dup = sorted({n for n in used if used.count(n) > 1})
        if dup:
            errors.append(f"coordinates assigned to two matrix entries: {', '.join(dup)}")
        return errors

    @property
    def spare_coordinates(self) -> tuple[str, ...]:
        used = {b.entries[p] for b in self.blocks for p in PAIRS}
        return tuple(c for c in self.ambient.coordinates if c not in used)

    @cached_property
    def hilbert_series(self) -> PfaffianHilbertSeries:
        num = {0: 1}
        for b in self.blocks:
            num = _poly_mul(num, pfaffian_numerator(b))
        return PfaffianHilbertSeries(tuple(sorted(num.items())), self.ambient.weights)

    def binomials(self) -> list[BinomialRelation]:
        out = []
        for b in self.blocks:
            out.extend(degenerate_binomials(b, self.ambient))
        return out


def _poly_mul(a: Mapping[int, int], b: Mapping[int, int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, 0) + x * y
    return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------------------
# operations


def degree_splitting(m: WeightedSkewMatrix) -> tuple[tuple[Fraction, ...], Fraction]:
    """Half-integers ``a`` with ``d_ij = a_i + a_j`` and their sum ``sigma``."""
    d = m.degrees
    a1 = Fraction(d[(1, 2)] + d[(1, 3)] - d[(2, 3)], 2)
    a = [a1] + [d[(1, j)] - a1 for j in range(2, 6)]
    for i, j in PAIRS:
        if a[i - 1] + a[j - 1] != d[(i, j)]:
            raise DegreeTableError(f"degree table inconsistent at ({i},{j})", (i, j))
    sigma = sum(a)
    for x in a:
        if (sigma - x).denominator != 1 or (sigma + x).denominator != 1:
            raise DegreeTableError("Pfaffian degrees are not integral")
    if (2 * sigma).denominator != 1:
        raise DegreeTableError("2*sigma is not integral")
    return tuple(a), sigma


def pfaffian_degrees(m: WeightedSkewMatrix) -> tuple[int, ...]:
    a, sigma = degree_splitting(m)
    return tuple(int(sigma - x) for x in a)


def pfaffian_numerator(m: WeightedSkewMatrix) -> dict[int, int]:
    """``1 - sum t^(sigma-a_i) + sum t^(sigma+a_i) - t^(2 sigma)``."""
    a, sigma = degree_splitting(m)
    num: dict[int, int] = {0: 1}
    for x in a:
        lo, hi = int(sigma - x), int(sigma + x)
        num[lo] = num.get(lo, 0) - 1
        num[hi] = num.get(hi, 0) + 1
    top = int(2 * sigma)
    num[top] = num.get(top, 0) - 1
    return {k: v for k, v in num.items() if v}


def family_invariants(f: FamilyDescriptor) -> tuple[tuple[tuple[int, ...], ...], int]:
    """Pfaffian degrees per block and the anticanonical index."""
    degs = []
    index = sum(f.ambient.weights)
    for b in f.blocks:
        _, sigma = degree_splitting(b)
        degs.append(pfaffian_degrees(b))
        index -= int(2 * sigma)
    if index != sum(f.cutting_degrees):
        raise FamilyError(
            f"{f.name}: anticanonical index {index} differs from the cutting degrees sum {sum(f.cutting_degrees)}"
        )
    return tuple(degs), index


def hilbert_coefficient(f: FamilyDescriptor, k: int) -> int:
    return f.hilbert_series.coefficient(k)


def degenerate_binomials(m: WeightedSkewMatrix, ambient: WeightedProjectiveAmbient) -> list[BinomialRelation]:
    """The five 4x4 Pfaffians with the corner entries set to zero.

    Binomial ``omitted`` records the deleted row/column.
    """
    n = len(ambient.coordinates)
    out = []
    for omit in range(1, 6):
        p, q, r, s = (i for i in range(1, 6) if i != omit)
        terms = [(1, (p, q), (r, s)), (-1, (p, r), (q, s)), (1, (p, s), (q, r))]
        live = [t for t in terms if t[1] not in m.corners and t[2] not in m.corners]
        if len(live) != 2:
            raise NotBinomialError(f"Pfaffian omitting {omit} has {len(live)} surviving terms")
        if live[0][0] == live[1][0]:
            raise NotBinomialError(f"Pfaffian omitting {omit} is a sum, not a difference")
        exps = {}
        for sign, e1, e2 in live:
            v = [0] * n
            for pair in (e1, e2):
                if m.kind(pair) != COORDINATE:
                    raise NotBinomialError(f"general-polynomial entry {m.entries[pair]} survives the degeneration")
                v[ambient.index(m.entries[pair])] += 1
            exps[sign] = tuple(v)
        out.append(BinomialRelation(exps[1], exps[-1], omit))
    return out


@dataclass(frozen=True)
class BinomialLattice:
    lattice: SublatticeBasis
    saturation_index: int

    @property
    def rank(self) -> int:
        return self.lattice.rank

    @property
    def is_saturated(self) -> bool:
        return self.saturation_index == 1


def binomial_difference_lattice(rels: Sequence[BinomialRelation]) -> BinomialLattice:
    """Lattice spanned by the exponent differences, with its saturation index."""
    if not rels:
        raise ValueError("no binomials")
    n = len(rels[0].plus)
    lat = lattice_from_generators([r.difference for r in rels], n)
    return BinomialLattice(lat, lattice_index(lat))


def reconstruct_degeneration_polytope(f: FamilyDescriptor) -> LatticePolytope:
    """Ray polytope of the toric variety cut out by the degenerate binomials.

    The coordinate exponents are pushed to ``M' = Z^N / L`` (``L`` the
    saturated difference lattice), where they span the cone of the graded
    semigroup.  Its facet normals, restricted to the degree-zero sublattice
    ``M`` and made primitive in ``N = Hom(M, Z)``, are the rays.
    """
    weights = f.ambient.weights
    n = len(weights)
    bl = binomial_difference_lattice(f.binomials())
    if not bl.is_saturated:
        raise FamilyError(f"{f.name}: binomial lattice is not saturated")
    # rows of q span L^perp; x -> q x identifies Z^N / L with Z^rank
    q = orthogonal_lattice(bl.lattice.basis, n).basis
    images = list(zip(*q))
    rk = len(q)
    delta = solve_rational(list(zip(*q)), list(weights), rk)
    if delta is None or any(x.denominator != 1 for x in delta):
        raise FamilyError(f"{f.name}: weights do not descend to an integral grading")
    delta = tuple(int(x) for x in delta)
    degree_zero = integer_kernel_basis(IntegerMatrix([delta])).basis
    rays = []
    for normal, _ in extreme_rays(images, rk):
        rays.append(primitive([dot(normal, b) for b in degree_zero]))
    return LatticePolytope(rays)
