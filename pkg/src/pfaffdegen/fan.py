"""Face fans of ray polytopes: smoothness, singular strata, class group, Picard rank."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .linalg import (
    IntegerMatrix,
    Vector,
    content,
    echelon_pivots,
    rational_nullspace,
    rational_rank,
    smith_normal_form,
    solve_rational,
)
from .polytope import LatticePolytope, OriginNotInteriorError, facet_enumeration, dot


class FanError(ValueError):
    pass


@dataclass(frozen=True)
class RationalCone:
    generators: tuple[Vector, ...]

    def __post_init__(self):
        if any(content(g) != 1 for g in self.generators):
            raise FanError("cone generators must be primitive")

    @property
    def dim(self) -> int:
        return rational_rank(self.generators)

    @property
    def is_simplicial(self) -> bool:
        return self.dim == len(self.generators)


@dataclass(frozen=True)
class FaceFan:
    """Complete fan spanned by the faces of a ray polytope.

    Cones are stored as sorted tuples of 0-based indices into ``rays``.
    """

    dim: int
    rays: tuple[Vector, ...]
    maximal_cones: tuple[tuple[int, ...], ...]

    def cone(self, indices: Sequence[int]) -> RationalCone:
        return RationalCone(tuple(self.rays[i] for i in indices))

    @property
    def ray_count(self) -> int:
        return len(self.rays)


@dataclass(frozen=True)
class TorusOrbitStratum:
    face: tuple[int, ...]
    codim: int
    singular: bool = True

    def labels(self) -> list[str]:
        """1-based ray names as in ``e5``."""
        return [f"e{i + 1}" for i in self.face]


def face_fan_from_polytope(p: LatticePolytope, rays: Sequence[Sequence[int]] | None = None) -> FaceFan:
    """Fan over the faces of ``p``; ``rays`` fixes the ray order if given."""
    fs = facet_enumeration(p)
    if any(f.offset <= 0 for f in fs):
        raise OriginNotInteriorError("face fan needs the origin in the interior")
    order = [tuple(r) for r in (rays if rays is not None else p.vertices)]
    if sorted(order) != sorted(p.vertices):
        raise FanError("ray list is not the vertex set of the polytope")
    cones = []
    for f in fs:
        cones.append(tuple(i for i, r in enumerate(order) if dot(f.normal, r) + f.offset == 0))
    return FaceFan(p.dim, tuple(order), tuple(sorted(cones)))


def face_fan_from_rays(rays: Sequence[Sequence[int]]) -> FaceFan:
    rays = [tuple(r) for r in rays]
    return face_fan_from_polytope(LatticePolytope(rays), rays)


def cone_is_smooth(c: RationalCone) -> bool:
    """Simplicial with generators extendable to a lattice basis."""
    if not c.generators:
        return True
    # columns of the generator matrix must generate Z^r, r = #generators
    r = len(c.generators)
    pivots = echelon_pivots(list(zip(*c.generators)), r)
    return len(pivots) == r and all(x == 1 for x in pivots)


def _facet_masks(f: FaceFan) -> list[int]:
    return [sum(1 << i for i in cone) for cone in f.maximal_cones]


def _indices(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def singular_strata(f: FaceFan) -> list[TorusOrbitStratum]:
    """Inclusion-minimal non-smooth cones of the fan, sorted by ray indices.

    Descends the face lattice top-down from each maximal cone, entering
    only non-smooth faces; a non-smooth face none of whose facets is
    non-smooth is minimal.
    """
    facets = _facet_masks(f)
    memo: dict[int, frozenset[int]] = {}

    known_singular: list[int] = []

    def smooth(mask):
        # anything containing a singular face is singular
        if any(mask & m == m for m in known_singular):
            return False
        return cone_is_smooth(f.cone(_indices(mask)))

    def cone_facets(mask):
        proper = {mask & h for h in facets if mask & h != mask}
        proper.discard(0)
        return [g for g in proper if not any(o != g and (g & o) == g for o in proper)]

    def minimal_below(mask):
        hit = memo.get(mask)
        if hit is not None:
            return hit
        if smooth(mask):
            out = frozenset()
        else:
            found = set()
            for g in cone_facets(mask):
                found |= minimal_below(g)
            if not found:
                known_singular.append(mask)
            out = frozenset(found) if found else frozenset({mask})
        memo[mask] = out
        return out

    candidates: set[int] = set()
    for top in facets:
        candidates |= minimal_below(top)
    minimal = [c for c in candidates if not any(o != c and (o & c) == o for o in candidates)]
    out = []
    for m in minimal:
        idx = _indices(m)
        out.append(TorusOrbitStratum(idx, rational_rank([f.rays[i] for i in idx])))
    return sorted(out, key=lambda s: s.face)


def class_group(f: FaceFan) -> tuple[int, tuple[int, ...]]:
    """(free rank, torsion invariants) of ``Z^k / image(M^T)``."""
    if rational_rank(f.rays) < f.dim:
        raise FanError("rays do not span the ambient space")
    invariants = smith_normal_form(IntegerMatrix(f.rays))
    torsion = tuple(d for d in invariants if d > 1)
    return len(f.rays) - f.dim, torsion


def cartier_constraints(f: FaceFan) -> list[Vector]:
    """Linear conditions on ray values ``phi`` for a piecewise linear support function.

    Each non-simplicial maximal cone contributes its linear relations among
    rays: ``phi`` restricted to the cone must kill every such relation.
    """
    k = len(f.rays)
    rows = []
    for cone in f.maximal_cones:
        cols = [f.rays[i] for i in cone]
        for rel in rational_nullspace(list(zip(*cols)), len(cone)):
            full = [0] * k
            for i, c in zip(cone, rel):
                full[i] = c
            rows.append(tuple(full))
    return rows


def picard_rank(f: FaceFan) -> int:
    """Rank of piecewise linear support functions modulo global linear ones."""
    k = len(f.rays)
    rows = cartier_constraints(f)
    cdiv = k - (rational_rank(rows) if rows else 0)
    return cdiv - rational_rank(f.rays)


def is_cartier(f: FaceFan, values: Sequence[int]) -> bool:
    """Whether the T-divisor with ray values ``values`` is Cartier.

    Checks that on each maximal cone some integral linear form takes the
    prescribed values on the cone's rays.
    """
    n = f.dim
    for cone in f.maximal_cones:
        sol = solve_rational([f.rays[i] for i in cone], [values[i] for i in cone], n)
        if sol is None:
            return False
        # the solution is unique since maximal cones are full-dimensional
        if any(x.denominator != 1 for x in sol):
            return False
    return True
