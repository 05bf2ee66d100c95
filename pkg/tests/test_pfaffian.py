import json
from fractions import Fraction
from math import comb

import pytest

from conftest import workbench
from oracles import invariant_factors
from pfaffdegen.familyfile import FamilyFileError, parse_family, shipped_data_dir
from pfaffdegen.fan import class_group, face_fan_from_polytope, picard_rank, singular_strata
from pfaffdegen.linalg import saturate_lattice
from pfaffdegen.pfaffian import (
    BinomialRelation,
    DegreeTableError,
    FamilyError,
    NotBinomialError,
    WeightedProjectiveAmbient,
    WeightedSkewMatrix,
    binomial_difference_lattice,
    degenerate_binomials,
    degree_splitting,
    family_invariants,
    hilbert_coefficient,
    pfaffian_numerator,
    reconstruct_degeneration_polytope,
)
from pfaffdegen.polytope import LatticePolytope, ehrhart_count, is_reflexive, normal_form, polar_dual

FAMILIES = ["x5", "x7", "x10", "x13", "x25"]


def raw(key):
    return json.loads((shipped_data_dir() / f"{key}.json").read_text())


def grassmannian_doc():
    """Single all-weight-1 block on ten coordinates."""
    block = raw("x25")["blocks"][0]
    return {
        "schema_version": 1,
        "name": "G25",
        "coordinates": [f"x{i}" for i in range(1, 11)],
        "ambient_weights": [1] * 10,
        "blocks": [block],
        "cutting_degrees": [1] * 5,
    }


def block_of(key, i=0):
    return workbench(key).f.blocks[i]


def test_splitting_x5():
    a, sigma = degree_splitting(block_of("x5"))
    assert a == (1, 1, 1, 1, 1) and sigma == 5


def test_splitting_x7():
    a, sigma = degree_splitting(block_of("x7"))
    h = Fraction(1, 2)
    assert a == (h, h, h, 3 * h, 3 * h)
    assert sigma == Fraction(9, 2)


def test_splitting_inconsistent_names_pair():
    rows = [[1, 1, 1, 1], [1, 2, 1], [1, 1], [1]]
    entries = [["a", "b", "c", "d"], ["e", "f", "g"], ["h", "i"], ["j"]]
    with pytest.raises(DegreeTableError) as e:
        degree_splitting(WeightedSkewMatrix.from_rows(rows, entries))
    assert e.value.pair == (2, 4)


def test_general_entry_off_corner_rejected():
    rows = [[1] * 4, [1] * 3, [1] * 2, [1]]
    entries = [["a", "b", "c", "d"], ["e", "f", "g"], ["h", "i"], ["j"]]
    with pytest.raises(FamilyError):
        WeightedSkewMatrix.from_rows(rows, entries, general=[(1, 3)])


def test_invariants_examples():
    assert family_invariants(workbench("x5").f) == (((4, 4, 4, 4, 4),), 14)
    assert family_invariants(workbench("x10").f) == (((4, 3, 3, 3, 3),), 10)
    degs, index = family_invariants(workbench("x25").f)
    assert index == 10 and len(degs) == 2
    assert sum(workbench("x25").f.ambient.weights) == 20


@pytest.mark.parametrize("key", FAMILIES)
def test_index_equals_cutting_degrees(key):
    f = workbench(key).f
    assert family_invariants(f)[1] == sum(f.cutting_degrees)


def test_index_mismatch_raises():
    # loading succeeds so that verification can report the mismatch as a failed check
    doc = raw("x5")
    doc["cutting_degrees"] = [2] * 6
    bad = parse_family(doc)
    with pytest.raises(FamilyError):
        family_invariants(bad)
    doc["coordinates"][0] = doc["coordinates"][1]
    with pytest.raises(FamilyFileError):
        parse_family(doc)


@pytest.mark.parametrize("key", FAMILIES)
def test_hilbert_constant_term(key):
    assert hilbert_coefficient(workbench(key).f, 0) == 1


def test_hilbert_examples():
    assert hilbert_coefficient(workbench("x5").f, 1) == 4
    assert min(k for k in pfaffian_numerator(block_of("x5")) if k) == 4
    assert hilbert_coefficient(workbench("x25").f, 1) == 20


@pytest.mark.parametrize("key", FAMILIES)
def test_numerator_anti_palindromic(key):
    for b in workbench(key).f.blocks:
        num = pfaffian_numerator(b)
        top = int(2 * degree_splitting(b)[1])
        assert {top - k: -v for k, v in num.items()} == num


def _single_block_series(upto):
    num = pfaffian_numerator(block_of("x25"))
    return [sum(c * comb(k - e + 9, 9) for e, c in num.items() if e <= k) for k in range(upto + 1)]


def test_single_block_series_matches_dimension_formula():
    # Weyl dimension of the k-th Plucker power of the Grassmannian of planes in C^5
    g = _single_block_series(8)
    for k, h in enumerate(g):
        assert h * 144 == (k + 1) * (k + 2) ** 2 * (k + 3) ** 2 * (k + 4)


def test_x25_hilbert_is_convolution_square():
    g = _single_block_series(12)
    f = workbench("x25").f
    for k in range(13):
        assert hilbert_coefficient(f, k) == sum(g[i] * g[k - i] for i in range(k + 1))


@pytest.mark.parametrize("key", ["x7", "x10", "x13"])
def test_polar_ehrhart_matches_hilbert(key):
    w = workbench(key)
    assert ehrhart_count(polar_dual(w.polytope), 1) == hilbert_coefficient(w.f, sum(w.f.cutting_degrees))


def test_hilbert_values():
    assert hilbert_coefficient(workbench("x13").f, 8) == 5291
    assert hilbert_coefficient(workbench("x25").f, 10) == 6859228


def test_x5_binomials():
    f = workbench("x5").f
    rels = degenerate_binomials(f.blocks[0], f.ambient)
    assert len(rels) == 5
    five = next(r for r in rels if r.omitted == 5)
    assert five.render(f.ambient.coordinates) in ("y3*y5 - y2*y6", "y2*y6 - y3*y5")


def test_x7_binomials_avoid_corner():
    f = workbench("x7").f
    rels = f.binomials()
    assert len(rels) == 5
    c = f.ambient.index("c") if "c" in f.ambient.coordinates else None
    corner = f.blocks[0].entries[(4, 5)]
    assert f.blocks[0].kind((4, 5)) == "general-polynomial"
    for r in rels:
        assert corner not in r.render(f.ambient.coordinates).replace("*", " ").replace("-", " ").split()
        if c is not None:
            assert r.plus[c] == r.minus[c] == 0


def test_x25_binomials_disjoint():
    f = workbench("x25").f
    rels = f.binomials()
    assert len(rels) == 10
    supports = [{i for i, (a, b) in enumerate(zip(r.plus, r.minus)) if a or b} for r in rels]
    first = set().union(*supports[:5])
    second = set().union(*supports[5:])
    assert not first & second


@pytest.mark.parametrize("key", FAMILIES)
def test_binomials_homogeneous_and_rank(key):
    f = workbench(key).f
    w = f.ambient.weights
    for b in f.blocks:
        rels = degenerate_binomials(b, f.ambient)
        assert len(rels) == 5
        assert all(r.is_homogeneous(w) for r in rels)
        assert binomial_difference_lattice(rels).rank == 3
    bl = binomial_difference_lattice(f.binomials())
    assert bl.rank == 3 * len(f.blocks)
    assert bl.is_saturated
    # saturation cross-check: invariant factors of the difference matrix are all 1
    if len(f.blocks) == 1:
        diffs = [list(r.difference) for r in f.binomials()]
        assert set(invariant_factors(diffs)) <= {0, 1}
    assert saturate_lattice(bl.lattice).rank == bl.rank


def test_single_binomial_rank_one():
    r = BinomialRelation((1, 1, 0, 0), (0, 0, 1, 1))
    assert binomial_difference_lattice([r]).rank == 1
    assert r.is_homogeneous((1, 1, 1, 1))
    with pytest.raises(NotBinomialError):
        BinomialRelation((1, 1, 0, 0), (1, 0, 1, 0))


def test_non_binomial_pfaffian_rejected():
    rows = [[1] * 4, [1] * 3, [1] * 2, [1]]
    entries = [["a", "b", "c", "d"], ["e", "f", "g"], ["h", "i"], ["j"]]
    amb = WeightedProjectiveAmbient(tuple("abcdefghij"), (1,) * 10)
    m = WeightedSkewMatrix.from_rows(rows, entries, corners=[(1, 2)])
    with pytest.raises(NotBinomialError):
        degenerate_binomials(m, amb)


@pytest.mark.parametrize("key", ["x5", "x7", "x10", "x25"])
def test_reconstruction_matches_published(key):
    w = workbench(key)
    rec = reconstruct_degeneration_polytope(w.f)
    published = LatticePolytope(w.f.rays)
    assert normal_form(rec) == normal_form(published)


def test_x13_reconstruction():
    w = workbench("x13")
    assert w.f.rays is None and w.f.derived
    p = w.polytope
    assert (p.dim, len(p.vertices)) == (7, 10)
    assert is_reflexive(p)
    assert picard_rank(w.fan) == 1


def test_grassmannian_block_reconstruction():
    p = reconstruct_degeneration_polytope(parse_family(grassmannian_doc()))
    assert (p.dim, len(p.vertices)) == (6, 9)
    assert is_reflexive(p)
    fan = face_fan_from_polytope(p)
    assert picard_rank(fan) == 1
    assert class_group(fan) == (3, ())
    assert len(singular_strata(fan)) == 2
    # the first block of x25 reappears by projecting away the second block's coordinates
    x25 = raw("x25")["rays"]
    block = LatticePolytope([r[7:] for r in x25 if any(r[7:])])
    assert normal_form(block) == normal_form(p)
