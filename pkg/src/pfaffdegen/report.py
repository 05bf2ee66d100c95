"""Per-family verification checks and their machine-readable report."""

from __future__ import annotations

import json
import time
from fractions import Fraction
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable

from .fan import class_group, face_fan_from_polytope, is_cartier, picard_rank, singular_strata
from .familyfile import FamilyFileError, family_paths, load_family
from .operators import (
    DEFAULT_HOLDOUT,
    DEFAULT_MAX_DEGREE,
    DEFAULT_MAX_ORDER,
    find_annihilator,
    train_length,
    verify_annihilator,
)
from .period import (
    CLOSED_FORMS,
    RayDecomposition,
    SpecializationRelations,
    b25,
    check_specialization,
    closed_form_oracle,
    find_j_partition,
    grading_functional,
    hilbert_basis,
    period_coefficient,
    relation_cone,
)
from .pfaffian import (
    FamilyDescriptor,
    binomial_difference_lattice,
    degenerate_binomials,
    family_invariants,
    hilbert_coefficient,
    reconstruct_degeneration_polytope,
)
from .polytope import LatticePolytope, ehrhart_count, is_reflexive, is_terminal_fano_polytope, normal_form, polar_dual

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"

# enumeration ranges of the closed-form comparison
DEFAULT_TERMS = {"X25": 20}
DEFAULT_TERMS_OTHER = 10


def jsonable(x: Any) -> Any:
    """Integers become decimal strings; containers are converted recursively."""
    if isinstance(x, bool) or x is None or isinstance(x, float):
        return x
    if isinstance(x, int):
        return str(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return str(x)


@dataclass
class CheckResult:
    name: str
    status: str
    witness: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status != FAIL


@dataclass
class VerificationReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if c.status == FAIL]

    def extend(self, other: "VerificationReport") -> None:
        self.checks.extend(other.checks)

    def to_json(self, timings: bool = True) -> dict:
        out: dict = {
            "status": PASS if self.passed else FAIL,
            "checks": [{"name": c.name, "status": c.status, "witness": jsonable(c.witness)} for c in self.checks],
        }
        if timings:
            out["timings"] = {c.name: round(c.seconds, 3) for c in self.checks}
        return out

    def dumps(self, timings: bool = True) -> str:
        return json.dumps(self.to_json(timings), indent=2, ensure_ascii=False)

    def render(self) -> str:
        lines = []
        width = max((len(c.name) for c in self.checks), default=0)
        for c in self.checks:
            extra = ""
            if c.status == FAIL and c.witness:
                extra = "  " + json.dumps(jsonable(c.witness), ensure_ascii=False)
            lines.append(f"{c.status.upper():7} {c.name:<{width}}  {c.seconds:7.2f}s{extra}")
        lines.append(f"overall: {PASS if self.passed else FAIL}")
        return "\n".join(lines)


class Checker:
    """Collects checks; an exception inside a check is recorded as its failure."""

    def __init__(self, prefix: str):
        self.prefix = prefix
        self.report = VerificationReport()

    def run(self, name: str, fn: Callable[[], tuple[bool | None, dict]]) -> CheckResult:
        t = time.perf_counter()
        try:
            ok, witness = fn()
            status = SKIPPED if ok is None else (PASS if ok else FAIL)
        except Exception as e:  # noqa: BLE001 - reported, not swallowed
            status, witness = FAIL, {"error": f"{type(e).__name__}: {e}"}
        res = CheckResult(f"{self.prefix}/{name}", status, witness, time.perf_counter() - t)
        self.report.checks.append(res)
        return res


# ---------------------------------------------------------------------------
# derived data of one family


class Workbench:
    """Lazily derived toric and period data of one family."""

    def __init__(self, f: FamilyDescriptor):
        self.f = f
        self._series: list[int] = []
        self._fact: list[int] = [1]

    @cached_property
    def polytope(self) -> LatticePolytope:
        if self.f.rays is not None:
            return LatticePolytope(self.f.rays)
        return reconstruct_degeneration_polytope(self.f)

    @cached_property
    def rays(self) -> tuple:
        return tuple(self.f.rays) if self.f.rays is not None else self.polytope.vertices

    @cached_property
    def fan(self):
        return face_fan_from_polytope(self.polytope, self.rays)

    @cached_property
    def partition(self) -> tuple:
        if self.f.j_partition is not None:
            return self.f.j_partition
        return find_j_partition(self.fan, self.f.cutting_degrees)

    @cached_property
    def cone(self):
        return relation_cone(self.rays)

    @cached_property
    def hilbert(self):
        return hilbert_basis(self.cone)

    @cached_property
    def grading(self):
        return grading_functional(self.hilbert)

    @cached_property
    def decomposition(self) -> RayDecomposition:
        return RayDecomposition(self.rays, self.partition)

    @property
    def has_hadamard_form(self) -> bool:
        return self.f.name.upper() == "X25"

    def enumerated(self, n: int) -> list[int]:
        """First ``n`` period coefficients by lattice-point enumeration."""
        while len(self._series) < n:
            s = len(self._series)
            self._series.append(period_coefficient(self.decomposition, self.cone, self.grading, s, self._fact))
        return self._series[:n]

    def operator_series(self, n: int, enumerate_upto: int) -> list[int]:
        """Enumerated coefficients, continued by the squared block sums for X25."""
        if not self.has_hadamard_form:
            return self.enumerated(n)
        head = self.enumerated(min(n, enumerate_upto + 1))
        return head + [b25(s) ** 2 for s in range(len(head), n)]


# ---------------------------------------------------------------------------
# check groups


def _strata_witness(strata):
    return [{"rays": s.labels(), "codim": s.codim} for s in strata]


def check_polytope(w: Workbench, ck: Checker) -> None:
    f = w.f
    exp = f.expected
    ck.run("polytope.reflexive", lambda: (is_reflexive(w.polytope), {"vertices": len(w.polytope.vertices)}))
    ck.run("polytope.terminal", lambda: (is_terminal_fano_polytope(w.polytope), {}))

    def cl():
        rank, torsion = class_group(w.fan)
        want = exp.get("class_group_rank")
        return (rank == want and not torsion) if want is not None else (not torsion), {
            "free_rank": rank,
            "torsion": list(torsion),
            "expected": want,
        }

    ck.run("polytope.class-group", cl)

    def pic():
        got = picard_rank(w.fan)
        want = exp.get("picard_rank", 1)
        return got == want, {"picard_rank": got, "expected": want}

    ck.run("polytope.picard-rank", pic)

    def strata():
        st = singular_strata(w.fan)
        codim3 = sorted(sorted(s.labels(), key=lambda x: int(x[1:])) for s in st if s.codim == 3)
        ok = all(s.codim >= 3 for s in st)
        want = exp.get("singular_strata")
        wit = {"strata": _strata_witness(st)}
        if want is not None:
            want = sorted(sorted(s, key=lambda x: int(x[1:])) for s in want)
            wit["expected_codim3"] = want
            ok = ok and codim3 == want
        return ok, wit

    ck.run("polytope.singular-strata", strata)


def check_degenerate(w: Workbench, ck: Checker) -> None:
    f = w.f

    def ambient():
        errors = f.consistency_errors()
        return not errors, {"errors": errors} if errors else {"coordinates": len(f.ambient.coordinates)}

    ck.run("pfaffian.ambient", ambient)

    def invariants():
        degs, index = family_invariants(f)
        return True, {"pfaffian_degrees": [list(d) for d in degs], "index": index}

    ck.run("pfaffian.invariants", invariants)

    def binomials():
        names = f.ambient.coordinates
        per_block = []
        ok = True
        for b in f.blocks:
            rels = degenerate_binomials(b, f.ambient)
            bl = binomial_difference_lattice(rels)
            homog = all(r.is_homogeneous(f.ambient.weights) for r in rels)
            ok = ok and len(rels) == 5 and homog and bl.rank == 3 and bl.is_saturated
            per_block.append(
                {"binomials": [r.render(names) for r in rels], "rank": bl.rank, "saturation_index": bl.saturation_index}
            )
        total = binomial_difference_lattice(f.binomials())
        ok = ok and total.rank == 3 * len(f.blocks) and total.is_saturated
        return ok, {"blocks": per_block, "total_rank": total.rank}

    ck.run("pfaffian.binomials", binomials)

    def reconstruction():
        rec = reconstruct_degeneration_polytope(f)
        if f.rays is None:
            return None, {"vertices": [list(v) for v in rec.vertices]}
        same = normal_form(rec).matrix == normal_form(LatticePolytope(f.rays)).matrix
        return same, {"dim": rec.dim, "vertices": len(rec.vertices)}

    ck.run("pfaffian.reconstruction", reconstruction)


def check_partition(w: Workbench, ck: Checker) -> None:
    def partition():
        parts = w.partition
        RayDecomposition(w.rays, parts)
        k = len(w.rays)
        index = sum(w.f.cutting_degrees)
        rels = w.cone.basis
        anti = [sum(r) for r in rels]
        if len(parts) != len(w.f.cutting_degrees):
            return False, {"reason": "number of J-sets differs from the number of cutting divisors"}
        bad, degrees = [], []
        for g in parts:
            values = [1 if j in g else 0 for j in range(k)]
            if not is_cartier(w.fan, values):
                bad.append({"J": [j + 1 for j in g], "reason": "not Cartier"})
                continue
            # class(D_J) = (d / index) (-K): pair with every relation
            pairings = [sum(r[j] for j in g) for r in rels]
            d = next((Fraction(index * p_, a) for p_, a in zip(pairings, anti) if a), None)
            if d is None or any(index * p_ != d * a for p_, a in zip(pairings, anti)):
                bad.append({"J": [j + 1 for j in g], "reason": "class is not a multiple of -K"})
            else:
                degrees.append(d)
        if not bad and sorted(degrees) != sorted(w.f.cutting_degrees):
            bad.append({"reason": "J-set classes do not match the cutting degrees", "degrees": [str(d) for d in degrees]})
        wit = {"J_partition": [[j + 1 for j in g] for g in parts], "derived": w.f.j_partition is None}
        if bad:
            wit["bad"] = bad
        return not bad, wit

    ck.run("period.j-partition", partition)


def check_hilbert_basis(w: Workbench, ck: Checker) -> None:
    f = w.f

    def hb():
        gens = sorted(w.hilbert.generators)
        want = f.expected.get("hilbert_basis")
        wit = {"generators": [list(g) for g in gens], "cone_dim": w.cone.dim}
        if want is None or f.derived:
            return None, wit
        want = sorted(tuple(x) for x in want)
        wit["missing"] = [list(g) for g in want if g not in gens]
        wit["extra"] = [list(g) for g in gens if g not in want]
        return gens == want, wit

    ck.run("period.hilbert-basis", hb)

    def specialization():
        rels = f.specialization_relations
        if not rels:
            return None, {}
        return check_specialization(SpecializationRelations(tuple(rels)), w.hilbert), {"relations": len(rels)}

    ck.run("period.specialization", specialization)


def check_ehrhart(w: Workbench, ck: Checker, budget: int = 1) -> None:
    def ehr():
        _, index = family_invariants(w.f)
        dual = polar_dual(w.polytope)
        rows = []
        ok = True
        for k in range(1, max(1, budget) + 1):
            count = ehrhart_count(dual, k)
            h = hilbert_coefficient(w.f, k * index)
            rows.append({"k": k, "lattice_points": count, "hilbert_coefficient": h})
            ok = ok and count == h
        return ok, {"index": index, "dilations": rows}

    ck.run("pfaffian.ehrhart-hilbert", ehr)


def default_terms(f: FamilyDescriptor) -> int:
    return DEFAULT_TERMS.get(f.name.upper(), DEFAULT_TERMS_OTHER)


def check_period(w: Workbench, ck: Checker, terms: int | None = None) -> list[int]:
    """Enumerated coefficients through ``terms``; empty if enumeration failed."""
    terms = default_terms(w.f) if terms is None else terms
    got: list[int] = []

    def oracle():
        got.extend(w.enumerated(terms + 1))
        wit = {"coefficients": got}
        if w.f.name.upper() not in CLOSED_FORMS:
            return None, wit
        for s, a in enumerate(got):
            b = closed_form_oracle(w.f.name, s)
            if a != b:
                wit.update({"first_mismatch": s, "enumerated": a, "closed_form": b})
                return False, wit
        return got[0] == 1, wit

    ck.run("period.closed-form", oracle)

    def hadamard():
        if not w.has_hadamard_form:
            return None, {}
        if not got:
            return False, {"reason": "no enumerated coefficients"}
        for s, a in enumerate(got):
            if a != b25(s) ** 2:
                return False, {"first_mismatch": s, "enumerated": a, "block_square": b25(s) ** 2}
        return True, {"s_max": terms}

    ck.run("period.hadamard-square", hadamard)
    return got


def check_operator(
    w: Workbench,
    ck: Checker,
    max_order: int = DEFAULT_MAX_ORDER,
    max_degree: int = DEFAULT_MAX_DEGREE,
    holdout: int = DEFAULT_HOLDOUT,
    enumerate_upto: int | None = None,
):
    enumerate_upto = default_terms(w.f) if enumerate_upto is None else enumerate_upto
    found = {}

    def op():
        source = lambda n: w.operator_series(n, enumerate_upto)  # noqa: E731
        o = find_annihilator([], max_order, max_degree, more=source)
        if o is None:
            return False, {"reason": "no annihilator in the search window", "max_order": max_order, "max_degree": max_degree}
        train = train_length(o.order, max_degree)
        series = source(train + holdout)
        verified = verify_annihilator(o, series, holdout)
        want = w.f.expected.get("operator_order")
        found["operator"] = o
        wit = {
            "order": o.order,
            "degree": o.degree,
            "train_len": train,
            "holdout": holdout,
            "verified": verified,
            "operator": o.to_json(),
        }
        if w.has_hadamard_form and len(series) > enumerate_upto + 1:
            wit["enumerated_upto"] = enumerate_upto
        return verified and (want is None or o.order == want), wit

    ck.run("operator.annihilator", op)
    return found.get("operator")


def verify_family(w: Workbench, budget: int = 1, terms: int | None = None, **op_kw) -> VerificationReport:
    ck = Checker(w.f.name)
    check_degenerate(w, ck)
    check_polytope(w, ck)
    check_ehrhart(w, ck, budget)
    check_partition(w, ck)
    check_hilbert_basis(w, ck)
    check_period(w, ck, terms)
    check_operator(w, ck, **op_kw)
    return ck.report


class NoFamiliesError(FamilyFileError):
    pass


def run_verify_all(directory, budget: int = 1, terms: int | None = None, **op_kw) -> VerificationReport:
    paths = family_paths(directory)
    if not paths:
        raise NoFamiliesError(f"no families found in {directory}")
    fams = [load_family(p) for p in paths]
    report = VerificationReport()
    for f in sorted(fams, key=lambda f: f.name):
        report.extend(verify_family(Workbench(f), budget, terms, **op_kw))
    return report
