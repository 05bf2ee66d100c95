"""Annihilating differential operators of power series in ``t`` and ``theta = t d/dt``.

An operator ``sum c_ij t^j theta^i`` kills ``sum a_s t^s`` iff for every
``s >= 0``::

    sum_j P_j(s - j) a_{s-j} = 0,   P_j(x) = sum_i c_ij x^i,

with ``a_s = 0`` for ``s < 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd
from typing import Callable, Sequence

from .linalg import rational_nullspace, rational_rank

DEFAULT_MAX_ORDER = 6
DEFAULT_MAX_DEGREE = 16
DEFAULT_HOLDOUT = 10
SAFETY_MARGIN = 10


class InsufficientCoefficientsError(ValueError):
    pass


def train_length(order: int, degree: int) -> int:
    return (order + 1) * (degree + 1) + SAFETY_MARGIN


@dataclass(frozen=True)
class ThetaOperator:
    """Content-free integer coefficients; ``coefficients[i][j]`` multiplies ``t^j theta^i``."""

    coefficients: tuple[tuple[int, ...], ...]

    @property
    def order(self) -> int:
        return max((i for i, row in enumerate(self.coefficients) if any(row)), default=0)

    @property
    def degree(self) -> int:
        return max((j for row in self.coefficients for j, c in enumerate(row) if c), default=0)

    def coefficient(self, i: int, j: int) -> int:
        if i < len(self.coefficients) and j < len(self.coefficients[i]):
            return self.coefficients[i][j]
        return 0

    def theta_polynomial(self, j: int) -> tuple[int, ...]:
        """``P_j``: coefficients of ``theta^0, theta^1, ...`` at ``t^j``."""
        return tuple(self.coefficient(i, j) for i in range(self.order + 1))

    def residual(self, series: Sequence[int], s: int) -> int:
        total = 0
        for j in range(min(s, self.degree) + 1):
            x = s - j
            p = self.theta_polynomial(j)
            total += _horner(p, x) * series[x]
        return total

    def render(self) -> str:
        terms = []
        for j in range(self.degree + 1):
            p = self.theta_polynomial(j)
            if not any(p):
                continue
            poly = _render_poly(p, "θ")
            tpart = "" if j == 0 else ("t" if j == 1 else f"t^{j}")
            terms.append(f"{tpart}({poly})" if tpart else poly)
        return " + ".join(terms) if terms else "0"

    def to_json(self) -> dict:
        return {
            "order": str(self.order),
            "degree": str(self.degree),
            "coefficients": [[str(self.coefficient(i, j)) for j in range(self.degree + 1)] for i in range(self.order + 1)],
            "rendering": self.render(),
        }

    @classmethod
    def from_table(cls, table: Sequence[Sequence[int | Fraction]]) -> "ThetaOperator":
        return cls(normalize(table))


def _horner(p: Sequence[int], x: int) -> int:
    out = 0
    for c in reversed(p):
        out = out * x + c
    return out


def _render_poly(p: Sequence[int], var: str) -> str:
    parts = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if not c:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if mono and abs(c) == 1:
            coef = "-" if c < 0 else ""
        else:
            coef = str(c)
        parts.append(f"{coef}{mono}")
    s = " + ".join(parts)
    return s.replace("+ -", "- ")


def normalize(table: Sequence[Sequence[int | Fraction]]) -> tuple[tuple[int, ...], ...]:
    """Clear denominators, divide by the content and make the leading theta-coefficient positive.

    The leading coefficient is the one of ``theta^order`` at the smallest
    power of ``t`` where it is nonzero.  Trailing zero rows and columns are
    dropped.
    """
    rows = [[Fraction(x) for x in row] for row in table]
    den = 1
    for row in rows:
        for x in row:
            den = den * x.denominator // gcd(den, x.denominator)
    ints = [[int(x * den) for x in row] for row in rows]
    g = 0
    for row in ints:
        for x in row:
            g = gcd(g, x)
    if g == 0:
        raise ValueError("zero operator")
    ints = [[x // g for x in row] for row in ints]
    order = max(i for i, row in enumerate(ints) if any(row))
    degree = max(j for row in ints for j, c in enumerate(row) if c)
    lead = next(c for c in ints[order] if c)
    sign = 1 if lead > 0 else -1
    return tuple(tuple(sign * (row[j] if j < len(row) else 0) for j in range(degree + 1)) for row in ints[: order + 1])


@dataclass(frozen=True)
class RecurrenceRelation:
    """``sum_j Q_j(s) a_{s-j} = 0`` for all ``s``; ``q[j]`` lists ``Q_j`` by powers of ``s``.

    Solving for ``a_s`` gives the rational-function coefficients
    ``a_s = -sum_{j >= 1} Q_j(s) / Q_0(s) a_{s-j}``.
    """

    q: tuple[tuple[int, ...], ...]

    def coefficient(self, j: int, s: int) -> Fraction:
        """Multiplier of ``a_{s-j}`` in the expression for ``a_s`` (``j >= 1``)."""
        return Fraction(-_horner(self.q[j], s), _horner(self.q[0], s))

    def extend(self, initial: Sequence[int], upto: int) -> list[Fraction]:
        """Continue ``initial`` through index ``upto`` using the recurrence."""
        a = [Fraction(x) for x in initial]
        for s in range(len(a), upto + 1):
            lead = _horner(self.q[0], s)
            if lead == 0:
                raise ZeroDivisionError(f"recurrence is singular at s={s}")
            acc = sum((_horner(self.q[j], s) * a[s - j] for j in range(1, len(self.q)) if s - j >= 0), Fraction(0))
            a.append(-acc / lead)
        return a


def operator_to_recurrence(op: ThetaOperator) -> RecurrenceRelation:
    """``Q_j(s) = P_j(s - j)``."""
    q = []
    for j in range(op.degree + 1):
        q.append(_shift(op.theta_polynomial(j), -j))
    return RecurrenceRelation(tuple(q))


def recurrence_to_operator(rec: RecurrenceRelation) -> ThetaOperator:
    """Inverse of :func:`operator_to_recurrence`, ``P_j(x) = Q_j(x + j)``."""
    cols = [_shift(qj, j) for j, qj in enumerate(rec.q)]
    order = max((len(c) for c in cols), default=1) - 1
    table = [[cols[j][i] if i < len(cols[j]) else 0 for j in range(len(cols))] for i in range(order + 1)]
    return ThetaOperator(normalize(table))


def _shift(p: Sequence[int], h: int) -> tuple[int, ...]:
    """Coefficients of ``p(x + h)``."""
    n = len(p)
    out = [0] * n
    for i, c in enumerate(p):
        for k in range(i + 1):
            out[k] += c * comb(i, k) * h ** (i - k)
    return tuple(out)


# ---------------------------------------------------------------------------
# search


def _equations(series: Sequence[int], order: int, degree: int, length: int) -> list[list[int]]:
    """Row ``s``: the residual at ``t^s`` as a linear form in the ``c_ij``.

    Unknowns are ordered ``(i, j)`` with ``j`` major.
    """
    rows = []
    for s in range(length):
        row = []
        for j in range(degree + 1):
            x = s - j
            a = series[x] if x >= 0 else 0
            pw = 1
            for _ in range(order + 1):
                row.append(pw * a)
                pw *= x
        rows.append(row)
    return rows


def _to_table(vec: Sequence[int], order: int, degree: int) -> list[list[int]]:
    table = [[0] * (degree + 1) for _ in range(order + 1)]
    for idx, c in enumerate(vec):
        j, i = divmod(idx, order + 1)
        table[i][j] = c
    return table


def annihilators(series: Sequence[int], order: int, degree: int, length: int) -> list[ThetaOperator]:
    """Exact nullspace basis of the ``(order, degree)`` cell on ``length`` coefficients."""
    rows = _equations(series, order, degree, length)
    ncols = (order + 1) * (degree + 1)
    return [ThetaOperator(normalize(_to_table(v, order, degree))) for v in rational_nullspace(rows, ncols)]


def find_annihilator(
    series: Sequence[int],
    max_order: int = DEFAULT_MAX_ORDER,
    max_degree: int = DEFAULT_MAX_DEGREE,
    train_len: int | None = None,
    more: Callable[[int], Sequence[int]] | None = None,
) -> ThetaOperator | None:
    """Minimal order, then minimal degree, operator killing the training coefficients.

    Each order is screened on its full ``(order, max_degree)`` cell first;
    only orders with a nontrivial cell are swept by degree.  Without an
    explicit ``train_len`` every order uses ``train_length(order, max_degree)``
    coefficients.  ``more(n)``, if given, is asked for the first ``n``
    coefficients whenever ``series`` is too short.
    """
    series = [int(x) for x in series]
    for order in range(max_order + 1):
        length = train_len if train_len is not None else train_length(order, max_degree)
        if length < (order + 1) * (max_degree + 1):
            raise InsufficientCoefficientsError(
                f"train_len {length} is below the {(order + 1) * (max_degree + 1)} unknowns of order {order}"
            )
        if len(series) < length and more is not None:
            series = [int(x) for x in more(length)]
        if len(series) < length:
            raise InsufficientCoefficientsError(f"need {length} coefficients for order {order}, have {len(series)}")
        full = _equations(series, order, max_degree, length)
        if rational_rank(full) == (order + 1) * (max_degree + 1):
            continue
        for degree in range(max_degree + 1):
            ops = annihilators(series, order, degree, length)
            if ops:
                return ops[0]
    return None


def verify_annihilator(op: ThetaOperator, series: Sequence[int], holdout: int) -> bool:
    """Exact check that ``op`` kills every coefficient, the last ``holdout`` ones included."""
    if holdout < 0 or len(series) < holdout:
        raise InsufficientCoefficientsError("series is shorter than the holdout")
    return all(op.residual(series, s) == 0 for s in range(len(series)))
