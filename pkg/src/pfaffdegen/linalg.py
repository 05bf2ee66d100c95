"""Exact integer and rational linear algebra.

Everything here works on Python integers and :class:`fractions.Fraction`,
so there is no overflow and no rounding.  Matrices are small (at most a few
dozen rows), which keeps the straightforward elimination algorithms fast
enough.

Normal-form conventions
-----------------------
``hermite_normal_form`` is the *row* Hermite form: ``u @ m == h`` with ``u``
unimodular and ``h`` upper echelon.  Pivots are positive, entries above a
pivot lie in ``[0, pivot)``, and zero rows come last.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Sequence

Vector = tuple[int, ...]


class DimensionError(ValueError):
    """Raised when matrix shapes do not fit together."""


@dataclass(frozen=True)
class IntegerMatrix:
    """Immutable integer matrix stored row-major as a tuple of tuples."""

    entries: tuple[tuple[int, ...], ...]
    cols: int

    def __init__(self, rows: Iterable[Iterable[int]], cols: int | None = None):
        entries = tuple(tuple(int(x) for x in row) for row in rows)
        if cols is None:
            if not entries:
                raise DimensionError("cannot infer column count of an empty matrix")
            cols = len(entries[0])
        if any(len(row) != cols for row in entries):
            raise DimensionError("ragged rows")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "cols", cols)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls(([int(i == j) for j in range(n)] for i in range(n)), cols=n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntegerMatrix":
        return cls(([0] * cols for _ in range(rows)), cols=cols)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]]) -> "IntegerMatrix":
        if not columns:
            raise DimensionError("no columns")
        return cls(zip(*columns), cols=len(columns))

    def __getitem__(self, index: tuple[int, int]) -> int:
        i, j = index
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"entry {index} outside {self.shape} matrix")
        return self.entries[i][j]

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self.entries)

    def transpose(self) -> "IntegerMatrix":
        return IntegerMatrix(zip(*self.entries), cols=self.rows) if self.rows else IntegerMatrix.zeros(self.cols, 0)

    @property
    def T(self) -> "IntegerMatrix":
        return self.transpose()

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        cols = list(zip(*other.entries)) if other.rows else [()] * other.cols
        return IntegerMatrix(
            ([sum(a * b for a, b in zip(row, col)) for col in cols] for row in self.entries),
            cols=other.cols,
        )

    def apply(self, v: Sequence[int]) -> Vector:
        """Matrix-vector product ``self @ v``."""
        if len(v) != self.cols:
            raise DimensionError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.entries)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def determinant(self) -> int:
        if self.rows != self.cols:
            raise DimensionError("determinant of a non-square matrix")
        return _bareiss_det([list(r) for r in self.entries])

    def rank(self) -> int:
        return rational_rank(self.entries)


@dataclass(frozen=True)
class SublatticeBasis:
    """A lattice given by linearly independent integer generators in Z^n."""

    ambient_dim: int
    basis: tuple[Vector, ...]

    def __post_init__(self):
        if any(len(v) != self.ambient_dim for v in self.basis):
            raise DimensionError("basis vector of wrong length")
        if self.basis and rational_rank(self.basis) != len(self.basis):
            raise ValueError("basis vectors are linearly dependent")

    @property
    def rank(self) -> int:
        return len(self.basis)

    def matrix(self) -> IntegerMatrix:
        """Basis vectors as the rows of a matrix."""
        return IntegerMatrix(self.basis, cols=self.ambient_dim)

    def contains(self, v: Sequence[int]) -> bool:
        """Integer membership test."""
        return coordinates_in_basis(self.basis, v) is not None


class RationalMatrix:
    """Exact rational matrix with elimination-based queries."""

    __slots__ = ("entries", "cols")

    def __init__(self, rows: Iterable[Iterable[int | Fraction]], cols: int | None = None):
        self.entries = tuple(tuple(Fraction(x) for x in row) for row in rows)
        if cols is None:
            cols = len(self.entries[0]) if self.entries else 0
        if any(len(r) != cols for r in self.entries):
            raise DimensionError("ragged rows")
        self.cols = cols

    @property
    def rows(self) -> int:
        return len(self.entries)

    def rank(self) -> int:
        return rational_rank(self.entries)

    def nullspace(self) -> list[tuple[Fraction, ...]]:
        return [tuple(Fraction(x) for x in v) for v in rational_nullspace(self.entries, self.cols)]

    def solve(self, rhs: Sequence[int | Fraction]) -> tuple[Fraction, ...] | None:
        """One solution of ``self @ x == rhs`` or ``None`` when inconsistent."""
        return solve_rational(self.entries, rhs, self.cols)


# ---------------------------------------------------------------------------
# small helpers


def content(v: Iterable[int]) -> int:
    return reduce(gcd, v, 0)


def primitive(v: Sequence[int]) -> Vector:
    g = content(v)
    return tuple(v) if g in (0, 1) else tuple(x // g for x in v)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def _bareiss_det(a: list[list[int]]) -> int:
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _integer_rows(rows: Iterable[Sequence[int | Fraction]]) -> list[list[int]]:
    out = []
    for row in rows:
        den = 1
        for x in row:
            if isinstance(x, Fraction):
                den = den * x.denominator // gcd(den, x.denominator)
        out.append([int(x * den) for x in row])
    return out


def integer_rref(rows: Iterable[Sequence[int | Fraction]], ncols: int | None = None):
    """Fraction-free Gauss-Jordan elimination.

    Returns ``(reduced_rows, pivot_columns)``; every pivot column is zero
    outside its pivot row, and each row is divided by its content.
    """
    a = _integer_rows(rows)
    if ncols is None:
        ncols = len(a[0]) if a else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        pr = a[r]
        pv = pr[c]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                b = a[i][c]
                row = [pv * x - b * y for x, y in zip(a[i], pr)]
                g = content(row)
                a[i] = [x // g for x in row] if g > 1 else row
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    red = a[:r]
    for i, c in enumerate(pivots):
        if red[i][c] < 0:
            red[i] = [-x for x in red[i]]
    return red, pivots


def rational_rank(rows: Iterable[Sequence[int | Fraction]]) -> int:
    rows = list(rows)
    if not rows:
        return 0
    return len(integer_rref(rows, len(rows[0]))[1])


def rational_nullspace(rows: Iterable[Sequence[int | Fraction]], ncols: int) -> list[Vector]:
    """Basis of the rational right kernel, as primitive integer vectors.

    Basis vectors are indexed by the free columns in increasing order; the
    vector for free column ``f`` has a positive entry at ``f`` and zeros on
    the other free columns.
    """
    rows = list(rows)
    red, pivots = integer_rref(rows, ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        lcm = 1
        for i, c in enumerate(pivots):
            if red[i][f]:
                lcm = lcm * red[i][c] // gcd(lcm, red[i][c])
        v = [0] * ncols
        v[f] = lcm
        for i, c in enumerate(pivots):
            if red[i][f]:
                v[c] = -lcm * red[i][f] // red[i][c]
        basis.append(primitive(v))
    return basis


def solve_rational(rows, rhs, ncols: int) -> tuple[Fraction, ...] | None:
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = integer_rref(aug, ncols + 1) if aug else ([], [])
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        x[c] = Fraction(red[i][ncols], red[i][c])
    return tuple(x)


# ---------------------------------------------------------------------------
# normal forms


def hermite_normal_form(m: IntegerMatrix) -> tuple[IntegerMatrix, IntegerMatrix]:
    """Row Hermite normal form.

    Returns ``(h, u)`` with ``u`` unimodular and ``u @ m == h``.

    >>> h, u = hermite_normal_form(IntegerMatrix([[2, 4], [1, 1]]))
    >>> h.tolist()
    [[1, 1], [0, 2]]
    """
    nr, nc = m.shape
    a = [list(r) for r in m.entries]
    u = [[int(i == j) for j in range(nr)] for i in range(nr)]
    r = 0
    for c in range(nc):
        if r == nr:
            break
        while True:
            nz = [i for i in range(r, nr) if a[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[p] = a[p], a[r]
            u[r], u[p] = u[p], u[r]
            clean = True
            for i in range(r + 1, nr):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
                    clean = clean and a[i][c] == 0
            if clean:
                break
        if a[r][c] == 0:
            continue
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
            u[r] = [-x for x in u[r]]
        for i in range(r):
            q = a[i][c] // a[r][c]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                u[i] = [x - q * y for x, y in zip(u[i], u[r])]
        r += 1
    return IntegerMatrix(a, cols=nc), IntegerMatrix(u, cols=nr)


def echelon_pivots(vectors: Sequence[Sequence[int]], ncols: int) -> list[int]:
    """Absolute pivot values of an integer echelon form of the row lattice.

    Their number is the rank; for a full-rank lattice in ``Z^ncols`` their
    product is the lattice index.  No transformation matrix is tracked.
    """
    a = [list(v) for v in vectors]
    pivots = []
    r = 0
    for c in range(ncols):
        while True:
            nz = [i for i in range(r, len(a)) if a[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[p] = a[p], a[r]
            pv = a[r][c]
            clean = True
            for i in range(r + 1, len(a)):
                if a[i][c]:
                    q = a[i][c] // pv
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    clean = clean and a[i][c] == 0
            if clean:
                break
        if r < len(a) and a[r][c] != 0:
            pivots.append(abs(a[r][c]))
            r += 1
            if r == len(a):
                break
    return pivots


def hnf_rows(vectors: Sequence[Sequence[int]], ncols: int) -> tuple[Vector, ...]:
    """Nonzero rows of the Hermite form of the given generators."""
    if not vectors:
        return ()
    h, _ = hermite_normal_form(IntegerMatrix(vectors, cols=ncols))
    return tuple(r for r in h.entries if any(r))


def _is_diagonal(a: list[list[int]]) -> bool:
    return all(x == 0 for i, row in enumerate(a) for j, x in enumerate(row) if i != j)


def smith_normal_form(m: IntegerMatrix) -> tuple[int, ...]:
    """Invariant factors ``d_1 | d_2 | ...`` (``min(rows, cols)`` of them).

    Computed by alternating row and column Hermite reductions until the
    matrix is diagonal, followed by gcd/lcm fixing of the divisibility chain.
    Zero factors (rank deficiency) come last.

    >>> smith_normal_form(IntegerMatrix([[2, 0], [0, 3]]))
    (1, 6)
    """
    nr, nc = m.shape
    n = min(nr, nc)
    if n == 0:
        return ()
    cur = m
    while True:
        h, _ = hermite_normal_form(cur)
        if _is_diagonal([list(r) for r in h.entries]):
            break
        cur = h.transpose()
    d = [abs(h.entries[i][i]) for i in range(n)]
    nonzero = sorted(x for x in d if x)
    for i in range(len(nonzero)):
        for j in range(i + 1, len(nonzero)):
            a, b = nonzero[i], nonzero[j]
            g = gcd(a, b)
            nonzero[i], nonzero[j] = g, a * b // g
    return tuple(nonzero) + (0,) * (n - len(nonzero))


def integer_kernel_basis(m: IntegerMatrix) -> SublatticeBasis:
    """Basis (in Hermite form) of ``{v in Z^cols : m @ v == 0}``.

    The basis spans the full integer kernel, not just a finite-index part.
    """
    nr, nc = m.shape
    if nr == 0:
        return SublatticeBasis(nc, tuple(IntegerMatrix.identity(nc).entries))
    h, u = hermite_normal_form(m.transpose())
    rank = sum(1 for row in h.entries if any(row))
    kernel = [u.entries[i] for i in range(rank, nc)]
    return SublatticeBasis(nc, hnf_rows(kernel, nc))


def orthogonal_lattice(vectors: Sequence[Sequence[int]], n: int) -> SublatticeBasis:
    """Integer vectors orthogonal to every given vector."""
    if not vectors:
        return SublatticeBasis(n, tuple(IntegerMatrix.identity(n).entries))
    return integer_kernel_basis(IntegerMatrix(vectors, cols=n))


def saturate_lattice(b: SublatticeBasis) -> SublatticeBasis:
    """The lattice ``span_Q(b) ∩ Z^n``, in Hermite form."""
    n = b.ambient_dim
    if not b.basis:
        return b
    perp = orthogonal_lattice(b.basis, n)
    return orthogonal_lattice(perp.basis, n)


def lattice_index(b: SublatticeBasis) -> int:
    """Index of ``b`` inside its saturation."""
    if not b.basis:
        return 1
    out = 1
    for d in smith_normal_form(b.matrix()):
        out *= d
    return out


def lattice_from_generators(vectors: Sequence[Sequence[int]], n: int) -> SublatticeBasis:
    """Basis of the lattice generated by possibly dependent vectors."""
    return SublatticeBasis(n, hnf_rows([tuple(v) for v in vectors], n))


def coordinates_in_basis(basis: Sequence[Sequence[int]], v: Sequence[int]) -> tuple[int, ...] | None:
    """Integer coordinates of ``v`` in ``basis`` or ``None`` if ``v`` is not in the lattice."""
    if not basis:
        return () if not any(v) else None
    sol = solve_rational(list(zip(*basis)), list(v), len(basis))
    if sol is None or any(x.denominator != 1 for x in sol):
        return None
    return tuple(int(x) for x in sol)
