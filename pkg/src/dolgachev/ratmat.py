"""Exact rational and integer linear algebra.

Scalars are :class:`fractions.Fraction`, which is always stored in lowest
terms with a positive denominator.  Matrices are immutable row-major tuples.
Nothing in this module ever touches a float.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

Rational = Fraction
Vector = tuple[Fraction, ...]


class DimensionError(ValueError):
    """Shapes of the operands do not fit together."""


class SingularMatrixError(ArithmeticError):
    """A square system has no unique solution."""


class DomainError(ValueError):
    """An input lies outside the domain of an operation (non-integral, non-symmetric, ...)."""


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"``, ``"n"`` or an int into a reduced Fraction."""
    if isinstance(text, bool):
        raise DomainError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, Fraction):
        return text
    if not isinstance(text, str):
        raise DomainError(f"not a rational string: {text!r}")
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise DomainError(f"not a rational string: {text!r}") from None
    if q == 0:
        raise DomainError(f"zero denominator in {text!r}")
    return Fraction(p, q)


def format_rational(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def as_vector(values: Iterable) -> Vector:
    return tuple(Fraction(v) for v in values)


def is_integral_vector(v: Sequence[Fraction]) -> bool:
    return all(Fraction(x).denominator == 1 for x in v)


def dot(u: Sequence, v: Sequence) -> Fraction:
    if len(u) != len(v):
        raise DimensionError(f"vector lengths {len(u)} and {len(v)} differ")
    return sum((Fraction(a) * b for a, b in zip(u, v)), Fraction(0))


@dataclass(frozen=True)
class Signature:
    positive: int
    negative: int
    zero: int

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.positive, self.negative, self.zero)

    def __str__(self) -> str:
        return f"({self.positive},{self.negative},{self.zero})"


class RatMatrix:
    """Immutable dense matrix of Fractions."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable):
        entries = tuple(Fraction(e) for e in entries)
        if rows < 0 or cols < 0 or len(entries) != rows * cols:
            raise DimensionError(
                f"{len(entries)} entries do not fill a {rows}x{cols} matrix"
            )
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("RatMatrix is immutable")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> RatMatrix:
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise DimensionError("ragged rows")
        return cls(len(rows), ncols, (parse_rational(x) if isinstance(x, str) else x
                                      for r in rows for x in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence]) -> RatMatrix:
        return cls.from_rows(columns).T

    @classmethod
    def identity(cls, n: int) -> RatMatrix:
        return cls(n, n, (1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> RatMatrix:
        return cls(rows, cols, [0] * (rows * cols))

    @classmethod
    def diag(cls, values: Sequence) -> RatMatrix:
        n = len(values)
        return cls(n, n, (values[i] if i == j else 0 for i in range(n) for j in range(n)))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> Vector:
        return self.entries[j::self.cols] if self.cols else ()

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def columns(self) -> list[Vector]:
        return [self.col(j) for j in range(self.cols)]

    @property
    def T(self) -> RatMatrix:
        return RatMatrix(self.cols, self.rows,
                         (self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def __matmul__(self, other):
        if isinstance(other, RatMatrix):
            if self.cols != other.rows:
                raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
            ocols = other.columns()
            return RatMatrix(self.rows, other.cols,
                             (dot(self.row(i), c) for i in range(self.rows) for c in ocols))
        v = tuple(other)
        if len(v) != self.cols:
            raise DimensionError(f"cannot apply {self.shape} matrix to length-{len(v)} vector")
        return tuple(dot(self.row(i), v) for i in range(self.rows))

    def __add__(self, other: RatMatrix) -> RatMatrix:
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return RatMatrix(self.rows, self.cols, (a + b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> RatMatrix:
        return RatMatrix(self.rows, self.cols, (-a for a in self.entries))

    def __sub__(self, other: RatMatrix) -> RatMatrix:
        return self + (-other)

    def scale(self, c) -> RatMatrix:
        c = Fraction(c)
        return RatMatrix(self.rows, self.cols, (c * a for a in self.entries))

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(format_rational(x) for x in self.row(i)) + "]"
                         for i in range(self.rows))
        return f"RatMatrix([{body}])"

    def is_symmetric(self) -> bool:
        return self.is_square and all(
            self[i, j] == self[j, i] for i in range(self.rows) for j in range(i))

    def is_integral(self) -> bool:
        return is_integral_vector(self.entries)

    def bilinear(self, u: Sequence, v: Sequence) -> Fraction:
        """``u^T · self · v``."""
        return dot(u, self @ v)

    def to_strings(self) -> list[list[str]]:
        return [[format_rational(x) for x in self.row(i)] for i in range(self.rows)]


def _require_square(m: RatMatrix, what: str) -> None:
    if not m.is_square:
        raise DimensionError(f"{what} needs a square matrix, got {m.rows}x{m.cols}")


def _bareiss_int(a: list[list[int]]) -> int:
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                # exact division is guaranteed by Sylvester's identity
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def _cofactor_det(rows: list[list[Fraction]]) -> Fraction:
    n = len(rows)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return rows[0][0]
    total = Fraction(0)
    for j in range(n):
        if rows[0][j] == 0:
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        total += (-1) ** j * rows[0][j] * _cofactor_det(minor)
    return total


def det(m: RatMatrix) -> Fraction:
    """Exact determinant by fraction-free (Bareiss) elimination.

    Each row is first cleared of denominators; the integer determinant is then
    divided by the product of the row scalings.
    """
    _require_square(m, "det")
    scale = Fraction(1)
    rows: list[list[int]] = []
    for i in range(m.rows):
        r = m.row(i)
        den = lcm(*(x.denominator for x in r)) if r else 1
        scale *= den
        rows.append([int(x * den) for x in r])
    return Fraction(_bareiss_int(rows)) / scale


def cofactor_det(m: RatMatrix) -> Fraction:
    """Laplace expansion; only sensible for small matrices (used as a cross-check)."""
    _require_square(m, "det")
    return _cofactor_det(m.to_rows())


def _gauss_jordan(a: list[list[Fraction]], n_left: int) -> list[list[Fraction]] | None:
    """Reduce the left ``n_left`` columns of ``a`` to the identity, or return None if singular."""
    n = len(a)
    for k in range(n_left):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return None
        a[k], a[piv] = a[piv], a[k]
        inv = 1 / a[k][k]
        a[k] = [x * inv for x in a[k]]
        for i in range(n):
            if i != k and a[i][k] != 0:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return a


def solve(a: RatMatrix, b: Sequence) -> Vector:
    """Return the exact ``x`` with ``a @ x == b`` for square nonsingular ``a``."""
    _require_square(a, "solve")
    b = as_vector(b)
    if len(b) != a.rows:
        raise DimensionError(f"right-hand side has length {len(b)}, expected {a.rows}")
    aug = [list(a.row(i)) + [b[i]] for i in range(a.rows)]
    red = _gauss_jordan(aug, a.cols)
    if red is None:
        raise SingularMatrixError("matrix is singular")
    return tuple(r[-1] for r in red)


def inverse(a: RatMatrix) -> RatMatrix:
    _require_square(a, "inverse")
    n = a.rows
    aug = [list(a.row(i)) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    red = _gauss_jordan(aug, n)
    if red is None:
        raise SingularMatrixError("matrix is singular")
    return RatMatrix.from_rows([r[n:] for r in red])


def express_in_columns(a: RatMatrix, b: Sequence) -> Vector | None:
    """Coefficients ``x`` with ``a @ x == b`` for ``a`` of full column rank, or None.

    ``a`` may be tall; the solution is unique when it exists.
    """
    b = as_vector(b)
    if len(b) != a.rows:
        raise DimensionError(f"right-hand side has length {len(b)}, expected {a.rows}")
    aug = [list(a.row(i)) + [b[i]] for i in range(a.rows)]
    n = a.cols
    r = 0
    for k in range(n):
        piv = next((i for i in range(r, a.rows) if aug[i][k] != 0), None)
        if piv is None:
            raise SingularMatrixError("columns are linearly dependent")
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][k]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(a.rows):
            if i != r and aug[i][k] != 0:
                f = aug[i][k]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        r += 1
    if any(aug[i][-1] != 0 for i in range(n, a.rows)):
        return None
    return tuple(aug[i][-1] for i in range(n))


def smith_normal_form(m: RatMatrix) -> tuple[list[int], RatMatrix, RatMatrix]:
    """Smith normal form of an integer matrix.

    Returns ``(factors, U, V)`` with ``U`` and ``V`` unimodular and
    ``U @ m @ V`` diagonal with entries ``factors`` (each dividing the next,
    all nonnegative).  ``len(factors) == min(rows, cols)``.
    """
    if not m.is_integral():
        raise DomainError("smith_normal_form needs integer entries")
    nr, nc = m.rows, m.cols
    a = [[int(x) for x in m.row(i)] for i in range(nr)]
    u = [[int(i == j) for j in range(nr)] for i in range(nr)]
    v = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):  # row_dst += f * row_src
        a[dst] = [x + f * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + f * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, f):  # col_dst += f * col_src
        for row in a:
            row[dst] += f * row[src]
        for row in v:
            row[dst] += f * row[src]

    for t in range(min(nr, nc)):
        nonzero = [(abs(a[i][j]), i, j) for i in range(t, nr) for j in range(t, nc) if a[i][j]]
        if not nonzero:
            break
        while True:
            _, pi, pj = min((abs(a[i][j]), i, j) for i in range(t, nr)
                            for j in range(t, nc) if a[i][j])
            swap_rows(t, pi)
            swap_cols(t, pj)
            p = a[t][t]
            dirty = False
            for i in range(t + 1, nr):
                q = a[i][t] // p
                if q:
                    add_row(i, t, -q)
                dirty |= a[i][t] != 0
            for j in range(t + 1, nc):
                q = a[t][j] // p
                if q:
                    add_col(j, t, -q)
                dirty |= a[t][j] != 0
            if dirty:
                continue
            # pivot must divide the rest of the trailing block
            bad = next(((i, j) for i in range(t + 1, nr) for j in range(t + 1, nc)
                        if a[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    factors = [a[i][i] for i in range(min(nr, nc))]
    return factors, RatMatrix.from_rows(u), RatMatrix.from_rows(v)


def signature(s: RatMatrix) -> Signature:
    """Inertia of a symmetric matrix via exact congruence diagonalization."""
    if not s.is_square:
        raise DomainError("signature needs a square matrix")
    if not s.is_symmetric():
        raise DomainError("signature needs a symmetric matrix")
    n = s.rows
    a = s.to_rows()
    pos = neg = 0
    k = 0
    while k < n:
        piv = next((i for i in range(k, n) if a[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in range(k, n) for j in range(i + 1, n) if a[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # e_i -> e_i + e_j turns the zero diagonal entry into 2*a[i][j]
            a[i] = [x + y for x, y in zip(a[i], a[j])]
            for row in a:
                row[i] += row[j]
            piv = i
        a[k], a[piv] = a[piv], a[k]
        for row in a:
            row[k], row[piv] = row[piv], row[k]
        p = a[k][k]
        if p > 0:
            pos += 1
        else:
            neg += 1
        for i in range(k + 1, n):
            f = a[i][k] / p
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
                for row in a:
                    row[i] -= f * row[k]
        k += 1
    return Signature(pos, neg, n - pos - neg)


def integer_kernel(row: Sequence[int]) -> RatMatrix:
    """Basis (as columns) of the integer vectors orthogonal to a nonzero integer row."""
    r = RatMatrix.from_rows([list(row)])
    if not r.is_integral():
        raise DomainError("integer_kernel needs an integer row")
    factors, _, v = smith_normal_form(r)
    if not factors or factors[0] == 0:
        raise DomainError("integer_kernel needs a nonzero row")
    return RatMatrix.from_columns(v.columns()[1:])


def content(values: Iterable[int]) -> int:
    g = 0
    for x in values:
        g = gcd(g, int(x))
    return g
