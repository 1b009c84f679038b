"""Integral lattices: basis change, unimodularity, parity, odd indefinite
classification, bounded norm-vector enumeration and diagonalization.

Vector enumeration splits the coordinates into a small "free" set, which is
walked over the height box, and a complementary set on which the Gram block is
definite.  For every assignment of the free coordinates the remaining
coordinates satisfy a definite quadratic equation, whose integer solutions are
listed exactly by Fincke-Pohst style recursion.  No floating point is used.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from gmpy2 import isqrt, mpq

from dolgachev.ratmat import (
    DimensionError,
    DomainError,
    RatMatrix,
    Signature,
    det,
    dot,
    express_in_columns,
    integer_kernel,
    inverse,
    signature,
)

DEFAULT_HEIGHT = 4

IntVector = tuple[int, ...]


class UnsupportedClassificationError(DomainError):
    pass


class BoundedSearchExhausted(RuntimeError):
    """A bounded search found nothing.  This is never a proof of nonexistence."""


@dataclass(frozen=True)
class Lattice:
    gram: RatMatrix

    def __post_init__(self):
        if not self.gram.is_symmetric():
            raise DomainError("Gram matrix must be square and symmetric")

    @classmethod
    def from_rows(cls, rows) -> Lattice:
        return cls(RatMatrix.from_rows(rows))

    @property
    def rank(self) -> int:
        return self.gram.rows

    @property
    def is_integral(self) -> bool:
        return self.gram.is_integral()

    def pair(self, u: Sequence, v: Sequence) -> Fraction:
        return self.gram.bilinear(u, v)

    def norm(self, v: Sequence) -> Fraction:
        return self.gram.bilinear(v, v)


@dataclass(frozen=True)
class BasisChange:
    """Columns are the new basis vectors written in old coordinates."""

    matrix: RatMatrix

    def __post_init__(self):
        if not self.matrix.is_square:
            raise DimensionError("basis change must be square")
        if det(self.matrix) == 0:
            raise DomainError("basis change must be nonsingular")

    @property
    def is_integral(self) -> bool:
        return self.matrix.is_integral()


def _require_integral(l: Lattice) -> None:
    if not l.is_integral:
        raise DomainError("lattice Gram matrix has non-integral entries")


def change_basis(l: Lattice, t: BasisChange) -> Lattice:
    if t.matrix.rows != l.rank:
        raise DimensionError(f"basis change of size {t.matrix.rows} for lattice of rank {l.rank}")
    return Lattice(t.matrix.T @ l.gram @ t.matrix)


def is_unimodular(l: Lattice) -> bool:
    _require_integral(l)
    return abs(det(l.gram)) == 1


def parity(l: Lattice) -> str:
    """``"even"`` iff every diagonal entry of the Gram matrix is even."""
    _require_integral(l)
    return "even" if all(l.gram[i, i] % 2 == 0 for i in range(l.rank)) else "odd"


def classify_odd_unimodular(l: Lattice) -> str:
    """Isomorphism class label ``I(p,q)`` of an odd unimodular lattice.

    Odd indefinite unimodular lattices are determined by their signature.  The
    definite case is only decided in rank at most one.
    """
    _require_integral(l)
    if not is_unimodular(l):
        raise UnsupportedClassificationError("lattice is not unimodular")
    if parity(l) != "odd":
        raise UnsupportedClassificationError("even lattices are not classified here")
    sig = signature(l.gram)
    if (sig.positive == 0 or sig.negative == 0) and l.rank >= 2:
        raise UnsupportedClassificationError("definite lattices of rank >= 2 are not classified")
    return f"I({sig.positive},{sig.negative})"


# --- enumeration -----------------------------------------------------------

def _is_definite(block: RatMatrix) -> int:
    """+1 / -1 for a positive / negative definite block, 0 otherwise (empty block: +1)."""
    if block.rows == 0:
        return 1
    sig = signature(block)
    if sig.positive == block.rows:
        return 1
    if sig.negative == block.rows:
        return -1
    return 0


def _submatrix(m: RatMatrix, rows: Sequence[int], cols: Sequence[int]) -> RatMatrix:
    return RatMatrix(len(rows), len(cols), (m[i, j] for i in rows for j in cols))


def _free_split(gram: RatMatrix) -> tuple[tuple[int, ...], tuple[int, ...], int]:
    n = gram.rows
    for k in range(n + 1):
        for free in itertools.combinations(range(n), k):
            rest = tuple(i for i in range(n) if i not in free)
            s = _is_definite(_submatrix(gram, rest, rest))
            if s:
                return free, rest, s
    raise AssertionError("unreachable: the empty block is definite")


def _fincke_pohst_form(p: RatMatrix) -> list[list[Fraction]]:
    """Coefficients q with x^T p x = sum_i q[i][i] (x_i + sum_{j>i} q[i][j] x_j)^2."""
    m = p.rows
    q = p.to_rows()
    for i in range(m):
        for j in range(i + 1, m):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, m):
            for l in range(k, m):
                q[k][l] -= q[k][i] * q[i][l]
    return q


def _shell_points(q: list[list[Fraction]], center: Sequence[Fraction], radius: Fraction,
                  height: int | None) -> Iterator[list[int]]:
    """Integer y with sum_i q_ii (z_i + sum_{j>i} q_ij z_j)^2 == radius, z = y - center.

    Runs on gmpy2 rationals for speed; every quantity stays exact.
    """
    m = len(q)
    if radius < 0:
        return
    if m == 0:
        if radius == 0:
            yield []
        return
    qq = [[mpq(x.numerator, x.denominator) for x in row] for row in q]
    cen = [mpq(x.numerator, x.denominator) for x in center]
    y = [0] * m
    z = [mpq(0)] * m

    def rec(i: int, budget):
        qi = qq[i]
        u = mpq(0)
        for j in range(i + 1, m):
            u += qi[j] * z[j]
        c = cen[i] - u
        bound = budget / qi[i]
        s = int(isqrt(bound.numerator // bound.denominator)) + 1
        a = int(c.numerator // c.denominator) - s
        b = int(-(-c.numerator // c.denominator)) + s
        if height is not None:
            a = max(a, -height)
            b = min(b, height)
        for yi in range(a, b + 1):
            d = yi - c
            t = d * d
            if t > bound:
                continue
            rest = budget - qi[i] * t
            y[i] = yi
            z[i] = yi - cen[i]
            if i == 0:
                if rest == 0:
                    yield list(y)
            else:
                yield from rec(i - 1, rest)

    yield from rec(m - 1, mpq(radius.numerator, radius.denominator))


def _quadric_points(a: RatMatrix, b: Sequence[Fraction], c: Fraction,
                    height: int | None) -> list[IntVector]:
    """Integer x in the height box with x^T a x + 2 b·x + c == 0."""
    n = a.rows
    free, rest, sgn = _free_split(a)
    if height is None and free:
        raise DomainError("an unbounded search needs a definite form")
    a_rr = _submatrix(a, rest, rest).scale(sgn)
    a_rf = _submatrix(a, rest, free)
    a_ff = _submatrix(a, free, free)
    q = _fincke_pohst_form(a_rr)
    pinv = inverse(a_rr) if rest else a_rr
    b_r = [b[i] for i in rest]
    b_f = [b[i] for i in free]

    out: list[IntVector] = []
    box = range(-height, height + 1) if free else ()
    for xf in itertools.product(box, repeat=len(free)):
        # in the rest coordinates: y^T P y + 2 lin·y + const == 0 with P positive definite
        lin = tuple(sgn * (x + bb) for x, bb in zip(a_rf @ xf, b_r))
        const = sgn * (a_ff.bilinear(xf, xf) + 2 * dot(b_f, xf) + c)
        ystar = tuple(-x for x in (pinv @ lin)) if rest else ()
        radius = (pinv.bilinear(lin, lin) if rest else 0) - const
        for y in _shell_points(q, ystar, radius, height):
            v = [0] * n
            for idx, val in zip(free, xf):
                v[idx] = val
            for idx, val in zip(rest, y):
                v[idx] = val
            out.append(tuple(v))
    return out


def enumerate_norm_vectors(l: Lattice, norm, height: int | None = DEFAULT_HEIGHT,
                           linear: tuple[Sequence, object] | None = None) -> list[IntVector]:
    """All integer vectors v with max|v_i| <= height and v·G·v == norm, lexicographically sorted.

    ``linear=(f, value)`` additionally imposes f·v == value (plain coordinate
    dot product).  ``height=None`` removes the box; it is only allowed when the
    form is definite, where the solution set is finite.
    """
    norm = Fraction(norm)
    if height is not None and height < 0:
        raise ValueError("height must be nonnegative")
    gram = l.gram
    n = l.rank
    zero = (Fraction(0),) * n
    if linear is None:
        out = _quadric_points(gram, zero, -norm, height)
        out.sort()
        return out

    f = tuple(Fraction(x) for x in linear[0])
    value = Fraction(linear[1])
    if len(f) != n:
        raise DimensionError("linear functional has the wrong length")
    support = [i for i in range(n) if f[i] != 0]
    if not support:
        return enumerate_norm_vectors(l, norm, height) if value == 0 else []
    p = min(support, key=lambda i: (abs(f[i]), i))
    keep = [i for i in range(n) if i != p]
    # v = shift + E u, with v_p = (value - sum_{j != p} f_j u_j) / f_p
    emb = [[Fraction(0)] * len(keep) for _ in range(n)]
    for k, i in enumerate(keep):
        emb[i][k] = Fraction(1)
        emb[p][k] = -f[i] / f[p]
    e = RatMatrix.from_rows(emb)
    shift = tuple(value / f[p] if i == p else Fraction(0) for i in range(n))
    a = e.T @ gram @ e
    b = e.T @ (gram @ shift)
    c = gram.bilinear(shift, shift) - norm
    out = []
    for u in _quadric_points(a, b, c, height):
        vp = shift[p] + dot(emb[p], u)
        if vp.denominator != 1 or (height is not None and abs(vp) > height):
            continue
        v = list(u[:p]) + [int(vp)] + list(u[p:])
        out.append(tuple(v))
    out.sort()
    return out


def iter_norm_vectors_by_height(l: Lattice, norm, height: int,
                                linear: tuple[Sequence, object] | None = None) -> Iterator[IntVector]:
    """Same vectors as :func:`enumerate_norm_vectors`, ordered by max|v_i| then lexicographically.

    Each level is enumerated only when the caller asks for it, so searches that
    succeed early never pay for the full box.
    """
    for h in range(height + 1):
        for v in enumerate_norm_vectors(l, norm, h, linear):
            if h == 0 or max(map(abs, v)) == h:
                yield v


# --- diagonalization -------------------------------------------------------

def orthogonal_complement(l: Lattice, v: Sequence[int]) -> RatMatrix:
    """Integer basis (columns) of the vectors orthogonal to ``v``.

    When the functional x -> x·v has a unit coefficient the basis is written
    down directly, which keeps entries small across repeated splittings.
    """
    _require_integral(l)
    row = [int(x) for x in l.gram @ tuple(v)]
    n = len(row)
    p = next((i for i in range(n) if abs(row[i]) == 1), None)
    if p is None:
        return integer_kernel(row)
    cols = []
    for j in range(n):
        if j == p:
            continue
        col = [0] * n
        col[j] = 1
        col[p] = -row[p] * row[j]
        cols.append(col)
    return RatMatrix.from_columns(cols)


def diagonalize_definite(l: Lattice) -> RatMatrix | None:
    """Columns w_1..w_r with w_i·w_j = ±δ_ij for a definite unimodular lattice, or None.

    Unit vectors of a definite lattice L = Z^k ⊕ L0 are exactly ±e_i, so the
    greedy lexicographic choice below is complete: it fails only when L has a
    summand without unit vectors.
    """
    n = l.rank
    if n == 0:
        return RatMatrix.zeros(0, 0)
    sgn = _is_definite(l.gram)
    if sgn == 0:
        raise DomainError("lattice is not definite")
    chosen: list[IntVector] = []
    for v in enumerate_norm_vectors(l, sgn, height=None):
        if v[next(i for i, x in enumerate(v) if x)] < 0:
            continue
        if all(l.pair(v, w) == 0 for w in chosen):
            chosen.append(v)
            if len(chosen) == n:
                return RatMatrix.from_columns(chosen)
    return None


def _sign_normalized(v: Sequence[int]) -> IntVector:
    v = tuple(int(x) for x in v)
    first = next((x for x in v if x), 0)
    return tuple(-x for x in v) if first < 0 else v


def _standard_diagonal(n: int) -> RatMatrix:
    return RatMatrix.diag([1] + [-1] * (n - 1))


def split_negative_units(l: Lattice, height: int,
                         functional: Sequence | None = None,
                         value=-1) -> tuple[IntVector, list[IntVector]] | None:
    """Peel norm -1 vectors off an odd unimodular lattice of signature (1, n-1).

    Returns ``(e0, [e1, ..., e_{n-1}])`` in the coordinates of ``l`` with
    e0 of norm +1 and pairwise orthogonal e_i of norm -1, or None if the
    depth-first search runs out of candidates within ``height`` (measured in
    the coordinates of each intermediate complement).  With ``functional``
    (a vector k) every e_i must also satisfy k·e_i == value under the Gram
    pairing.

    Splitting off a norm -1 vector leaves a unimodular lattice of signature
    (1, n-2); complements that come out even are skipped, so the recursion
    stays inside odd lattices where every step is again of the same kind.
    """
    _require_integral(l)
    n = l.rank
    ident = RatMatrix.identity(n)
    k0 = None if functional is None else tuple(Fraction(x) for x in functional)

    def rec(gram: RatMatrix, basis: RatMatrix, k) -> tuple[IntVector, list[IntVector]] | None:
        m = gram.rows
        sub = Lattice(gram)
        if m == 1:
            return tuple(int(x) for x in basis.col(0)), []
        linear = None if k is None else (gram @ k, value)
        for v in iter_norm_vectors_by_height(sub, -1, height, linear):
            if v[next(i for i, x in enumerate(v) if x)] < 0:
                continue
            c = orthogonal_complement(sub, v)
            g2 = c.T @ gram @ c
            if m > 2 and parity(Lattice(g2)) == "even":
                continue
            k2 = None
            if k is not None:
                # project k onto the complement and express it in the complement basis
                kv = sub.pair(k, v)
                proj = tuple(x + kv * y for x, y in zip(k, v))
                k2 = express_in_columns(c, proj)
            found = rec(g2, basis @ c, k2)
            if found is not None:
                e0, rest = found
                return e0, [tuple(int(x) for x in basis @ v)] + rest
        return None

    return rec(l.gram, ident, k0)


def diagonalize_unimodular(l: Lattice, height: int = DEFAULT_HEIGHT) -> BasisChange:
    """Integral T with T^T·G·T = diag(1, -1, ..., -1).

    Columns are sign-normalized (first nonzero entry positive) and the
    negative ones sorted in decreasing lexicographic order, so a diagonal Gram
    comes back as the identity or a permutation matrix.
    """
    _require_integral(l)
    if not is_unimodular(l):
        raise DomainError("lattice is not unimodular")
    sig = signature(l.gram)
    if sig != Signature(1, l.rank - 1, 0):
        raise DomainError(f"expected signature (1,{l.rank - 1}), got {sig}")
    if parity(l) != "odd" and l.rank > 1:
        raise DomainError("even lattices have no diagonal basis")
    target = _standard_diagonal(l.rank)
    if l.gram == target:
        return BasisChange(RatMatrix.identity(l.rank))
    found = split_negative_units(l, height)
    if found is None:
        raise BoundedSearchExhausted(f"no diagonal basis found within height {height}")
    e0, negs = found
    cols = [_sign_normalized(e0)] + sorted((_sign_normalized(v) for v in negs), reverse=True)
    t = RatMatrix.from_columns(cols)
    if t.T @ l.gram @ t != target:
        raise AssertionError("diagonalization failed its own postcondition")
    return BasisChange(t)


def is_orthonormal_basis(l: Lattice, t: RatMatrix) -> bool:
    """True iff ``t`` is an integral basis change taking ``l`` to diag(1, -1, ..., -1)."""
    return (t.is_square and t.rows == l.rank and t.is_integral() and abs(det(t)) == 1
            and t.T @ l.gram @ t == _standard_diagonal(l.rank))
