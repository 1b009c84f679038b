"""Numerically exceptional collections: the chi-matrix, span scan, and diagonal-basis search.

Orientation: ``chi_matrix(...)[i][j]`` is chi(A_i, A_j) = chi(A_j - A_i).  A
collection is numerically exceptional when the diagonal is 1 and every entry
with i > j vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from dolgachev.lattice import (
    DEFAULT_HEIGHT,
    BoundedSearchExhausted,
    Lattice,
    diagonalize_unimodular,
    split_negative_units,
)
from dolgachev.ratmat import DomainError, is_integral_vector
from dolgachev.rroch import Collection, euler_pairing
from dolgachev.surface import (
    DivisorClass,
    SurfaceModel,
    from_pic,
    integral_span_coefficients,
    is_integral,
    k_degree,
    pair,
    pic_coordinates,
    pic_lattice,
)

__all__ = [
    "Collection",
    "ExceptionalityVerdict",
    "ScanHit",
    "VialResult",
    "chi_matrix",
    "k_relation_holds",
    "pairing_table",
    "in_vertical_span",
    "pair_scan",
    "span_generators",
    "verify_numerically_exceptional",
    "vial_search",
]


def _require_integral(m: SurfaceModel, col: Collection) -> None:
    for name, c in col:
        if not is_integral(m, c):
            raise DomainError(f"member {name} is not in the integral Picard lattice")


def chi_matrix(m: SurfaceModel, col: Collection) -> list[list[Fraction]]:
    _require_integral(m, col)
    cs = col.classes
    return [[euler_pairing(m, a, b) for b in cs] for a in cs]


@dataclass(frozen=True)
class ExceptionalityVerdict:
    passed: bool
    position: tuple[int, int] | None = None  # 1-based (i, j)
    value: Fraction | None = None

    def __str__(self) -> str:
        if self.passed:
            return "PASS"
        i, j = self.position
        return f"FAIL at ({i},{j}): chi = {self.value}"


def verify_numerically_exceptional(m: SurfaceModel, col: Collection) -> ExceptionalityVerdict:
    """Row-major scan for the first entry breaking the unit-lower-triangular pattern."""
    cs = col.classes
    for i, a in enumerate(cs):
        for j, b in enumerate(cs):
            if j > i:
                continue
            v = euler_pairing(m, a, b)
            want = 1 if i == j else 0
            if v != want:
                return ExceptionalityVerdict(False, (i + 1, j + 1), v)
    return ExceptionalityVerdict(True)


def span_generators(m: SurfaceModel) -> list[tuple[str, DivisorClass]]:
    """K and the listed fiber components: the lattice of purely vertical classes."""
    gens = [("K", m.canonical)]
    for f in m.fibers:
        gens.extend((c, m.basis_class(c)) for c in f.components)
    return gens


@dataclass(frozen=True)
class ScanHit:
    i: int
    j: int
    difference: DivisorClass  # A_j - A_i
    witness: str  # "H0" when A_j - A_i is vertical, "H2" when K + A_i - A_j is


def _in_integral_span(m: SurfaceModel, gens, d: DivisorClass) -> bool:
    coeffs = integral_span_coefficients(m, gens, d)
    return coeffs is not None and is_integral_vector(coeffs)


def in_vertical_span(m: SurfaceModel, d: DivisorClass) -> bool:
    return _in_integral_span(m, [c for _, c in span_generators(m)], d)


def pair_scan(m: SurfaceModel, col: Collection) -> list[ScanHit]:
    """Pairs i > j > 1 whose K-degree-0 difference lies in the integral vertical span."""
    gens = [c for _, c in span_generators(m)]
    cs = col.classes
    hits = []
    for i in range(2, len(cs) + 1):
        for j in range(2, i):
            diff = cs[j - 1] - cs[i - 1]
            if k_degree(m, diff) != 0:
                continue
            if _in_integral_span(m, gens, diff):
                hits.append(ScanHit(i, j, diff, "H0"))
            elif _in_integral_span(m, gens, m.canonical - diff):
                hits.append(ScanHit(i, j, diff, "H2"))
    return hits


@dataclass(frozen=True)
class VialResult:
    collection: Collection
    e0: tuple[int, ...]
    negatives: tuple[tuple[int, ...], ...]
    route: str


def _orient(p: Lattice, k: Sequence, e0, negs) -> tuple | None:
    """Flip signs so that K.e0 = -3 and K.e_i = -1; None if the K-degrees do not allow it."""
    ke0 = p.pair(k, e0)
    if abs(ke0) != 3:
        return None
    if ke0 > 0:
        e0 = tuple(-x for x in e0)
    out = []
    for e in negs:
        ke = p.pair(k, e)
        if abs(ke) != 1:
            return None
        out.append(tuple(-x for x in e) if ke > 0 else tuple(e))
    return e0, sorted(out, reverse=True)


def vial_search(m: SurfaceModel, height: int = DEFAULT_HEIGHT) -> VialResult:
    """Build O, e1..e9, e0, 2e0 from a diagonal Picard basis with K = sum(e_i) - 3e0.

    First diagonalizes the Picard lattice and tries the sign adjustments of
    that basis; when its K-degrees do not fit, searches directly for norm -1
    vectors of K-degree -1.  Raises BoundedSearchExhausted if neither route
    succeeds within ``height``.
    """
    p = pic_lattice(m)
    k = pic_coordinates(m, m.canonical)
    found = None
    route = "diagonal basis"
    try:
        t = diagonalize_unimodular(p, height).matrix
        cols = [tuple(int(x) for x in c) for c in t.columns()]
        found = _orient(p, k, cols[0], cols[1:])
    except BoundedSearchExhausted:
        found = None
    if found is None:
        route = "constrained search"
        split = split_negative_units(p, height, functional=k, value=-1)
        if split is not None:
            found = _orient(p, k, split[0], split[1])
    if found is None:
        raise BoundedSearchExhausted(
            f"no diagonal basis with K = sum(e_i) - 3e0 found within height {height}")
    e0, negs = found

    n = p.rank
    for a in range(n):
        va = e0 if a == 0 else negs[a - 1]
        for b in range(a, n):
            vb = e0 if b == 0 else negs[b - 1]
            want = (1 if a == 0 else -1) if a == b else 0
            if p.pair(va, vb) != want:
                raise AssertionError("diagonal basis failed its orthogonality check")
    relation = [sum(e[i] for e in negs) - 3 * e0[i] for i in range(n)]
    if tuple(Fraction(x) for x in relation) != tuple(k):
        raise AssertionError("diagonal basis failed the K relation")

    classes = [m.zero()] + [from_pic(m, e) for e in negs] + [from_pic(m, e0), from_pic(m, [2 * x for x in e0])]
    col = Collection.of(classes, name="diagonal_basis_collection")
    verdict = verify_numerically_exceptional(m, col)
    if not verdict.passed:
        raise AssertionError(f"constructed collection is not numerically exceptional: {verdict}")
    return VialResult(col, tuple(e0), tuple(tuple(e) for e in negs), route)


def k_relation_holds(m: SurfaceModel, col: Collection) -> bool:
    """K equals A2 + ... + A10 - 3*A11 (1-based names)."""
    cs = col.classes
    total = m.zero()
    for c in cs[1:10]:
        total = total + c
    return total - 3 * cs[10] == m.canonical


def pairing_table(m: SurfaceModel, classes: Sequence[DivisorClass]) -> list[list[Fraction]]:
    return [[pair(m, a, b) for b in classes] for a in classes]
