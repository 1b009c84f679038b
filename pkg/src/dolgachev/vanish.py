"""Bounded case analysis for the vanishing of H0 and H2 of differences of line bundles.

A candidate effective class Z is split as Z = Z_h + sum m_c c over the twelve
fiber components c.  Each split gets a verdict from a fixed rule list; a
witness class is closed when every split within the multiplicity bound is
excluded.  Some rules rest on geometric facts that are not checked here; they
are listed in AXIOMS and quoted by name in reports.

Counting every split of a target at bound 4 means 5**12 maps, so counts are
assembled fiber by fiber: the rules only look at per-fiber data plus the
residual self-intersection, which is additive over fibers because components
of different fibers are orthogonal.  ``enumerate_decompositions`` is the
direct route and the tests compare the two on restricted supports.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from dolgachev.ratmat import format_rational, is_integral_vector
from dolgachev.rroch import Collection, euler_pairing
from dolgachev.surface import (
    DivisorClass,
    SurfaceModel,
    integral_span_coefficients,
    k_degree,
    omega_degree,
    pair,
)

DEFAULT_BOUND = 4

AXIOMS = {
    "K_NONNEG": "every effective class has K-degree >= 0: vertical curves have K-degree 0 "
                "and every horizontal curve meets a fiber in >= 6 points, so has K-degree >= 1",
    "VERTICAL": "an effective class of K-degree 0 is a nonnegative combination of fiber "
                "components and reduced multiple fibers; K itself is not effective",
    "HORIZONTAL_UNIQUE": "a K-degree 1 effective class has exactly one horizontal component, "
                         "taken with multiplicity one",
    "NO_RAT_ELL": "no horizontal component is a rational or elliptic curve",
    "K_DEGREE_2": "K-degree 2 witnesses are closed by arguments outside this rule set",
}


class Rule(str, Enum):
    REQUIRED_MISSING = "REQUIRED_MISSING"
    FIBER_MULTIPLE = "FIBER_MULTIPLE"
    HORIZONTAL_NEG = "HORIZONTAL_NEG"
    OMEGA_LT_MINUS2 = "OMEGA_LT_MINUS2"
    OMEGA_RAT_ELL = "OMEGA_RAT_ELL"


RULE_ORDER = (Rule.REQUIRED_MISSING, Rule.FIBER_MULTIPLE, Rule.HORIZONTAL_NEG,
              Rule.OMEGA_LT_MINUS2, Rule.OMEGA_RAT_ELL)


@dataclass(frozen=True)
class Verdict:
    rule: Rule | None = None

    @property
    def surviving(self) -> bool:
        return self.rule is None

    def __str__(self) -> str:
        return "SURVIVING" if self.rule is None else f"EXCLUDED({self.rule.value})"


SURVIVING = Verdict()


@dataclass(frozen=True)
class Component:
    name: str
    cls: DivisorClass
    fiber: int


def catalog(m: SurfaceModel) -> tuple[Component, ...]:
    """All components of the reducible fibers, the implicit one of each fiber last."""
    out = []
    for k, (_, comps) in enumerate(m.i3_components()):
        out.extend(Component(n, c, k) for n, c in comps)
    return tuple(out)


def required_components(m: SurfaceModel, z: DivisorClass) -> tuple[str, ...]:
    return tuple(c.name for c in catalog(m) if pair(m, z, c.cls) < 0)


@dataclass(frozen=True)
class Decomposition:
    target: DivisorClass
    multiplicities: tuple[tuple[str, int], ...]
    residual: DivisorClass

    def mult(self) -> dict[str, int]:
        return dict(self.multiplicities)


def decomposition(m: SurfaceModel, z: DivisorClass, mults: Mapping[str, int]) -> Decomposition:
    cat = catalog(m)
    unknown = set(mults) - {c.name for c in cat}
    if unknown:
        raise KeyError(sorted(unknown)[0])
    res = z
    for c in cat:
        res = res - mults.get(c.name, 0) * c.cls
    return Decomposition(z, tuple((c.name, int(mults.get(c.name, 0))) for c in cat), res)


def enumerate_decompositions(m: SurfaceModel, z: DivisorClass, bound: int,
                             support: Iterable[str] | None = None) -> Iterator[Decomposition]:
    """All splits with multiplicities in [0, bound] and every required component present.

    ``support`` restricts which components may carry a nonzero multiplicity.
    Lexicographic in catalog order.
    """
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    cat = catalog(m)
    allowed = None if support is None else set(support)
    req = set(required_components(m, z))
    ranges = []
    for c in cat:
        if allowed is not None and c.name not in allowed:
            if c.name in req:
                return
            ranges.append(range(0, 1))
        elif c.name in req:
            ranges.append(range(1, bound + 1))
        else:
            ranges.append(range(0, bound + 1))
    for ms in itertools.product(*ranges):
        yield decomposition(m, z, {c.name: k for c, k in zip(cat, ms)})


def classify(m: SurfaceModel, d: Decomposition) -> Verdict:
    cat = catalog(m)
    mult = d.mult()
    for c in cat:
        if mult[c.name] == 0 and pair(m, d.target, c.cls) < 0:
            return Verdict(Rule.REQUIRED_MISSING)
    fibers = {}
    for c in cat:
        fibers.setdefault(c.fiber, []).append(mult[c.name])
    if any(all(x >= 1 for x in ms) for ms in fibers.values()):
        return Verdict(Rule.FIBER_MULTIPLE)
    if any(pair(m, d.residual, c.cls) < 0 for c in cat):
        return Verdict(Rule.HORIZONTAL_NEG)
    w = omega_degree(m, d.residual)
    if w < -2:
        return Verdict(Rule.OMEGA_LT_MINUS2)
    if w in (-2, 0):
        return Verdict(Rule.OMEGA_RAT_ELL)
    return SURVIVING


# --- factorized counting ---------------------------------------------------

_FM, _HN, _OK = "FM", "HN", "OK"


def _fiber_table(m: SurfaceModel, z: DivisorClass, comps: Sequence[Component], bound: int,
                 allowed: set | None):
    """Per-fiber (category, residual-square change) for every multiplicity triple."""
    rows = []
    zc = [pair(m, z, c.cls) for c in comps]
    cc = [[pair(m, a.cls, b.cls) for b in comps] for a in comps]
    ranges = []
    for c, p in zip(comps, zc):
        if allowed is not None and c.name not in allowed:
            if p < 0:
                return []
            ranges.append(range(1))
        else:
            ranges.append(range(1 if p < 0 else 0, bound + 1))
    for ms in itertools.product(*ranges):
        if all(x >= 1 for x in ms):
            cat = _FM
        elif any(zc[i] - sum(ms[j] * cc[j][i] for j in range(len(comps))) < 0
                 for i in range(len(comps))):
            cat = _HN
        else:
            cat = _OK
        delta = (-2 * sum(x * p for x, p in zip(ms, zc))
                 + sum(ms[i] * ms[j] * cc[i][j] for i in range(len(comps)) for j in range(len(comps))))
        rows.append((ms, cat, delta))
    return rows


def _fibers(m: SurfaceModel) -> list[list[Component]]:
    groups: dict[int, list[Component]] = {}
    for c in catalog(m):
        groups.setdefault(c.fiber, []).append(c)
    return [groups[k] for k in sorted(groups)]


def verdict_counts(m: SurfaceModel, z: DivisorClass, bound: int,
                   support: Iterable[str] | None = None) -> dict[str, int]:
    """Number of splits per verdict, equal to tallying ``enumerate_decompositions``."""
    allowed = None if support is None else set(support)
    kz = k_degree(m, z)
    state = Counter({(False, False, pair(m, z, z)): 1})
    for comps in _fibers(m):
        table = Counter((cat, delta) for _, cat, delta in _fiber_table(m, z, comps, bound, allowed))
        nxt = Counter()
        for (fm, hn, s), n in state.items():
            for (cat, delta), k in table.items():
                nxt[(fm or cat == _FM, hn or cat == _HN, s + delta)] += n * k
        state = nxt
    out = Counter()
    for (fm, hn, s), n in state.items():
        w = s + kz
        if fm:
            out[Rule.FIBER_MULTIPLE.value] += n
        elif hn:
            out[Rule.HORIZONTAL_NEG.value] += n
        elif w < -2:
            out[Rule.OMEGA_LT_MINUS2.value] += n
        elif w in (-2, 0):
            out[Rule.OMEGA_RAT_ELL.value] += n
        else:
            out["SURVIVING"] += n
    return dict(out)


def surviving_decompositions(m: SurfaceModel, z: DivisorClass, bound: int,
                             support: Iterable[str] | None = None) -> list[Decomposition]:
    """Surviving splits, built only from fiber triples that pass the per-fiber rules."""
    allowed = None if support is None else set(support)
    fibers = _fibers(m)
    ok = []
    for comps in fibers:
        ok.append([ms for ms, cat, _ in _fiber_table(m, z, comps, bound, allowed) if cat == _OK])
    out = []
    for pick in itertools.product(*ok):
        mults = {c.name: x for comps, ms in zip(fibers, pick) for c, x in zip(comps, ms)}
        d = decomposition(m, z, mults)
        if classify(m, d).surviving:
            out.append(d)
    return out


# --- symbolic profile ------------------------------------------------------

_LETTERS = "abcdefghijkl"


def residual_profile(m: SurfaceModel, z: DivisorClass, support: Sequence[str]) -> dict[tuple, Fraction]:
    """Residual self-intersection as a polynomial in the multiplicities over ``support``.

    Keys are () for the constant, (i,) for linear and (i, j) with i <= j for
    quadratic monomials, indices into ``support``.
    """
    ns = m.namespace()
    cs = [ns[s] for s in support]
    poly: dict[tuple, Fraction] = {(): pair(m, z, z)}
    for i, c in enumerate(cs):
        poly[(i,)] = -2 * pair(m, z, c)
        for j in range(i, len(cs)):
            w = pair(m, c, cs[j])
            poly[(i, j)] = w if i == j else 2 * w
    return {k: v for k, v in poly.items() if v != 0 or k == ()}


def evaluate_profile(poly: Mapping[tuple, Fraction], values: Sequence[int]) -> Fraction:
    total = Fraction(0)
    for mono, coef in poly.items():
        term = coef
        for i in mono:
            term *= values[i]
        total += term
    return total


def format_profile(poly: Mapping[tuple, Fraction]) -> str:
    def key(item):
        mono = item[0]
        return (len(mono) if len(mono) < 2 or mono[0] != mono[1] else 1.5, mono)

    parts = []
    for mono, coef in sorted(poly.items(), key=key):
        if mono and coef == 0:
            continue
        if not mono:
            body = format_rational(abs(coef))
        else:
            if len(mono) == 2 and mono[0] == mono[1]:
                var = f"{_LETTERS[mono[0]]}^2"
            else:
                var = "".join(_LETTERS[i] for i in mono)
            body = ("" if abs(coef) == 1 else format_rational(abs(coef))) + var
        parts.append(("-" if coef < 0 else "+", body))
    head = parts[0]
    out = ("-" if head[0] == "-" else "") + head[1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# --- vertical targets ------------------------------------------------------

def _k_semigroup(m: SurfaceModel) -> list[int]:
    gens = [m.fiber_class_k_multiple]
    for f in m.fibers:
        if f.multiplicity > 1:
            gens.append(m.fiber_class_k_multiple // f.multiplicity)
    return gens


def _in_semigroup(a: int, gens: Sequence[int]) -> bool:
    reach = [True] + [False] * max(a, 0)
    for x in range(1, a + 1):
        reach[x] = any(g <= x and reach[x - g] for g in gens)
    return a >= 0 and reach[a]


def vertical_effectivity(m: SurfaceModel, z: DivisorClass) -> tuple[bool, str]:
    """Decide whether a K-degree 0 class is a nonnegative combination of fiber curves."""
    fibers = [(f, comps) for f, comps in m.i3_components()]
    gens = [m.canonical]
    for f, comps in fibers:
        gens.extend(c for _, c in comps[:-1])
    coeffs = integral_span_coefficients(m, gens, z)
    if coeffs is None:
        return False, "not in the span of K and the fiber components"
    if not is_integral_vector(coeffs):
        return False, "not an integral combination of K and the fiber components"
    kcoef = coeffs[0]
    rest = list(coeffs[1:])
    used = Fraction(0)
    parts = []
    pos = 0
    for f, comps in fibers:
        xs = rest[pos:pos + len(comps) - 1]
        pos += len(comps) - 1
        implicit = max([Fraction(0)] + [-x for x in xs])
        used += implicit
        mults = [x + implicit for x in xs] + [implicit]
        parts.extend(f"{format_rational(k)}{n}" for k, (n, _) in zip(mults, comps) if k)
    a = kcoef - m.fiber_class_k_multiple * used
    sg = _k_semigroup(m)
    if _in_semigroup(int(a), sg):
        what = " + ".join(parts + ([f"{a}K"] if a else [])) or "0"
        return True, f"effective vertical combination {what}"
    return False, (f"needs {format_rational(a)}K beyond fiber components; "
                   f"multiples of K supported on fibers are generated by {sg}")


# --- reports ---------------------------------------------------------------

class Status(str, Enum):
    EXCLUDED_K_NEGATIVE = "EXCLUDED_K_NEGATIVE"
    EXCLUDED_VERTICAL = "EXCLUDED_VERTICAL"
    VERTICAL_EFFECTIVE = "VERTICAL_EFFECTIVE"
    ENUMERATED = "ENUMERATED"
    BOUND_INSUFFICIENT = "BOUND_INSUFFICIENT"
    AXIOM_CLOSED = "AXIOM_CLOSED"
    UNSUPPORTED = "UNSUPPORTED"


@dataclass
class WitnessReport:
    kind: str  # "H0" or "H2"
    target: DivisorClass
    k_degree: Fraction
    self_intersection: Fraction
    status: Status
    required: tuple[str, ...] = ()
    counts: dict[str, int] = field(default_factory=dict)
    surviving: list[Decomposition] = field(default_factory=list)
    profile: str | None = None
    detail: str = ""
    axioms: tuple[str, ...] = ()

    @property
    def surviving_count(self) -> int:
        if self.status == Status.VERTICAL_EFFECTIVE:
            return 1
        return self.counts.get("SURVIVING", 0)

    @property
    def mechanically_closed(self) -> bool:
        if self.status in (Status.EXCLUDED_K_NEGATIVE, Status.EXCLUDED_VERTICAL):
            return True
        return self.status == Status.ENUMERATED and self.surviving_count == 0

    @property
    def closed(self) -> bool:
        return self.mechanically_closed or self.status == Status.AXIOM_CLOSED

    def as_dict(self, names: Sequence[str]) -> dict:
        return {
            "kind": self.kind,
            "target": self.target.format(names),
            "k_degree": format_rational(self.k_degree),
            "self_intersection": format_rational(self.self_intersection),
            "status": self.status.value,
            "required": list(self.required),
            "counts": dict(sorted(self.counts.items())),
            "surviving": [dict(d.multiplicities) for d in self.surviving],
            "profile": self.profile,
            "detail": self.detail,
            "axioms": list(self.axioms),
        }


@dataclass
class PairReport:
    i: int | None
    j: int | None
    euler: Fraction
    witnesses: tuple[WitnessReport, WitnessReport]
    bound: int

    @property
    def warning(self) -> str | None:
        return None if self.euler == 0 else f"Euler pairing is {format_rational(self.euler)}, not 0"

    @property
    def closed(self) -> bool:
        return all(w.closed for w in self.witnesses)

    @property
    def axiom_closed(self) -> bool:
        return self.closed and any(w.status == Status.AXIOM_CLOSED for w in self.witnesses)

    @property
    def bound_insufficient(self) -> bool:
        return any(w.status == Status.BOUND_INSUFFICIENT for w in self.witnesses)

    @property
    def surviving(self) -> int:
        return sum(w.surviving_count for w in self.witnesses)

    def as_dict(self, names: Sequence[str]) -> dict:
        return {"i": self.i, "j": self.j, "euler": format_rational(self.euler),
                "bound": self.bound, "closed": self.closed, "axiom_closed": self.axiom_closed,
                "warning": self.warning,
                "witnesses": [w.as_dict(names) for w in self.witnesses]}


def _profile_support(m: SurfaceModel, z: DivisorClass) -> list[str]:
    return [c.name for c in catalog(m) if pair(m, z, c.cls) <= 0]


def witness_report(m: SurfaceModel, kind: str, z: DivisorClass, bound: int,
                   split_extension: bool = False) -> WitnessReport:
    kz = k_degree(m, z)
    base = dict(kind=kind, target=z, k_degree=kz, self_intersection=pair(m, z, z))
    if kz < 0:
        return WitnessReport(**base, status=Status.EXCLUDED_K_NEGATIVE,
                             detail="negative K-degree", axioms=("K_NONNEG",))
    if kz == 0:
        effective, detail = vertical_effectivity(m, z)
        status = Status.VERTICAL_EFFECTIVE if effective else Status.EXCLUDED_VERTICAL
        return WitnessReport(**base, status=status, detail=detail, axioms=("K_NONNEG", "VERTICAL"))
    req = required_components(m, z)
    support = _profile_support(m, z)
    profile = format_profile(residual_profile(m, z, support)) if support else None
    if kz == 2:
        rep = WitnessReport(**base, status=Status.AXIOM_CLOSED, required=req, profile=profile,
                            detail="K-degree 2", axioms=("K_DEGREE_2",))
        if split_extension:
            rep.counts = verdict_counts(m, z, bound)
            rep.detail += "; single-horizontal-component test run for information"
        return rep
    if kz != 1:
        return WitnessReport(**base, status=Status.UNSUPPORTED, required=req,
                             detail=f"K-degree {format_rational(kz)} is outside the rule set")
    axioms = ("K_NONNEG", "HORIZONTAL_UNIQUE", "NO_RAT_ELL")
    if req and bound < 1:
        return WitnessReport(**base, status=Status.BOUND_INSUFFICIENT, required=req, profile=profile,
                             detail=f"required components {', '.join(req)} need bound >= 1",
                             axioms=axioms)
    counts = verdict_counts(m, z, bound)
    survivors = surviving_decompositions(m, z, bound) if counts.get("SURVIVING") else []
    return WitnessReport(**base, status=Status.ENUMERATED, required=req, counts=counts,
                         surviving=survivors, profile=profile, axioms=axioms)


def ext_vanishing_report(m: SurfaceModel, l1: DivisorClass, l2: DivisorClass,
                         bound: int = DEFAULT_BOUND, split_extension: bool = False,
                         i: int | None = None, j: int | None = None) -> PairReport:
    """H0 witness l2 - l1 and H2 witness K + l1 - l2 (Serre duality)."""
    z0 = l2 - l1
    z2 = m.canonical + l1 - l2
    return PairReport(i, j, euler_pairing(m, l1, l2),
                      (witness_report(m, "H0", z0, bound, split_extension),
                       witness_report(m, "H2", z2, bound, split_extension)), bound)


@dataclass
class SweepReport:
    bound: int
    pairs: list[PairReport]

    @property
    def surviving_total(self) -> int:
        return sum(p.surviving for p in self.pairs)

    @property
    def axiom_closed(self) -> list[tuple[int, int, str]]:
        return [(p.i, p.j, w.kind) for p in self.pairs for w in p.witnesses
                if w.status == Status.AXIOM_CLOSED]

    @property
    def bound_insufficient(self) -> list[tuple[int, int, str]]:
        return [(p.i, p.j, w.kind) for p in self.pairs for w in p.witnesses
                if w.status == Status.BOUND_INSUFFICIENT]

    @property
    def unsupported(self) -> list[tuple[int, int, str]]:
        return [(p.i, p.j, w.kind) for p in self.pairs for w in p.witnesses
                if w.status == Status.UNSUPPORTED]

    @property
    def mechanically_closed(self) -> int:
        return sum(w.mechanically_closed for p in self.pairs for w in p.witnesses)

    @property
    def passed(self) -> bool:
        return (self.surviving_total == 0 and not self.bound_insufficient
                and not self.unsupported and all(p.closed for p in self.pairs))

    def as_dict(self, names: Sequence[str]) -> dict:
        return {
            "bound": self.bound,
            "surviving_total": self.surviving_total,
            "mechanically_closed_witnesses": self.mechanically_closed,
            "axiom_closed": [list(t) for t in self.axiom_closed],
            "bound_insufficient": [list(t) for t in self.bound_insufficient],
            "unsupported": [list(t) for t in self.unsupported],
            "passed": self.passed,
            "axioms": dict(AXIOMS),
            "pairs": [p.as_dict(names) for p in self.pairs],
        }


def vanishing_sweep(m: SurfaceModel, col: Collection, bound: int = DEFAULT_BOUND,
                     split_extension: bool = False) -> SweepReport:
    """Both vanishing witnesses for every ordered pair i > j of the collection."""
    cs = col.classes
    pairs = []
    for i in range(2, len(cs) + 1):
        for j in range(1, i):
            pairs.append(ext_vanishing_report(m, cs[i - 1], cs[j - 1], bound, split_extension, i, j))
    return SweepReport(bound, pairs)

