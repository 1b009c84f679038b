"""Surface models: a named divisor basis with its intersection form.

A model file is JSON with rational entries written as ``"p/q"`` strings.  The
bundled ``dolgachev23.json`` carries the intersection table of the surface Y
over the basis K_Y, R2, R5, R8, H1, H2, F1, F2, G1, G2.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from dolgachev.lattice import BasisChange, Lattice
from dolgachev.ratmat import (
    DimensionError,
    DomainError,
    RatMatrix,
    SingularMatrixError,
    det,
    format_rational,
    is_integral_vector,
    parse_rational,
    solve,
)


class ModelParseError(ValueError):
    """A model, collection or claims file could not be read."""


@dataclass(frozen=True)
class DivisorClass:
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(Fraction(x) for x in self.coords))

    @classmethod
    def zero(cls, rank: int) -> DivisorClass:
        return cls((Fraction(0),) * rank)

    @classmethod
    def basis_vector(cls, rank: int, i: int) -> DivisorClass:
        return cls(tuple(Fraction(int(j == i)) for j in range(rank)))

    @property
    def rank(self) -> int:
        return len(self.coords)

    def _check(self, other: DivisorClass) -> None:
        if self.rank != other.rank:
            raise DimensionError(f"classes of rank {self.rank} and {other.rank}")

    def __add__(self, other: DivisorClass) -> DivisorClass:
        self._check(other)
        return DivisorClass(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: DivisorClass) -> DivisorClass:
        self._check(other)
        return DivisorClass(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> DivisorClass:
        return DivisorClass(tuple(-a for a in self.coords))

    def __mul__(self, c) -> DivisorClass:
        c = Fraction(c)
        return DivisorClass(tuple(c * a for a in self.coords))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_integral_vector(self) -> bool:
        return is_integral_vector(self.coords)

    def to_strings(self) -> list[str]:
        return [format_rational(x) for x in self.coords]

    def format(self, names: Sequence[str]) -> str:
        """Human-readable linear combination, e.g. ``-3K_Y + H2``."""
        parts = []
        for c, n in zip(self.coords, names):
            if c == 0:
                continue
            mag = abs(c)
            coef = "" if mag == 1 else format_rational(mag)
            sign = "-" if c < 0 else "+"
            parts.append((sign, f"{coef}{n}"))
        if not parts:
            return "0"
        head_sign, head = parts[0]
        out = ("-" if head_sign == "-" else "") + head
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


@dataclass(frozen=True)
class FiberDescriptor:
    label: str
    components: tuple[str, ...]
    multiplicity: int
    kodaira_type: str
    implicit_component: str | None = None
    # expected pairings of (listed..., implicit) components with the reference curve
    section_degrees: tuple[int, ...] | None = None


@dataclass(frozen=True)
class SurfaceModel:
    name: str
    basis_names: tuple[str, ...]
    gram: RatMatrix
    canonical: DivisorClass
    pic_basis_change: RatMatrix
    fibers: tuple[FiberDescriptor, ...]
    chi_structure_sheaf: int
    c2: int
    fiber_class_k_multiple: int = 6
    reference_curve: str | None = None
    pic_names: tuple[str, ...] | None = None
    _names: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def rank(self) -> int:
        return len(self.basis_names)

    @property
    def lattice(self) -> Lattice:
        return Lattice(self.gram)

    @property
    def basis_change(self) -> BasisChange:
        return BasisChange(self.pic_basis_change)

    def basis_class(self, name: str) -> DivisorClass:
        return DivisorClass.basis_vector(self.rank, self.basis_names.index(name))

    def fiber_class(self) -> DivisorClass:
        return self.fiber_class_k_multiple * self.canonical

    def i3_components(self) -> list[tuple[FiberDescriptor, list[tuple[str, DivisorClass]]]]:
        """Each reducible fiber with all of its components, the implicit one last."""
        out = []
        phi = self.fiber_class()
        for f in self.fibers:
            if not f.components:
                continue
            comps = [(c, self.basis_class(c)) for c in f.components]
            rest = phi
            for _, c in comps:
                rest = rest - c
            comps.append((f.implicit_component or f"{f.label}'", rest))
            out.append((f, comps))
        return out

    def namespace(self) -> dict[str, DivisorClass]:
        """Names usable in class expressions: basis names and implicit fiber components."""
        if not self._names:
            ns = {n: self.basis_class(n) for n in self.basis_names}
            for _, comps in self.i3_components():
                for n, c in comps:
                    ns.setdefault(n, c)
            self._names.update(ns)
        return dict(self._names)

    def zero(self) -> DivisorClass:
        return DivisorClass.zero(self.rank)


# --- pairings --------------------------------------------------------------

def _coords(m: SurfaceModel, d: DivisorClass) -> tuple[Fraction, ...]:
    if d.rank != m.rank:
        raise DimensionError(f"class of rank {d.rank} on a model of rank {m.rank}")
    return d.coords


def pair(m: SurfaceModel, d1: DivisorClass, d2: DivisorClass) -> Fraction:
    return m.gram.bilinear(_coords(m, d1), _coords(m, d2))


def k_degree(m: SurfaceModel, d: DivisorClass) -> Fraction:
    return pair(m, m.canonical, d)


def omega_degree(m: SurfaceModel, d: DivisorClass) -> Fraction:
    """Degree of the dualizing sheaf of a curve in class d: d·d + d·K."""
    return pair(m, d, d) + k_degree(m, d)


def pic_coordinates(m: SurfaceModel, d: DivisorClass) -> tuple[Fraction, ...]:
    """Coordinates of d in the integral Picard basis."""
    return solve(m.pic_basis_change, _coords(m, d))


def is_integral(m: SurfaceModel, d: DivisorClass) -> bool:
    return is_integral_vector(pic_coordinates(m, d))


def pic_lattice(m: SurfaceModel) -> Lattice:
    """The intersection form written in the integral Picard basis."""
    t = m.pic_basis_change
    return Lattice(t.T @ m.gram @ t)


def from_pic(m: SurfaceModel, coords: Sequence) -> DivisorClass:
    return DivisorClass(m.pic_basis_change @ tuple(coords))


# --- expressions -----------------------------------------------------------

_TERM = re.compile(
    r"\s*([+-])?\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?([A-Za-z_][A-Za-z0-9_']*)?\s*")


def parse_class_expr(text: str, namespace: Mapping[str, DivisorClass], rank: int) -> DivisorClass:
    """Evaluate a linear expression such as ``"K_Y + A11"`` or ``"6K_Y - H1 - H2"``.

    Coefficients are integers or ``p/q``; ``*`` between coefficient and name is
    optional.  Unknown names raise :class:`KeyError`.
    """
    s = text.strip()
    if not s:
        raise ModelParseError("empty class expression")
    total = DivisorClass.zero(rank)
    pos = 0
    first = True
    while pos < len(s):
        mt = _TERM.match(s, pos)
        if mt is None or mt.end() == pos:
            raise ModelParseError(f"cannot parse class expression {text!r} at offset {pos}")
        sign, coef, name = mt.groups()
        if sign is None and not first:
            raise ModelParseError(f"missing operator in {text!r} at offset {pos}")
        if coef is None and name is None:
            raise ModelParseError(f"dangling operator in {text!r}")
        c = parse_rational(coef) if coef else Fraction(1)
        if sign == "-":
            c = -c
        if name is None:
            if c != 0:
                raise ModelParseError(f"bare constant {coef} in class expression {text!r}")
        else:
            if name not in namespace:
                raise KeyError(name)
            total = total + c * namespace[name]
        pos = mt.end()
        first = False
    return total


def class_from_json(value, basis_names: Sequence[str]) -> DivisorClass:
    """A class given either as a full list of rationals or as a sparse ``{name: rational}`` map."""
    n = len(basis_names)
    if isinstance(value, list):
        if len(value) != n:
            raise ModelParseError(f"class has {len(value)} coordinates, expected {n}")
        return DivisorClass(tuple(parse_rational(x) for x in value))
    if isinstance(value, dict):
        coords = [Fraction(0)] * n
        for k, x in value.items():
            if k not in basis_names:
                raise ModelParseError(f"unknown basis name {k!r}")
            coords[list(basis_names).index(k)] = parse_rational(x)
        return DivisorClass(tuple(coords))
    raise ModelParseError(f"cannot read a class from {value!r}")


def class_to_json(d: DivisorClass, basis_names: Sequence[str]) -> dict[str, str]:
    return {n: format_rational(x) for n, x in zip(basis_names, d.coords) if x != 0}


# --- loading ---------------------------------------------------------------

def _matrix(rows, what: str, size: int) -> RatMatrix:
    if not isinstance(rows, list) or len(rows) != size:
        raise ModelParseError(f"{what}: expected {size} rows")
    out = []
    for i, r in enumerate(rows):
        if not isinstance(r, list) or len(r) != size:
            raise ModelParseError(f"{what}: row {i} should have {size} entries")
        row = []
        for j, x in enumerate(r):
            try:
                row.append(parse_rational(x))
            except DomainError as e:
                raise ModelParseError(f"{what}[{i}][{j}]: {e}") from None
        out.append(row)
    return RatMatrix.from_rows(out)


def model_from_dict(doc: Mapping) -> SurfaceModel:
    try:
        basis = tuple(doc["basis"])
        n = len(basis)
        gram = _matrix(doc["gram"], "gram", n)
        try:
            canonical = class_from_json(doc["canonical"], basis)
        except DomainError as e:
            raise ModelParseError(f"canonical: {e}") from None
        pbc = doc.get("pic_basis_change")
        pic = _matrix(pbc, "pic_basis_change", n) if pbc is not None else RatMatrix.identity(n)
        fibers = []
        for k, f in enumerate(doc.get("fibers", [])):
            try:
                fibers.append(FiberDescriptor(
                    label=str(f["label"]),
                    components=tuple(f.get("components", [])),
                    multiplicity=int(f.get("multiplicity", 1)),
                    kodaira_type=str(f.get("kodaira_type", "smooth")),
                    implicit_component=f.get("implicit_component"),
                    section_degrees=tuple(f["section_degrees"]) if "section_degrees" in f else None,
                ))
            except (KeyError, TypeError, ValueError) as e:
                raise ModelParseError(f"fibers[{k}]: {e}") from None
        return SurfaceModel(
            name=str(doc.get("name", "model")),
            basis_names=basis,
            gram=gram,
            canonical=canonical,
            pic_basis_change=pic,
            fibers=tuple(fibers),
            chi_structure_sheaf=int(doc.get("chi_structure_sheaf", 1)),
            c2=int(doc.get("c2", 12)),
            fiber_class_k_multiple=int(doc.get("fiber_class_k_multiple", 6)),
            reference_curve=doc.get("reference_curve"),
            pic_names=tuple(doc["pic_names"]) if "pic_names" in doc else None,
        )
    except KeyError as e:
        raise ModelParseError(f"missing field {e.args[0]!r}") from None


def read_json(path) -> dict:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise ModelParseError(f"{path}: {e.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelParseError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from None


def load_model(path) -> SurfaceModel:
    return model_from_dict(read_json(path))


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("dolgachev") / "data" / name))


def bundled_model() -> SurfaceModel:
    return load_model(bundled_path("dolgachev23.json"))


# --- checks ----------------------------------------------------------------

@dataclass(frozen=True)
class Check:
    name: str
    expected: str
    computed: str
    passed: bool

    def as_dict(self) -> dict:
        return {"name": self.name, "expected": self.expected,
                "computed": self.computed, "passed": self.passed}


def _check(name: str, expected, computed) -> Check:
    e = expected if isinstance(expected, str) else format_rational(expected)
    c = computed if isinstance(computed, str) else format_rational(computed)
    return Check(name, e, c, e == c)


def fiber_consistency_suite(m: SurfaceModel) -> list[Check]:
    """Arithmetic identities every I3 fiber must satisfy under the model's pairing."""
    checks = []
    phi = m.fiber_class()
    checks.append(_check("Phi.Phi", 0, pair(m, phi, phi)))
    ref = m.basis_class(m.reference_curve) if m.reference_curve else None
    if ref is not None:
        checks.append(_check(f"Phi.{m.reference_curve}", m.fiber_class_k_multiple * k_degree(m, ref),
                             pair(m, phi, ref)))
    for f, comps in m.i3_components():
        if f.kodaira_type != "I3" or len(comps) != 3:
            continue
        for i, (ni, ci) in enumerate(comps):
            checks.append(_check(f"{f.label}: {ni}.{ni}", -2, pair(m, ci, ci)))
            checks.append(_check(f"{f.label}: Phi.{ni}", 0, pair(m, phi, ci)))
            checks.append(_check(f"{f.label}: K.{ni}", 0, k_degree(m, ci)))
            for nj, cj in comps[i + 1:]:
                checks.append(_check(f"{f.label}: {ni}.{nj}", 1, pair(m, ci, cj)))
        if ref is not None and f.section_degrees is not None:
            for (ni, ci), want in zip(comps, f.section_degrees):
                checks.append(_check(f"{f.label}: {ni}.{m.reference_curve}", want, pair(m, ci, ref)))
    return checks


def validate_model(m: SurfaceModel) -> list[Check]:
    """Symmetry, canonical-class and fiber checks; failures are entries, not exceptions."""
    checks = []
    g = m.gram
    if g.shape != (m.rank, m.rank):
        return [Check("gram shape", f"{m.rank}x{m.rank}", f"{g.rows}x{g.cols}", False)]
    asym = [(i, j) for i in range(g.rows) for j in range(i) if g[i, j] != g[j, i]]
    for i, j in asym:
        checks.append(Check(f"gram symmetric at ({m.basis_names[j]},{m.basis_names[i]})",
                            format_rational(g[j, i]), format_rational(g[i, j]), False))
    if not asym:
        checks.append(Check("gram symmetric", "true", "true", True))
    checks.append(_check("K.K", 0, g.bilinear(m.canonical.coords, m.canonical.coords)))
    try:
        d = det(m.pic_basis_change)
        checks.append(Check("pic basis change nonsingular", "true", str(d != 0).lower(), d != 0))
    except DimensionError as e:
        checks.append(Check("pic basis change nonsingular", "true", str(e), False))
    for f in m.fibers:
        for c in f.components:
            ok = c in m.basis_names
            checks.append(Check(f"{f.label}: component {c} in basis", "true", str(ok).lower(), ok))
    if asym or not all(c.passed for c in checks):
        return checks
    checks.extend(fiber_consistency_suite(m))
    return checks


def integral_span_coefficients(m: SurfaceModel, columns: Iterable[DivisorClass],
                               d: DivisorClass) -> tuple[Fraction, ...] | None:
    """Coefficients of d over the given independent classes, if d lies in their rational span."""
    from dolgachev.ratmat import express_in_columns

    mat = RatMatrix.from_columns([c.coords for c in columns])
    try:
        return express_in_columns(mat, _coords(m, d))
    except SingularMatrixError:
        raise DomainError("span generators are linearly dependent") from None
