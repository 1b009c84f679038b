"""The rational elliptic surface X and the pairing rule pushed down to Y.

X is the plane blown up at nine points (some infinitely near) with the
standard form diag(1, -1, ..., -1) on (H, E1..E9).  Six curves forming three
A2 chains are contracted; a class on Y is represented by a class on X that is
orthogonal to all six, and pairings on Y are the covering degree times the
pairing of such lifts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from dolgachev.ratmat import RatMatrix, format_rational, solve
from dolgachev.surface import (
    DivisorClass,
    ModelParseError,
    SurfaceModel,
    bundled_path,
    parse_class_expr,
    read_json,
)

XClass = DivisorClass


@dataclass(frozen=True)
class ContractedConfig:
    pairs: tuple[tuple[str, str], ...]
    classes: tuple[tuple[str, XClass], ...]

    def curves(self) -> list[tuple[str, XClass]]:
        lookup = dict(self.classes)
        return [(n, lookup[n]) for p in self.pairs for n in p]


@dataclass(frozen=True)
class XModel:
    name: str
    basis_names: tuple[str, ...]
    gram: RatMatrix
    classes: Mapping[str, XClass] = field(hash=False)
    contracted: ContractedConfig = field(hash=False)
    covering_degree: int = 3
    identification: Mapping[str, str] = field(default_factory=dict, hash=False)
    branch_divisor: str = ""
    i9_components: tuple[str, ...] = ()
    partial_lifts: Mapping[str, str] = field(default_factory=dict, hash=False)

    @property
    def rank(self) -> int:
        return len(self.basis_names)

    def namespace(self) -> dict[str, XClass]:
        ns = {n: DivisorClass.basis_vector(self.rank, i) for i, n in enumerate(self.basis_names)}
        ns.update(self.classes)
        return ns

    def expr(self, text: str) -> XClass:
        return parse_class_expr(text, self.namespace(), self.rank)

    def __getitem__(self, name: str) -> XClass:
        return self.namespace()[name]


def load_xmodel(path=None) -> XModel:
    doc = read_json(path if path is not None else bundled_path("halphen_x.json"))
    try:
        basis = tuple(doc["basis"])
        n = len(basis)
        gram = RatMatrix.from_rows(doc["gram"])
        if gram.shape != (n, n):
            raise ModelParseError(f"gram must be {n}x{n}")
        base = {b: DivisorClass.basis_vector(n, i) for i, b in enumerate(basis)}
        classes = {}
        for k, text in doc.get("classes", {}).items():
            try:
                classes[k] = parse_class_expr(text, {**base, **classes}, n)
            except KeyError as e:
                raise ModelParseError(f"classes[{k!r}]: unknown name {e.args[0]!r}") from None
        pairs = tuple(tuple(p) for p in doc["contracted_pairs"])
        for p in pairs:
            for c in p:
                if c not in classes:
                    raise ModelParseError(f"contracted curve {c!r} is not a named class")
        cfg = ContractedConfig(pairs, tuple((c, classes[c]) for p in pairs for c in p))
        return XModel(
            name=str(doc.get("name", "x")),
            basis_names=basis,
            gram=gram,
            classes=classes,
            contracted=cfg,
            covering_degree=int(doc.get("covering_degree", 3)),
            identification=dict(doc.get("identification", {})),
            branch_divisor=str(doc.get("branch_divisor", "")),
            i9_components=tuple(doc.get("i9_components", ())),
            partial_lifts=dict(doc.get("partial_lifts", {})),
        )
    except KeyError as e:
        raise ModelParseError(f"missing field {e.args[0]!r}") from None


def x_pair(x: XModel, z1: XClass, z2: XClass) -> Fraction:
    return x.gram.bilinear(z1.coords, z2.coords)


def phi_trivial_lift(x: XModel, z: XClass, cfg: ContractedConfig | None = None) -> XClass:
    """z plus the unique combination of contracted curves making it orthogonal to all of them."""
    curves = [c for _, c in (cfg or x.contracted).curves()]
    g = RatMatrix.from_rows([[x_pair(x, a, b) for b in curves] for a in curves])
    q = solve(g, [-x_pair(x, z, c) for c in curves])
    out = z
    for qi, c in zip(q, curves):
        out = out + qi * c
    return out


def y_pairing(x: XModel, z1: XClass, z2: XClass, cfg: ContractedConfig | None = None) -> Fraction:
    return x.covering_degree * x_pair(x, phi_trivial_lift(x, z1, cfg), phi_trivial_lift(x, z2, cfg))


@dataclass(frozen=True)
class TableEntry:
    row: str
    col: str
    derived: Fraction
    expected: Fraction | None

    @property
    def matches(self) -> bool:
        return self.expected is not None and self.derived == self.expected


@dataclass
class TableDerivation:
    entries: list[TableEntry]
    notes: list[str]

    @property
    def matched(self) -> int:
        return sum(e.matches for e in self.entries)

    @property
    def passed(self) -> bool:
        return self.matched == len(self.entries)

    def as_dict(self) -> dict:
        return {
            "entries": [{"row": e.row, "col": e.col, "derived": format_rational(e.derived),
                         "expected": None if e.expected is None else format_rational(e.expected),
                         "match": e.matches} for e in self.entries],
            "matched": self.matched,
            "total": len(self.entries),
            "notes": list(self.notes),
        }


def derive_table(x: XModel, y: SurfaceModel | None = None) -> TableDerivation:
    """Pairings among the identified classes, compared against the Y model's Gram."""
    names = list(x.identification)
    lifted = {n: x.expr(x.identification[n]) for n in names}
    entries = []
    for i, a in enumerate(names):
        for b in names[i:]:
            got = y_pairing(x, lifted[a], lifted[b])
            want = None
            if y is not None and a in y.basis_names and b in y.basis_names:
                want = y.gram[y.basis_names.index(a), y.basis_names.index(b)]
            entries.append(TableEntry(a, b, got, want))
    return TableDerivation(entries, partial_lift_notes(x))


def partial_lift_notes(x: XModel) -> list[str]:
    """Compare the model's recorded partial lifts against full lifts."""
    notes = []
    for name, text in x.partial_lifts.items():
        partial = x.expr(text)
        full = phi_trivial_lift(x, x[name])
        bad = [(c, x_pair(x, partial, cls)) for c, cls in x.contracted.curves()
               if x_pair(x, partial, cls) != 0]
        if not bad:
            notes.append(f"partial lift of {name} is orthogonal to every contracted curve")
            continue
        where = ", ".join(f"{c}: {format_rational(v)}" for c, v in bad)
        notes.append(f"partial lift of {name} ({text}) is not orthogonal to all contracted curves "
                     f"({where}); the full lift {full.format(x.basis_names)} is used")
        for other, otext in x.partial_lifts.items():
            if other == name:
                continue
            o = x.expr(otext)
            if all(x_pair(x, o, c) == 0 for _, c in x.contracted.curves()):
                pv = x.covering_degree * x_pair(x, partial, o)
                fv = y_pairing(x, x[name], x[other])
                notes.append(f"pairing {name}.{other} from the partial lift: {format_rational(pv)}, "
                             f"from full lifts: {format_rational(fv)}")
    return notes


@dataclass(frozen=True)
class Div3Certificate:
    divisor: XClass
    witness: XClass | None

    @property
    def ok(self) -> bool:
        return self.witness is not None


def div3_certificate(x: XModel) -> Div3Certificate:
    d = x.expr(x.branch_divisor)
    w = Fraction(1, 3) * d
    return Div3Certificate(d, w if w.is_integral_vector() else None)


def i9_sum(x: XModel) -> XClass:
    total = DivisorClass.zero(x.rank)
    for n in x.i9_components:
        total = total + x[n]
    return total
