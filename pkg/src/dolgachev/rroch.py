"""Riemann-Roch on the surface model and K0 coordinates of line bundles."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from dolgachev.ratmat import DomainError, RatMatrix, det, format_rational
from dolgachev.surface import (
    DivisorClass,
    ModelParseError,
    SurfaceModel,
    bundled_path,
    class_from_json,
    class_to_json,
    is_integral,
    k_degree,
    pair,
    pic_coordinates,
    read_json,
)


@dataclass(frozen=True)
class Collection:
    """An ordered list of named line-bundle classes."""

    members: tuple[tuple[str, DivisorClass], ...]
    name: str = "collection"

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[tuple[str, DivisorClass]]:
        return iter(self.members)

    def __getitem__(self, i: int) -> DivisorClass:
        """0-based access to the class of the i-th member."""
        return self.members[i][1]

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.members]

    @property
    def classes(self) -> list[DivisorClass]:
        return [c for _, c in self.members]

    @classmethod
    def of(cls, classes: Sequence[DivisorClass], prefix: str = "A", name: str = "collection") -> Collection:
        return cls(tuple((f"{prefix}{i}", c) for i, c in enumerate(classes, 1)), name)

    def translate(self, d: DivisorClass) -> Collection:
        return Collection(tuple((n, c + d) for n, c in self.members), self.name)

    def swap(self, i: int, j: int) -> Collection:
        m = list(self.members)
        m[i], m[j] = m[j], m[i]
        return Collection(tuple(m), self.name)


def collection_from_dict(doc, m: SurfaceModel) -> Collection:
    basis = tuple(doc.get("basis", m.basis_names))
    if basis != m.basis_names:
        raise ModelParseError(f"collection basis {list(basis)} does not match model basis")
    members = []
    for k, entry in enumerate(doc.get("members", [])):
        try:
            members.append((str(entry["name"]), class_from_json(entry["class"], basis)))
        except (KeyError, TypeError) as e:
            raise ModelParseError(f"members[{k}]: {e}") from None
        except DomainError as e:
            raise ModelParseError(f"members[{k}]: {e}") from None
    return Collection(tuple(members), str(doc.get("name", "collection")))


def load_collection(path, m: SurfaceModel) -> Collection:
    return collection_from_dict(read_json(path), m)


def bundled_collection(m: SurfaceModel) -> Collection:
    return load_collection(bundled_path("twelve_bundles.json"), m)


def collection_to_json(col: Collection, m: SurfaceModel) -> str:
    doc = {"name": col.name, "basis": list(m.basis_names),
           "members": [{"name": n, "class": class_to_json(c, m.basis_names)} for n, c in col]}
    return json.dumps(doc, indent=1)


def chi_of(m: SurfaceModel, d: DivisorClass) -> Fraction:
    """Euler characteristic of the line bundle with class d."""
    return m.chi_structure_sheaf + (pair(m, d, d) - k_degree(m, d)) / 2


def euler_pairing(m: SurfaceModel, l1: DivisorClass, l2: DivisorClass) -> Fraction:
    """chi(L1, L2) = chi(L1^* (x) L2)."""
    return chi_of(m, l2 - l1)


@dataclass(frozen=True)
class ChernCoords:
    rank: int
    c1: tuple[int, ...]
    chi: int

    def as_row(self) -> list[int]:
        return [self.rank, *self.c1, self.chi]


def chern_coords(m: SurfaceModel, l: DivisorClass) -> ChernCoords:
    if not is_integral(m, l):
        raise DomainError(f"class {l.format(m.basis_names)} is not in the integral Picard lattice")
    c1 = tuple(int(x) for x in pic_coordinates(m, l))
    chi = chi_of(m, l)
    assert chi.denominator == 1
    return ChernCoords(1, c1, int(chi))


def k0_generation_check(m: SurfaceModel, col: Collection) -> tuple[RatMatrix, Fraction]:
    want = m.rank + 2
    if len(col) != want:
        raise DomainError(f"collection has {len(col)} members, expected {want}")
    rows = [chern_coords(m, c).as_row() for c in col.classes]
    mat = RatMatrix.from_rows(rows)
    return mat, det(mat)


def format_chern(c: ChernCoords) -> str:
    return "(" + ", ".join(format_rational(x) for x in c.as_row()) + ")"
