"""Executable ledger of quoted numeric values.

A claims file is JSON ``{"claims": [...]}``.  Each claim has a ``kind`` and
operands written as class expressions over the model's names plus the
collection member names:

- ``pairing``: ``left``, ``right``; compares their intersection number
- ``chi``: ``left``, ``right`` for chi(left, right), or ``class`` for chi of one class
- ``span``: ``class`` lies in the integral span of K and the fiber components;
  optional ``equals`` asserts the class equals another expression
- ``verdict``: ``target`` and ``multiplicities`` of a split; compares the verdict string
- ``det`` / ``signature``: ``matrix`` is one of gram, pic_basis_change, pic_gram, k0

``op`` may be ``==`` (default), ``>=``, ``<=``, ``>`` or ``<``.  ``for`` maps
a variable to a list of integers; ``{j}`` in any operand is substituted and
the claim expands to one check per value.
"""

from __future__ import annotations

import itertools
import operator
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from dolgachev.exccol import in_vertical_span
from dolgachev.lattice import Lattice
from dolgachev.ratmat import format_rational, parse_rational, signature
from dolgachev.ratmat import det as mdet
from dolgachev.rroch import Collection, chi_of, euler_pairing, k0_generation_check
from dolgachev.surface import (
    DivisorClass,
    ModelParseError,
    SurfaceModel,
    parse_class_expr,
    pair,
    pic_lattice,
    read_json,
)
from dolgachev.vanish import classify, decomposition

KINDS = ("pairing", "chi", "span", "verdict", "det", "signature")

_OPS = {"==": operator.eq, ">=": operator.ge, "<=": operator.le, ">": operator.gt, "<": operator.lt}


class UnresolvedOperand(KeyError):
    """A claim names a class or matrix that the model and collection do not define."""


@dataclass(frozen=True)
class ClaimResult:
    id: str
    anchor: str
    kind: str
    description: str
    expected: str
    computed: str
    passed: bool

    def as_dict(self) -> dict:
        return {"id": self.id, "anchor": self.anchor, "kind": self.kind,
                "description": self.description, "expected": self.expected,
                "computed": self.computed, "passed": self.passed}


class ClaimContext:
    def __init__(self, m: SurfaceModel, col: Collection | None = None):
        self.m = m
        self.col = col
        ns = m.namespace()
        if col is not None:
            for name, c in col:
                ns[name] = c
        self.ns = ns

    def cls(self, text: str) -> DivisorClass:
        try:
            return parse_class_expr(text, self.ns, self.m.rank)
        except KeyError as e:
            raise UnresolvedOperand(f"unknown name {e.args[0]!r} in {text!r}") from None

    def matrix(self, name: str):
        if name == "gram":
            return self.m.gram
        if name == "pic_basis_change":
            return self.m.pic_basis_change
        if name == "pic_gram":
            return pic_lattice(self.m).gram
        if name == "k0":
            if self.col is None:
                raise UnresolvedOperand("k0 needs a collection")
            return k0_generation_check(self.m, self.col)[0]
        raise UnresolvedOperand(f"unknown matrix {name!r}")


def _subst(value, env: Mapping[str, int]):
    if isinstance(value, str):
        for k, v in env.items():
            value = value.replace("{" + k + "}", str(v))
        return value
    if isinstance(value, dict):
        return {_subst(k, env): _subst(v, env) for k, v in value.items()}
    if isinstance(value, list):
        return [_subst(v, env) for v in value]
    return value


def _compare(op: str, computed, expected) -> bool:
    return _OPS[op](computed, expected)


def _eval_one(ctx: ClaimContext, c: Mapping) -> tuple[str, str, str, bool]:
    kind = c["kind"]
    op = c.get("op", "==")
    if op not in _OPS:
        raise ModelParseError(f"unknown comparison {op!r}")
    m = ctx.m
    if kind == "pairing":
        v = pair(m, ctx.cls(c["left"]), ctx.cls(c["right"]))
        want = parse_rational(c["expected"])
        return (f"({c['left']}).({c['right']})", format_rational(want), format_rational(v),
                _compare(op, v, want))
    if kind == "chi":
        if "class" in c:
            v = chi_of(m, ctx.cls(c["class"]))
            desc = f"chi({c['class']})"
        else:
            v = euler_pairing(m, ctx.cls(c["left"]), ctx.cls(c["right"]))
            desc = f"chi({c['left']}, {c['right']})"
        want = parse_rational(c["expected"])
        return desc, format_rational(want), format_rational(v), _compare(op, v, want)
    if kind == "span":
        d = ctx.cls(c["class"])
        inside = in_vertical_span(m, d)
        got = str(inside).lower()
        ok = got == str(c.get("expected", "true")).lower()
        desc = f"{c['class']} in the vertical span"
        if "equals" in c:
            same = d == ctx.cls(c["equals"])
            got += f", equals {c['equals']}: {str(same).lower()}"
            ok = ok and same
            desc += f" and equals {c['equals']}"
        return desc, str(c.get("expected", "true")).lower(), got, ok
    if kind == "verdict":
        target = ctx.cls(c["target"])
        d = decomposition(m, target, {k: int(v) for k, v in c.get("multiplicities", {}).items()})
        got = str(classify(m, d))
        return f"split of {c['target']}", c["expected"], got, got == c["expected"]
    if kind == "det":
        v = mdet(ctx.matrix(c["matrix"]))
        want = parse_rational(c["expected"])
        return f"det {c['matrix']}", format_rational(want), format_rational(v), _compare(op, v, want)
    if kind == "signature":
        mat = ctx.matrix(c["matrix"])
        got = str(signature(Lattice(mat).gram))
        want = str(c["expected"]).replace(" ", "")
        return f"signature {c['matrix']}", want, got, got == want
    raise ModelParseError(f"unknown claim kind {kind!r}")


def expand(claim: Mapping) -> list[tuple[dict, dict]]:
    loops = claim.get("for") or {}
    names = sorted(loops)
    out = []
    for values in itertools.product(*(loops[n] for n in names)):
        env = dict(zip(names, values))
        body = {k: v for k, v in claim.items() if k != "for"}
        out.append((env, _subst(body, env)))
    return out


def run_claims(ctx: ClaimContext, claims: list) -> list[ClaimResult]:
    results = []
    for k, claim in enumerate(claims):
        if not isinstance(claim, dict) or "kind" not in claim:
            raise ModelParseError(f"claims[{k}]: missing kind")
        base_id = str(claim.get("id", k + 1))
        for env, c in expand(claim):
            suffix = "".join(f"[{n}={v}]" for n, v in env.items())
            desc, want, got, ok = _eval_one(ctx, c)
            op = c.get("op", "==")
            if op != "==":
                want = f"{op} {want}"
            results.append(ClaimResult(base_id + suffix, str(c.get("anchor", "")), c["kind"],
                                       desc, want, got, ok))
    return results


def load_claims(path) -> list:
    doc = read_json(path)
    claims = doc.get("claims", []) if isinstance(doc, dict) else doc
    if not isinstance(claims, list):
        raise ModelParseError("claims must be a list")
    return claims
