from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from strategies import rational_classes

from dolgachev.xmodel import (
    XClass,
    derive_table,
    div3_certificate,
    i9_sum,
    phi_trivial_lift,
    x_pair,
    y_pairing,
)

CONTRACTED = ["L1", "R3", "R1", "L2", "R6", "R7"]


def test_pairings(x):
    assert x_pair(x, x["L1"], x["R3"]) == 1
    assert x_pair(x, x["C"], x["C"]) == 0
    assert x_pair(x, x["F_X"], x["F_X"]) == 0


def test_contracted_chains(x):
    for a, b in x.contracted.pairs:
        assert x_pair(x, x[a], x[a]) == x_pair(x, x[b], x[b]) == -2
        assert x_pair(x, x[a], x[b]) == 1
    for i, (a, b) in enumerate(x.contracted.pairs):
        for c, d in x.contracted.pairs[i + 1:]:
            for p in (a, b):
                for q in (c, d):
                    assert x_pair(x, x[p], x[q]) == 0


@pytest.mark.parametrize("name, lift", [
    ("R8", "R8 + 2/3R7 + 1/3R6"),
    ("F_X", "F_X"),
    ("R5", "R5 + 2/3L2 + 1/3R1 + 2/3R6 + 1/3R7"),
])
def test_lifts(x, name, lift):
    assert phi_trivial_lift(x, x[name]) == x.expr(lift)


def test_lift_against_sympy_solver(x):
    # independent route: least-squares free linear solve in sympy
    qs = sympy.symbols("q0:6")
    z = x["R5"]
    cs = [x[n] for n in CONTRACTED]
    g = sympy.Matrix(x.gram.to_rows())

    def vec(c):
        return sympy.Matrix([sympy.Rational(str(t)) for t in c.coords])

    lifted = vec(z) + sum((q * vec(c) for q, c in zip(qs, cs)), sympy.zeros(10, 1))
    sol = sympy.solve([(lifted.T * g * vec(c))[0] for c in cs], qs, dict=True)[0]
    got = phi_trivial_lift(x, z)
    want = lifted.subs(sol)
    assert [Fraction(str(w)) for w in want] == list(got.coords)


@pytest.mark.parametrize("a, b, want", [
    ("R8", "R8", -1),
    ("R5", "R8", 1),
    ("1/6F_X", "R8", 1),
    ("R2", "R2", -2),
    ("R2", "R5", 1),
    ("1/6F_X", "R2", 0),
])
def test_y_pairings(x, a, b, want):
    assert y_pairing(x, x.expr(a), x.expr(b)) == want


def test_partial_lift_of_r5_is_not_orthogonal(x):
    partial = x.expr(x.partial_lifts["R5"])
    assert x_pair(x, partial, x["R6"]) == 1
    assert 3 * x_pair(x, partial, x.expr(x.partial_lifts["R8"])) == 1


@settings(max_examples=40, deadline=None)
@given(rational_classes(10), rational_classes(10))
def test_lift_properties(x, a, b):
    z1, z2 = XClass(a), XClass(b)
    l1 = phi_trivial_lift(x, z1)
    assert phi_trivial_lift(x, l1) == l1
    for n in CONTRACTED:
        assert x_pair(x, l1, x[n]) == 0
        assert y_pairing(x, z1, x[n]) == 0
    assert y_pairing(x, z1, z2) == y_pairing(x, z2, z1)
    assert y_pairing(x, z1, z2) == 3 * x_pair(x, l1, z2)
    assert y_pairing(x, z1 + z2, z2) == y_pairing(x, z1, z2) + y_pairing(x, z2, z2)


def test_canonical_is_minus_cubic(x):
    assert x["K_X"] == -x["C"]
    assert x_pair(x, x["K_X"], x["F_X"]) == 0


def test_div3(x):
    cert = div3_certificate(x)
    assert cert.ok
    assert cert.witness == x.expr("3H - E1 - 2E2 - E3 - E4 - E5 - E7 - E8 - E9")
    assert 3 * cert.witness == cert.divisor


def test_i9_sum(x):
    assert i9_sum(x) == x["F_X"]


def test_derive_table(x, y):
    t = derive_table(x, y)
    assert len(t.entries) == 10
    assert t.passed
    assert any("R6: 1" in n for n in t.notes)
