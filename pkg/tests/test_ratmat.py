from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from strategies import unimodular

from dolgachev.ratmat import (
    DimensionError,
    DomainError,
    RatMatrix,
    Signature,
    SingularMatrixError,
    cofactor_det,
    det,
    format_rational,
    parse_rational,
    signature,
    smith_normal_form,
    solve,
)

TABLE = [[0, 0, 0, 1, 0, 0, 0, 0, 0, 0], [0, -2, 1, 0, 0, 0, 0, 0, 0, 0],
         [0, 1, -2, 1, 0, 0, 0, 0, 0, 0], [1, 0, 1, -1, 2, 2, 2, 2, 2, 2],
         [0, 0, 0, 2, -2, 1, 0, 0, 0, 0], [0, 0, 0, 2, 1, -2, 0, 0, 0, 0],
         [0, 0, 0, 2, 0, 0, -2, 1, 0, 0], [0, 0, 0, 2, 0, 0, 1, -2, 0, 0],
         [0, 0, 0, 2, 0, 0, 0, 0, -2, 1], [0, 0, 0, 2, 0, 0, 0, 0, 1, -2]]


def basis_change():
    rows = [[Fraction(int(i == j)) for j in range(10)] for i in range(10)]
    for i, (a, b) in enumerate(zip([-1, -1, 1, 0, -1, 1, -1, 1, 0, 0], [-1, -1, 1, 0, 0, 0, 1, -1, 1, -1])):
        rows[i][7] = Fraction(a, 3)
        rows[i][8] = Fraction(b, 3)
    return RatMatrix.from_rows(rows)


def to_sympy(m: RatMatrix):
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in m.to_rows()])


small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def matrices(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n).map(RatMatrix.from_rows)


def int_matrices(n, lo=-4, hi=4):
    return st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=n, max_size=n).map(
        RatMatrix.from_rows)


def test_rationals_parse_and_print():
    assert parse_rational("6/4") == Fraction(3, 2)
    assert parse_rational(" -2 ") == -2
    assert format_rational(Fraction(-8, 3)) == "-8/3"
    assert format_rational(Fraction(4, 2)) == "2"
    with pytest.raises(DomainError):
        parse_rational("1/0")
    with pytest.raises(DomainError):
        parse_rational("x")


def test_table_determinant():
    assert det(RatMatrix.from_rows(TABLE)) == -81


def test_determinant_oracle():
    a = RatMatrix.from_rows(TABLE)
    assert det(a) == to_sympy(a).det()
    m = basis_change()
    assert det(m) == Fraction(1, 9) == to_sympy(m).det()


def test_identity_determinant():
    assert det(RatMatrix.identity(10)) == 1


def test_det_non_square():
    with pytest.raises(DimensionError):
        det(RatMatrix.from_rows([[1, 2, 3], [4, 5, 6]]))


@given(matrices(3))
def test_cofactor_matches_bareiss(m):
    assert det(m) == cofactor_det(m)


@given(matrices(3), matrices(3))
def test_det_multiplicative(a, b):
    assert det(a @ b) == det(a) * det(b)


def test_snf_small():
    f, u, v = smith_normal_form(RatMatrix.diag([2, 3]))
    assert f == [1, 6]
    assert smith_normal_form(RatMatrix.identity(10))[0] == [1] * 10


def test_snf_table_against_oracle():
    a = RatMatrix.from_rows(TABLE)
    f, u, v = smith_normal_form(a)
    oracle = [abs(int(x)) for x in sympy_snf(sympy.Matrix(TABLE), domain=sympy.ZZ).diagonal()]
    assert sorted(f) == sorted(oracle)
    prod = 1
    for x in f:
        prod *= x
    assert prod == 81


def test_snf_rejects_fractions():
    with pytest.raises(DomainError):
        smith_normal_form(RatMatrix.from_rows([["1/2"]]))


@settings(max_examples=60)
@given(st.lists(st.lists(st.integers(-6, 6), min_size=4, max_size=4), min_size=3, max_size=3))
def test_snf_reassembles(rows):
    m = RatMatrix.from_rows(rows)
    f, u, v = smith_normal_form(m)
    assert abs(det(u)) == 1 and abs(det(v)) == 1
    d = u @ m @ v
    for i in range(d.rows):
        for j in range(d.cols):
            assert d[i, j] == (f[i] if i == j else 0)
    for a, b in zip(f, f[1:]):
        assert b == 0 or (a != 0 and b % a == 0)


def test_solve_examples():
    b = [Fraction(1), Fraction(2, 3)]
    assert solve(RatMatrix.identity(2), b) == tuple(b)
    with pytest.raises(SingularMatrixError):
        solve(RatMatrix.zeros(2, 2), [1, 1])


def test_solve_member_of_collection_is_integral():
    # first nontrivial member of the bundled collection, in table coordinates
    t = Fraction(1, 3)
    a2 = [-8 * t, -2 * t, -t, -1, -2 * t, 2 * t, -2 * t, 2 * t, 0, 0]
    m = basis_change()
    x = solve(m, a2)
    assert all(v.denominator == 1 for v in x)
    assert m @ x == tuple(a2)


@given(matrices(4), st.lists(small, min_size=4, max_size=4))
def test_solve_round_trip(a, b):
    if det(a) == 0:
        with pytest.raises(SingularMatrixError):
            solve(a, b)
        return
    assert a @ solve(a, b) == tuple(b)


def test_signature_examples():
    assert signature(RatMatrix.from_rows(TABLE)) == Signature(1, 9, 0)
    assert signature(RatMatrix.diag([1, -1])).as_tuple() == (1, 1, 0)
    assert signature(RatMatrix.zeros(2, 2)).as_tuple() == (0, 0, 2)
    assert str(signature(RatMatrix.from_rows([[0, 1], [1, 0]]))) == "(1,1,0)"


def test_signature_needs_symmetry():
    with pytest.raises(DomainError):
        signature(RatMatrix.from_rows([[0, 1], [2, 0]]))


@settings(max_examples=60)
@given(int_matrices(4, -2, 2), unimodular(4))
def test_signature_congruence_invariant(s, u):
    sym = s + s.T
    assert abs(det(u)) == 1
    assert signature(u.T @ sym @ u) == signature(sym)


def test_unimodularity_bookkeeping():
    assert det(RatMatrix.from_rows(TABLE)) * det(basis_change()) ** 2 == -1
