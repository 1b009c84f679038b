from fractions import Fraction

import pytest
from hypothesis import given, settings
from strategies import integer_vectors

from dolgachev.ratmat import DomainError, det
from dolgachev.rroch import (
    Collection,
    chern_coords,
    chi_of,
    collection_from_dict,
    collection_to_json,
    euler_pairing,
    k0_generation_check,
)
from dolgachev.surface import ModelParseError, from_pic, pair, parse_class_expr, pic_coordinates


def test_chi_examples(y, col):
    assert chi_of(y, y.zero()) == 1
    assert chi_of(y, -col[1]) == 0
    assert chi_of(y, y.canonical) == 1


def test_euler_pairing_examples(y, col):
    assert euler_pairing(y, col[11], col[10]) == 0
    assert euler_pairing(y, col[4], col[4]) == 1
    for i in range(1, 12):
        assert euler_pairing(y, col[i], col[0]) == 0


def test_chern_examples(y):
    assert chern_coords(y, y.zero()).as_row() == [1] + [0] * 10 + [1]
    k = chern_coords(y, y.canonical)
    assert k.c1 == tuple(pic_coordinates(y, y.canonical))
    assert k.chi == 1
    with pytest.raises(DomainError):
        chern_coords(y, Fraction(1, 3) * parse_class_expr("R2", y.namespace(), y.rank))


def test_k0_determinant(y, col):
    mat, d = k0_generation_check(y, col)
    assert mat.shape == (12, 12)
    assert abs(d) == 1


def test_k0_zero_collection(y):
    assert k0_generation_check(y, Collection.of([y.zero()] * 12))[1] == 0


def test_k0_doubled_member(y, col):
    classes = col.classes
    classes[5] = 2 * classes[5]
    d = k0_generation_check(y, Collection.of(classes))[1]
    assert d.denominator == 1
    assert abs(d) != 1


def test_k0_wrong_length(y, col):
    with pytest.raises(DomainError):
        k0_generation_check(y, Collection.of(col.classes[:11]))


@settings(max_examples=80, deadline=None)
@given(integer_vectors(10), integer_vectors(10))
def test_riemann_roch_properties(y, u, v):
    l1, l2 = from_pic(y, u), from_pic(y, v)
    assert euler_pairing(y, l1, l1) == 1
    assert chi_of(y, l1).denominator == 1
    d = l2 - l1
    assert euler_pairing(y, l1, l2) + euler_pairing(y, l2, l1) == 2 * y.chi_structure_sheaf + pair(y, d, d)
    if u != v:
        assert chern_coords(y, l1).c1 != chern_coords(y, l2).c1


def test_collection_round_trip(y, col):
    import json
    again = collection_from_dict(json.loads(collection_to_json(col, y)), y)
    assert again == col


def test_collection_basis_mismatch(y):
    with pytest.raises(ModelParseError):
        collection_from_dict({"basis": ["a"], "members": []}, y)


def test_collection_helpers(y, col):
    assert len(col) == 12
    assert col.names[0] == "A1"
    swapped = col.swap(1, 2)
    assert swapped[1] == col[2] and swapped[2] == col[1]
    shifted = col.translate(y.canonical)
    assert shifted[0] == col[0] + y.canonical
