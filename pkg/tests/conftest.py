from fractions import Fraction

import pytest

from dolgachev.rroch import bundled_collection
from dolgachev.surface import DivisorClass, bundled_model
from dolgachev.xmodel import load_xmodel


@pytest.fixture(scope="session")
def y():
    return bundled_model()


@pytest.fixture(scope="session")
def col(y):
    return bundled_collection(y)


@pytest.fixture(scope="session")
def x():
    return load_xmodel()


@pytest.fixture(scope="session")
def ns(y, col):
    out = y.namespace()
    for name, c in col:
        out[name] = c
    return out


def cls(y, **coords) -> DivisorClass:
    v = [Fraction(0)] * y.rank
    for k, val in coords.items():
        v[y.basis_names.index("K_Y" if k == "K" else k)] = Fraction(val)
    return DivisorClass(tuple(v))
