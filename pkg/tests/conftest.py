"""Shared, cached data for the test suite.

Building an E8 algebra takes a moment, so everything heavy is memoised per
session through ``functools.lru_cache``.
"""
from functools import lru_cache

import pytest

from extlie.epsilon import make_datum
from extlie.lattice import build_lattice, coxeter_power, minus_identity
from extlie.lie_algebra import construct

E8_WORD = list(range(1, 9))
E8_POWERS = {2: 15, 3: 10, 5: 6}


@lru_cache(maxsize=None)
def lattice(label):
    return build_lattice(label)


@lru_cache(maxsize=None)
def coxeter(label, power=1):
    L = lattice(label)
    return coxeter_power(L, list(range(1, L.rank + 1)), power)


@lru_cache(maxsize=None)
def datum(label, power=1, epsilon="eps_w", minus=False):
    L = lattice(label)
    w = minus_identity(L) if minus else coxeter(label, power)
    return make_datum(L, w, epsilon=epsilon, name=f"{label}^{power}")


@lru_cache(maxsize=None)
def algebra(label, power=1, epsilon="eps_w", minus=False):
    return construct(datum(label, power, epsilon, minus), validate=False)


def e8(d):
    return algebra("E8", E8_POWERS[d])


def e8_datum(d):
    return datum("E8", E8_POWERS[d])


@pytest.fixture(scope="session")
def e8_alg():
    return e8
