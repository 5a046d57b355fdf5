import random

import pytest
from hypothesis import given, settings, strategies as st

from extlie.cyclotomic import CycNum
from extlie.epsilon import KINDS, EpsilonChoice, make_datum, validate_input_datum
from extlie.lattice import Pairing, minus_identity

from conftest import coxeter, datum, lattice


def eps_w_direct(L, w, a, b):
    """Independent evaluation of prod_j (1 - zeta^-j)^{(w^j a, b)}."""
    d = w.order
    out = CycNum.one(d)
    for j in range(1, d):
        e = L.ip(w.power(j).apply(a), b)
        base = 1 - CycNum.zeta(d, -j)
        out = out * base ** e
    return out


INVENTORY = [("A1", None), ("A2", 1), ("A3", 1), ("D4", 1), ("E8", 15), ("E8", 10), ("E8", 6)]


def make(label, power, kind="eps_w"):
    L = lattice(label)
    w = minus_identity(L) if power is None else coxeter(label, power)
    return make_datum(L, w, epsilon=kind)


@pytest.mark.parametrize("label,power", INVENTORY)
def test_eps_w_datum_is_valid(label, power):
    D = make(label, power)
    rep = validate_input_datum(D.lattice, D.w, D.cocycle, D.epsilon)
    assert rep.property1 and rep.property2 and rep.ok
    assert rep.counterexamples == []
    assert rep.pairs_checked == len(D.lattice.roots) ** 2
    assert set(rep.to_json()) >= {"property1", "property2", "counterexamples"}


@pytest.mark.parametrize("label,power", INVENTORY)
def test_corrupted_epsilon_fails_with_witness(label, power):
    D = make(label, power)
    bad = D.epsilon.corrupted()
    rep = validate_input_datum(D.lattice, D.w, D.cocycle, bad)
    assert not rep.ok
    assert rep.counterexamples
    first = rep.counterexamples[0]
    a, b = tuple(first["alpha"]), tuple(first["beta"])
    assert D.lattice.ip(a, b) == -1 or first["property"] == 2


def test_eps_w_values():
    # d = 2: (a, b) = -1 gives 2^{(-a, b)} = 2
    L = lattice("A2")
    D = make("A2", None)
    a, b = (1, 0), (0, 1)
    assert L.ip(a, b) == -1
    assert D.epsilon(a, b) == 2
    T = make("E8", 6, "trivial")
    assert all(T.epsilon(a, b) == 1 for a in T.lattice.roots[:30] for b in T.lattice.roots[-30:])


@pytest.mark.parametrize("label,power", [("A2", 1), ("D4", 1), ("E8", 10), ("E8", 6)])
def test_eps_w_matches_product_formula(label, power):
    D = make(label, power)
    rng = random.Random(7)
    roots = D.lattice.roots
    ids, values = D.epsilon.root_table
    for _ in range(200):
        i, j = rng.randrange(len(roots)), rng.randrange(len(roots))
        ref = eps_w_direct(D.lattice, D.w, roots[i], roots[j])
        assert D.epsilon(roots[i], roots[j]) == ref
        assert values[ids[i, j]] == ref


@pytest.mark.parametrize("label,power,samples", [("A2", 1, None), ("A3", 1, None), ("D4", 1, None),
                                                 ("E8", 15, 10_000), ("E8", 10, 10_000), ("E8", 6, 10_000)])
def test_ratio_identity(label, power, samples):
    """eps_w(a,b)/eps_w(b,a) = (-1)^{(a,b)} <b,a>_w."""
    D = make(label, power)
    L, d = D.lattice, D.d
    P = Pairing(D.w)
    ids, values = D.epsilon.root_table
    R = len(L.roots)
    if samples is None:
        pairs = [(i, j) for i in range(R) for j in range(R)]
    else:
        rng = random.Random(42)
        pairs = [(rng.randrange(R), rng.randrange(R)) for _ in range(samples)]
    cache = {}
    for i, j in pairs:
        a, b = L.roots[i], L.roots[j]
        key = (ids[i, j], ids[j, i], L.ip(a, b) % 2, P(b, a))
        if key not in cache:
            lhs = values[key[0]] / values[key[1]]
            cache[key] = lhs == (-1) ** key[2] * CycNum.zeta(d, key[3])
        assert cache[key], (a, b)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(KINDS), st.lists(st.integers(-3, 3), min_size=8, max_size=8),
       st.lists(st.integers(-3, 3), min_size=8, max_size=8),
       st.lists(st.integers(-3, 3), min_size=8, max_size=8))
def test_bilinear(kind, a, a2, b):
    power = 6 if kind == "odd_variant" else 10
    D = make("E8", power, kind)
    e = D.epsilon
    s = [x + y for x, y in zip(a, a2)]
    assert e(s, b) == e(a, b) * e(a2, b)
    assert e(b, s) == e(b, a) * e(b, a2)


@pytest.mark.parametrize("kind", ["d3_variant", "odd_variant"])
def test_d3_variants_are_valid_on_e8(kind):
    D = make("E8", 10, kind)
    assert validate_input_datum(D.lattice, D.w, D.cocycle, D.epsilon).ok


def test_odd_variant_order5_and_d3_formulas_agree():
    D3 = make("E8", 10, "d3_variant")
    Do = make("E8", 10, "odd_variant")
    roots = D3.lattice.roots
    assert all(D3.epsilon(a, b) == Do.epsilon(a, b) for a in roots[::11] for b in roots[::13])
    D5 = make("E8", 6, "odd_variant")
    assert validate_input_datum(D5.lattice, D5.w, D5.cocycle, D5.epsilon).ok
    with pytest.raises(ValueError):
        make("E8", 15, "odd_variant")


@pytest.mark.parametrize("label", ["A2", "D4", "E8"])
def test_minus_one_with_trivial_epsilon_is_valid(label):
    D = make(label, None, "trivial")
    assert validate_input_datum(D.lattice, D.w, D.cocycle, D.epsilon).ok


def test_unknown_kind():
    with pytest.raises(ValueError):
        EpsilonChoice("nope", lattice("A2"), coxeter("A2"), datum("A2").cocycle)
