import random

import pytest
from hypothesis import given, settings, strategies as st

from extlie.central_ext import (ExtElement, ExtendedRoot, build_cocycle, check_commutator,
                                class_pairing, cocycle_for_w, ext_commutator, ext_identity,
                                ext_inv, ext_mul, ext_pow, tilde_lift, tilde_mul, tilde_project,
                                w_act, w_action_is_automorphism)
from extlie.errors import PairingNotAlternating, SumNotRootOrZero
from extlie.lattice import Pairing, coinvariants, minus_identity

from conftest import coxeter, lattice

CASES = [("A1", None), ("A2", 1), ("D4", 1), ("E8", 6), ("E8", 10), ("E8", 15), ("E6", 4)]


def group_and_cocycle(label, power):
    L = lattice(label)
    w = minus_identity(L) if power is None else coxeter(label, power)
    G = coinvariants(L, w)
    return L, w, G, cocycle_for_w(G)


def elements(c):
    G = c.group
    return st.builds(lambda e, cls: ExtElement(e % c.d, tuple(x % m for x, m in zip(cls, G.invariant_factors))),
                     st.integers(0, 100), st.lists(st.integers(0, 100), min_size=G.ngens, max_size=G.ngens))


@pytest.mark.parametrize("label,power", CASES)
def test_commutator_equals_pairing(label, power):
    L, w, G, c = group_and_cocycle(label, power)
    ok, witness = check_commutator(c, class_pairing(G, Pairing(w)))
    assert ok and witness is None
    # oracle through lattice vectors: c(a,b) - c(b,a) vs pairing_w on roots
    P = Pairing(w)
    for a in L.roots[::7]:
        for b in L.roots[::5]:
            assert c.commutator(G.project(a), G.project(b)) == P(a, b)
            assert c.commutator_on_lattice(a, b) == P(a, b)


def test_e8_order5_commutator_is_exhaustive():
    _, w, G, c = group_and_cocycle("E8", 6)
    assert G.order == 25
    pairing = class_pairing(G, Pairing(w))
    elems = G.elements()
    bad = [(a, b) for a in elems for b in elems if c.commutator(a, b) != pairing(a, b)]
    assert not bad


def test_cocycle_table_is_upper_triangular():
    _, _, G, c = group_and_cocycle("E8", 10)
    k = G.ngens
    assert all(c.table[i][j] == 0 for i in range(k) for j in range(k) if i >= j)
    blob = c.to_json()
    assert blob["invariant_factors"] == [3, 3, 3, 3] and blob["modulus"] == 3


def test_trivial_pairing_gives_direct_product():
    _, w, G, c = group_and_cocycle("D4", 1)
    assert c.is_trivial
    a, b = ExtElement(1, G.generator(0)), ExtElement(0, G.generator(1))
    assert ext_mul(c, a, b) == ExtElement(1, G.add(a.cls, b.cls))


def test_a1_single_generator():
    _, _, G, c = group_and_cocycle("A1", None)
    x = G.generator(0)
    assert c(x, x) == 0
    a = ExtElement(0, x)
    assert ext_commutator(c, a, a) == ext_identity(c)


def test_non_alternating_pairing_rejected():
    _, w, G, _ = group_and_cocycle("E8", 6)
    with pytest.raises(PairingNotAlternating):
        build_cocycle(G, lambda a, b: 1, 5)


@pytest.mark.parametrize("label,power", [("E8", 6), ("E8", 10), ("A2", 1), ("E8", 15)])
def test_group_axioms(label, power):
    _, w, G, c = group_and_cocycle(label, power)
    rng = random.Random(1)
    pairing = class_pairing(G, Pairing(w))

    def rand():
        return ExtElement(rng.randrange(c.d), tuple(rng.randrange(m) for m in G.invariant_factors))

    one = ext_identity(c)
    for _ in range(1000):
        a, b, x = rand(), rand(), rand()
        assert ext_mul(c, ext_mul(c, a, b), x) == ext_mul(c, a, ext_mul(c, b, x))
        assert ext_mul(c, a, ext_inv(c, a)) == one
        assert ext_mul(c, ext_inv(c, a), a) == one
        z = ExtElement(x.zeta_exp, G.zero)
        assert ext_mul(c, z, a) == ext_mul(c, a, z)
        assert ext_commutator(c, a, b) == ExtElement(pairing(a.cls, b.cls), G.zero)
    assert ext_pow(c, ExtElement(1, G.zero), c.d) == one
    g = rand()
    assert ext_mul(c, ext_pow(c, g, 3), ext_pow(c, g, -3)) == one


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_cocycle_bilinear(data):
    _, _, G, c = group_and_cocycle("E8", 10)
    a, a2, b = (data.draw(elements(c)).cls for _ in range(3))
    assert c(G.add(a, a2), b) == (c(a, b) + c(a2, b)) % c.d
    assert c(b, G.add(a, a2)) == (c(b, a) + c(b, a2)) % c.d


@pytest.mark.parametrize("label,power", [("A2", 1), ("E8", 6)])
def test_extended_roots(label, power):
    L, w, G, c = group_and_cocycle(label, power)
    P = Pairing(w)
    for a in L.roots:
        at = tilde_lift(a)
        assert at == ExtendedRoot(0, a)
        for b in L.roots[::3]:
            bt = tilde_lift(b)
            s = tuple(x + y for x, y in zip(a, b))
            if not any(s):
                assert tilde_mul(c, at, bt) == tilde_mul(c, bt, at)
                continue
            if not L.is_root(s):
                with pytest.raises(SumNotRootOrZero):
                    tilde_mul(c, at, bt)
                continue
            ab, ba = tilde_mul(c, at, bt), tilde_mul(c, bt, at)
            assert ab.root == ba.root == s
            assert (ab.zeta_exp - ba.zeta_exp) % c.d == P(a, b)
            # matches the class-level product
            assert tilde_project(c, ab) == ext_mul(c, tilde_project(c, at), tilde_project(c, bt))
        assert w_act(w, ExtendedRoot(2 % c.d, a)) == ExtendedRoot(2 % c.d, w.apply(a))


@pytest.mark.parametrize("label,power", CASES)
def test_w_action_is_automorphism(label, power):
    _, w, _, c = group_and_cocycle(label, power)
    assert w_action_is_automorphism(c, w)
