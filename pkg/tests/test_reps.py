import cmath
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from extlie.central_ext import ExtElement, ext_mul
from extlie.cyclotomic import CycNum
from extlie.errors import CharacterDoesNotExtend, EpsilonNotEpsW
from extlie.lattice import minus_identity, pairing_w
from extlie.lie_algebra import g_structure
from extlie.reps import (HeisenbergRep, Subgroup, _span, abelian_basis, central_character_ok,
                         character_norm, check_homomorphism, commutant_dimension, extend_to_g,
                         image_is_traceless, induce, is_isotropic, is_maximal_isotropic,
                         maximal_isotropic, polynomial_sum_identity, orbit_sum_check,
                         rep_traces_differ, verify_rep_homomorphism)

from conftest import algebra, coxeter, datum, e8, e8_datum, lattice


def heis(D, central_exp=1):
    c = D.cocycle
    return induce(c, maximal_isotropic(D.group, c.commutator), central_exp)


@pytest.fixture(scope="module")
def rep5():
    return heis(e8_datum(5))


@pytest.fixture(scope="module")
def g5(rep5):
    return extend_to_g(e8(5), rep5)


# -- isotropic subgroups -------------------------------------------------------

def test_z5_squared_all_lines_are_maximal_isotropic():
    D = e8_datum(5)
    G, pair = D.group, D.cocycle.commutator
    assert G.invariant_factors == (5, 5)
    elems = [a for a in G.elements() if any(a)]
    lines = {tuple(_span(G, [a])) for a in elems}
    assert len(lines) == 6
    for ln in lines:
        sub = Subgroup(G, list(ln), [ln[1]])
        assert is_maximal_isotropic(sub, pair)
    # the full group is not isotropic: the pairing is nondegenerate
    whole = Subgroup(G, G.elements(), [G.generator(0), G.generator(1)])
    assert not is_isotropic(whole, pair)
    chosen = maximal_isotropic(G, pair)
    assert tuple(chosen.elements) in lines and chosen.index == 5


def test_trivial_pairing_gives_whole_group():
    D = datum("A2")
    sub = maximal_isotropic(D.group, D.cocycle.commutator)
    assert sub.index == 1 and sub.order == D.group.order == 3


def test_e8_minus_one_lagrangian():
    D = datum("E8", 1, "eps_w", True)
    G = D.group
    assert G.invariant_factors == (2,) * 8
    sub = maximal_isotropic(G, D.cocycle.commutator)
    assert sub.order == 16 and sub.index == 16
    assert is_maximal_isotropic(sub, D.cocycle.commutator)


def test_abelian_basis_orders():
    D = e8_datum(3)
    sub = maximal_isotropic(D.group, D.cocycle.commutator)
    basis = abelian_basis(D.group, sub)
    total = 1
    for g, m in basis:
        total *= m
        assert D.group.scale(m, g) == D.group.zero
    assert total == sub.order == 9


# -- Heisenberg representations -------------------------------------------------

def test_dim5_rep(rep5):
    assert rep5.dim == 5 == rep5.subgroup.index
    assert central_character_ok(rep5)
    assert check_homomorphism(rep5, 10_000, seed=1) is None
    norm, size = character_norm(rep5)
    assert size == 125 and norm == size
    mats = [rep5.matrix(h) for h in rep5.generator_elements().values()]
    assert commutant_dimension(mats, rep5.dim, rep5.field_order) == 1


def test_zeta_acts_by_scalar(rep5):
    G = rep5.cocycle.group
    m = rep5.matrix(ExtElement(1, G.zero))
    z = CycNum.zeta(rep5.field_order, rep5.field_order // 5)
    assert m == {(i, i): z for i in range(5)}


def test_rep_matches_group_law_against_direct_product():
    # oracle: multiply sparse matrices directly rather than monomials
    rep = heis(e8_datum(3))
    c = rep.cocycle
    G = c.group
    elems = [ExtElement(e, a) for e in range(3) for a in G.elements()[:9]]

    def mul(a, b):
        out = {}
        for (i, k), x in a.items():
            for (k2, j), y in b.items():
                if k == k2:
                    out[(i, j)] = out.get((i, j), CycNum.zero(rep.field_order)) + x * y
        return {k: v for k, v in out.items() if v}

    for a in elems[:12]:
        for b in elems[::5]:
            assert mul(rep.matrix(a), rep.matrix(b)) == rep.matrix(ext_mul(c, a, b))


def test_homomorphism_check_catches_tampering(rep5):
    target = ExtElement(0, rep5.cocycle.group.generator(0))

    class Tampered(HeisenbergRep):
        def monomial(self, h):
            m = super().monomial(h)
            if h == target:
                ph = list(m.phases)
                ph[0] = (ph[0] + Fraction(1, 5)) % 1
                m = type(m)(m.rows, tuple(ph))
            return m

    bad = Tampered(rep5.cocycle, rep5.subgroup, rep5.basis_chars, rep5.transversal,
                   rep5.central_exp, rep5.field_order)
    assert check_homomorphism(bad, 10_000, seed=1) is not None


def test_central_characters_distinguish_reps(rep5):
    other = heis(e8_datum(5), central_exp=2)
    assert central_character_ok(other)
    assert rep_traces_differ(rep5, other)
    assert not rep_traces_differ(rep5, heis(e8_datum(5)))


def test_noncoprime_central_character_rejected():
    D = e8_datum(5)
    with pytest.raises(CharacterDoesNotExtend):
        induce(D.cocycle, maximal_isotropic(D.group, D.cocycle.commutator), 5)


def test_non_isotropic_subgroup_rejected():
    D = e8_datum(5)
    G = D.group
    whole = Subgroup(G, G.elements(), [G.generator(0), G.generator(1)])
    with pytest.raises(CharacterDoesNotExtend):
        induce(D.cocycle, whole)


def test_trivial_pairing_gives_characters():
    rep = heis(datum("A2"))
    assert rep.dim == 1
    assert check_homomorphism(rep, 500) is None
    norm, size = character_norm(rep)
    assert norm == size == 9


def test_minus_one_e8_rep_dimension():
    rep = heis(datum("E8", 1, "eps_w", True))
    assert rep.dim == 16
    assert central_character_ok(rep)
    assert check_homomorphism(rep, 300, seed=3) is None


def test_rep_json(rep5):
    blob = rep5.to_json()
    assert blob["dim"] == 5 and blob["field_order"] == rep5.field_order
    assert set(blob["generators"]) == {"zeta", "x1", "x2"}
    assert len(blob["generators"]["x1"]) == 5


# -- extension to the fixed subalgebra -----------------------------------------

def test_e8_d5_extension(g5):
    assert len(g5.reps) == 48
    r = verify_rep_homomorphism(g5)
    assert r.ok and r.table_cross_check
    assert r.pairs == 48 * 47 // 2
    assert (r.image_dim, r.kernel_dim, r.commutant_dim) == (24, 24, 1)
    assert image_is_traceless(g5)


def test_e8_d3_extension():
    rep = heis(e8_datum(3))
    assert rep.dim == 9
    g = extend_to_g(e8(3), rep)
    r = verify_rep_homomorphism(g, cross_check=False)
    assert r.ok and r.image_dim == 80 and r.commutant_dim == 1


def test_tampered_extension_fails(g5):
    from dataclasses import replace
    a = g5.reps[3]
    mats = dict(g5.z_mats)
    mats[a] = {k: v + v for k, v in mats[a].items()}
    r = verify_rep_homomorphism(replace(g5, z_mats=mats), cross_check=False, image=False)
    assert not r.ok and a in r.witness


def test_zeta_multiple_of_z_generator(rep5, g5):
    alg = g5.alg
    G = alg.datum.group
    z = CycNum.zeta(g5.field_order, g5.field_order // 5)
    for a in g5.reps[:6]:
        cls = G.project(alg.roots[a])
        m = rep5.monomial(ExtElement(1, cls)).to_sparse(g5.field_order)
        assert m == {k: z * v for k, v in g5.z_mats[a].items()}


def test_a2_coxeter_extension_is_abelian_but_nonzero():
    alg = algebra("A2")
    reps, table = g_structure(alg)
    assert table.dim == 2 and not table.brackets
    g = extend_to_g(alg, heis(alg.datum))
    r = verify_rep_homomorphism(g)
    assert r.ok and r.image_dim == 1 and r.kernel_dim == 1
    # an abelian algebra has no commutators to kill, so the image is not traceless
    assert not image_is_traceless(g)


def test_extension_requires_eps_w():
    alg = algebra("A2", 1, "trivial", True)
    with pytest.raises(EpsilonNotEpsW):
        extend_to_g(alg, heis(alg.datum))


# -- orbit-sum identity ----------------------------------------------------------

def naive_identity(label, power=1):
    L, w, D = lattice(label), coxeter(label, power), datum(label, power)
    d = w.order
    pows = [w.power(j) for j in range(d)]
    n = 0
    for a in L.roots:
        orbit = [p.apply(a) for p in pows]
        for b in L.roots:
            ips = [L.ip(x, b) for x in orbit]
            if any(abs(v) > 1 for v in ips):
                continue
            n += 1
            lhs = CycNum.one(d) - CycNum.zeta(d, pairing_w(L, w, b, a))
            rhs = CycNum.zero(d)
            for x, v in zip(orbit, ips):
                if v == -1:
                    rhs = rhs + D.epsilon(x, b)
            assert lhs == rhs, (a, b)
    return n


@pytest.mark.parametrize("label", ["A2", "A3", "D4"])
def test_orbit_sum_identity_matches_naive(label):
    n = naive_identity(label)
    rep = orbit_sum_check(lattice(label), coxeter(label))
    assert rep.ok and rep.eligible == rep.checked == n


@pytest.mark.parametrize("d", [3, 5])
def test_orbit_sum_identity_e8(d):
    rep = orbit_sum_check(lattice("E8"), coxeter("E8", {3: 10, 5: 6}[d]))
    assert rep.ok and rep.checked == rep.eligible > 0


def test_orbit_sum_identity_sampled():
    rep = orbit_sum_check(lattice("E8"), coxeter("E8", 10), samples=1000, seed=42)
    assert rep.ok and rep.checked == 1000


def test_empty_sum_pair():
    L = lattice("D4")
    w = minus_identity(L)
    d = w.order
    found = 0
    for a in L.roots:
        for b in L.roots:
            if all(L.ip(w.power(j).apply(a), b) == 0 for j in range(d)):
                assert pairing_w(L, w, b, a) == 0
                found += 1
    assert found
    assert orbit_sum_check(L, w).ok


@pytest.mark.parametrize("d", [2, 3, 5, 6])
def test_polynomial_sum_identity(d):
    assert polynomial_sum_identity(d, trials=50, seed=d)


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 12), st.lists(st.integers(-20, 20), min_size=1, max_size=30))
def test_polynomial_sum_identity_numeric(d, coeffs):
    zs = [cmath.exp(2j * cmath.pi * k / d) for k in range(d)]
    lhs = sum(sum(c * z ** i for i, c in enumerate(coeffs)) for z in zs)
    rhs = d * sum(c for i, c in enumerate(coeffs) if i % d == 0)
    assert abs(lhs - rhs) < 1e-6 * (1 + sum(map(abs, coeffs)))
    exact = CycNum.zero(d)
    for k in range(d):
        val = CycNum.zero(d)
        for c in reversed(coeffs):
            val = val * CycNum.zeta(d, k) + c
        exact = exact + val
    assert exact == rhs
