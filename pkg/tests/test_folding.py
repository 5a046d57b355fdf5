from fractions import Fraction

import pytest

from extlie.errors import ActionConditionsViolated, NonCommutingPair
from extlie.folding import (FOLDING_CASES, FoldingCase, GaloisAction, check_action, descend_g2,
                            fold, folding_datum, g2_descent_action, galois_descend,
                            identify_type, roots_from_gram, simple_root_gram, type_invariants)
from extlie.lattice import aut_from_reflection_word, build_lattice, diagram_automorphism
from extlie.lie_algebra import construct, verify_jacobi
from extlie.linalg import identity, matmul

# (case, dim, type, long/short length ratio); dims are rank + number of roots
TABLE = [("A3C2", 10, "C2", 2), ("D5B4", 36, "B4", 2), ("D4G2", 14, "G2", 3), ("E6F4", 52, "F4", 2)]
ROOT_COUNTS = {"C2": 8, "B4": 32, "G2": 12, "F4": 48, "B3": 18, "C3": 18}


@pytest.fixture(scope="module")
def folds():
    return {name: fold(name) for name, *_ in TABLE}


# -- type identification ------------------------------------------------------

@pytest.mark.parametrize("label", sorted(ROOT_COUNTS))
def test_generated_root_systems(label):
    n = int(label[1:])
    roots = roots_from_gram(simple_root_gram(label[0], n))
    assert len(roots) == ROOT_COUNTS[label]
    assert type_invariants(label)[1] == ROOT_COUNTS[label]


def _weights_in_basis(label):
    n = int(label[1:])
    g = simple_root_gram(label[0], n)
    # express roots by their pairings with simple roots, a coordinate change
    return [[sum(r[i] * g[i][j] for i in range(n)) for j in range(n)]
            for r in roots_from_gram(g)], n


@pytest.mark.parametrize("label", ["B3", "C3", "B4", "C4", "F4", "G2", "C2", "A3", "D4"])
def test_identify_type_recovers_label(label):
    w, n = _weights_in_basis(label)
    ident = identify_type(w, n)
    assert ident["type"] == label and ident["crystallographic"]


def test_b_and_c_are_distinguished_by_length_counts():
    b, c = identify_type(*_weights_in_basis("B3")), identify_type(*_weights_in_basis("C3"))
    assert b["roots"] == c["roots"] == 18
    assert (b["long_roots"], b["short_roots"]) == (12, 6)
    assert (c["long_roots"], c["short_roots"]) == (6, 12)


def test_non_root_system_is_flagged():
    vecs = [[1, 0], [0, 1], [1, 1], [1, -1], [1, 2]]
    ident = identify_type(vecs + [[-x for x in v] for v in vecs], 2)
    assert ident["type"] is None


# -- folding table -------------------------------------------------------------

@pytest.mark.parametrize("name,dim,kind,ratio", TABLE)
def test_folding_table(folds, name, dim, kind, ratio):
    r = folds[name]
    assert r.ok
    assert r.dim == dim == int(kind[1:]) + ROOT_COUNTS[kind]
    assert r.type == kind
    assert Fraction(r.identification["length_ratio"]) == ratio
    assert len(r.cartan_indices) == int(kind[1:])
    assert all(r.checks.values())


@pytest.mark.parametrize("name", [t[0] for t in TABLE])
def test_phi_order_matches_diagram(folds, name):
    r = folds[name]
    _, theta = folding_datum(r.case)
    assert r.phi.order() == theta.order
    assert r.phi.is_homomorphism(r.algebra) is None
    assert r.phi.compose(r.algebra.w_tilde) == r.algebra.w_tilde.compose(r.phi)


@pytest.mark.parametrize("name", ["A3C2", "D4G2"])
def test_fixed_algebra_is_a_lie_algebra(folds, name):
    t = folds[name].fixed
    assert verify_jacobi(t, mode="full").ok


@pytest.mark.parametrize("name", [t[0] for t in TABLE])
def test_cartan_part_abelian(folds, name):
    r = folds[name]
    cart = r.cartan_indices
    for i in cart:
        for j in cart:
            assert not r.fixed.bracket(i, j)


@pytest.mark.parametrize("name", [t[0] for t in TABLE])
def test_diagram_commutes_with_word(name):
    case = FOLDING_CASES[name]
    L = build_lattice(case.source)
    c = aut_from_reflection_word(L, case.word)
    th = diagram_automorphism(L, case.diagram)
    assert matmul(th.matrix, c.matrix) == matmul(c.matrix, th.matrix)


def test_non_commuting_pair_rejected():
    with pytest.raises(NonCommutingPair):
        fold(FoldingCase("bad", "A3", [1, 2, 3], [3, 2, 1], "C2"))


def test_json_shape(folds):
    blob = folds["D4G2"].to_json()
    assert blob["case"] == "fold:D4G2" and blob["dim"] == 14
    assert blob["identification"]["type"] == "G2"


# -- Galois descent ------------------------------------------------------------

@pytest.fixture(scope="module")
def g2q():
    return descend_g2()


def test_g2_descent(g2q):
    res, extra = g2q
    assert res.ok
    assert res.fixed_dim_q == res.expected_dim_q == 28
    assert res.form.dim == 28 and res.form.structure_rational()
    assert res.folded.dim == 14 and res.folded.structure_rational()
    assert res.checks["killing-square-class"]
    assert res.checks["phi-equivariant"]


def test_g2_descent_forms_are_lie_algebras(g2q):
    res, _ = g2q
    assert verify_jacobi(res.folded, mode="full").ok
    assert verify_jacobi(res.form, mode="sampled", count=3000, seed=7).ok


def test_descent_basis_is_fixed_by_sigma(g2q):
    res, extra = g2q
    from extlie.folding import semilinear_map
    _, act = g2_descent_action()
    a_sigma, s = semilinear_map(extra["algebra"], act)
    for v in res.basis:
        img = a_sigma.apply({k: c.galois(s) for k, c in v.items()})
        assert {k: c for k, c in img.items() if c} == {k: c for k, c in v.items() if c}


def test_sigma_inverts_coxeter():
    datum, act = g2_descent_action()
    c = datum.w
    assert matmul(matmul(act.matrix, c.matrix), act.matrix) == [list(r) for r in c.inverse().matrix]
    assert check_action(datum, act) == []


def test_bad_action_rejected():
    datum, _ = g2_descent_action()
    alg = construct(datum)
    bad = GaloisAction(5, identity(4))
    assert check_action(datum, bad)
    with pytest.raises(ActionConditionsViolated):
        galois_descend(alg, bad)


def test_trivial_group_returns_same_algebra():
    datum, _ = g2_descent_action()
    alg = construct(datum)
    res = galois_descend(alg, GaloisAction(1, identity(4)))
    assert res.form is alg and res.fixed_dim_q == alg.dim
