import pytest
import sympy
from hypothesis import given, settings, strategies as st

from extlie.errors import (IndexOutOfRange, NotCoxeterWord, NotDiagramAutomorphism,
                           NotElliptic, UnknownType)
from extlie.lattice import (CoinvariantGroup, Pairing, aut_from_reflection_word, aut_special,
                            build_lattice, cartan_matrix, coinvariants, coxeter_power,
                            diagram_automorphism, is_trivial_pairing, lepowsky_matrix,
                            minimal_polynomial, minus_identity, pairing_equality,
                            pairing_lepowsky, pairing_w)
from extlie.linalg import int_det, matmul, smith_normal_form, transpose

from conftest import E8_WORD, coxeter, lattice

ROOT_COUNTS = {"A1": 2, "A2": 6, "A3": 12, "A5": 30, "A8": 72, "D4": 24, "D5": 40,
               "D8": 112, "E6": 72, "E7": 126, "E8": 240}
ADE_UP_TO_8 = [f"A{n}" for n in range(1, 9)] + [f"D{n}" for n in range(4, 9)] + ["E6", "E7", "E8"]
COXETER_NUMBER = {"A1": 2, "A2": 3, "A3": 4, "D4": 6, "D5": 8, "E6": 12, "E7": 18, "E8": 30}


def sym(m):
    return sympy.Matrix([list(r) for r in m])


# -- root systems -----------------------------------------------------------

@pytest.mark.parametrize("label,count", sorted(ROOT_COUNTS.items()))
def test_root_counts(label, count):
    L = build_lattice(label)
    assert len(L.roots) == count
    assert all(L.ip(r, r) == 2 for r in L.roots)
    assert L.roots == sorted(L.roots)
    assert all(tuple(-x for x in r) in L.root_index for r in L.roots)


@pytest.mark.parametrize("label", ADE_UP_TO_8)
def test_gram_is_positive_definite_cartan(label):
    g = cartan_matrix(label)
    n = len(g)
    assert all(g[i][i] == 2 for i in range(n))
    assert all(g[i][j] == g[j][i] in (0, -1) for i in range(n) for j in range(n) if i != j)
    assert sym(g).is_positive_definite
    # classical determinants: A_n -> n+1, D_n -> 4, E6/E7/E8 -> 3/2/1
    kind, r = label[0], int(label[1:])
    assert int_det(g) == {"A": r + 1, "D": 4, "E": 9 - r}[kind]


def test_direct_sum_and_unknown_labels():
    L = build_lattice("A2+A1")
    assert L.rank == 3 and len(L.roots) == 8
    for bad in ["X3", "", "A0", "D3", "E9"]:
        with pytest.raises(UnknownType):
            build_lattice(bad)


# -- automorphisms ----------------------------------------------------------

def test_reflection_words():
    A2 = lattice("A2")
    c = aut_from_reflection_word(A2, [1, 2])
    assert c.order == 3 and c.elliptic and c.det_one_minus() == 3
    e = aut_from_reflection_word(A2, [])
    assert e.order == 1 and not e.elliptic
    D4 = lattice("D4")
    assert aut_from_reflection_word(D4, [2, 1, 3, 4]).order == 6
    with pytest.raises(IndexOutOfRange):
        aut_from_reflection_word(A2, [1, 3])
    with pytest.raises(IndexOutOfRange):
        aut_from_reflection_word(A2, [0])


def test_word_composition_order():
    # s1 s2 applied to alpha_2: s2 first gives -alpha_2, then s1 gives -alpha_1 - alpha_2
    A2 = lattice("A2")
    c = aut_from_reflection_word(A2, [1, 2])
    assert c.apply((0, 1)) == (-1, -1)


@pytest.mark.parametrize("label,h", sorted(COXETER_NUMBER.items()))
def test_coxeter_order_is_coxeter_number(label, h):
    c = coxeter(label)
    assert c.order == h and c.elliptic


def test_e8_special_elements():
    E8 = lattice("E8")
    c6 = coxeter_power(E8, E8_WORD, 6)
    assert c6.order == 5 and c6.det_one_minus() != 0
    assert coxeter_power(E8, E8_WORD, 15) == minus_identity(E8)
    assert coxeter_power(E8, E8_WORD, 10).order == 3
    with pytest.raises(NotCoxeterWord):
        coxeter_power(E8, [1, 2, 3], 1)


def test_diagram_automorphisms():
    D4 = lattice("D4")
    tri = diagram_automorphism(D4, [3, 2, 4, 1])
    assert tri.order == 3 and not tri.elliptic
    assert tri.apply((0, 1, 0, 0)) == (0, 1, 0, 0)
    with pytest.raises(NotDiagramAutomorphism):
        diagram_automorphism(D4, [2, 1, 3, 4])
    with pytest.raises(NotDiagramAutomorphism):
        diagram_automorphism(D4, [1, 1, 3, 4])
    assert aut_special(D4, "diagram", perm=[1, 2, 4, 3]).order == 2
    assert aut_special(D4, "matrix", rows=tri.matrix) == tri
    with pytest.raises(ValueError):
        aut_special(D4, "matrix", rows=[[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])


def random_word(label):
    L = lattice(label)
    return st.lists(st.integers(1, L.rank), min_size=0, max_size=12)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["A3", "D4", "E6", "E8"]).flatmap(
    lambda lab: st.tuples(st.just(lab), random_word(lab))))
def test_words_preserve_gram_and_roots(args):
    label, word = args
    L = lattice(label)
    w = aut_from_reflection_word(L, word)
    g = [list(r) for r in L.gram]
    assert matmul(transpose(w.matrix), matmul(g, w.matrix)) == g
    assert sorted(w.root_perm) == list(range(len(L.roots)))
    # order oracle: sympy matrix powers
    M = sym(w.matrix)
    assert M ** w.order == sympy.eye(L.rank)
    assert all(M ** k != sympy.eye(L.rank) for k in range(1, w.order))
    if w.elliptic:
        assert all(w.apply(r) != r for r in L.roots)


# -- minimal polynomial -----------------------------------------------------

@pytest.mark.parametrize("label", ["A2", "A4", "D4", "D5", "E6", "E8"])
def test_minimal_polynomial_is_squarefree_part_of_charpoly(label):
    t = sympy.Symbol("t")
    for w in [coxeter(label), coxeter(label, 2), minus_identity(lattice(label))]:
        ref = sympy.sqf_part(sym(w.matrix).charpoly(t).as_expr())
        coeffs = sympy.Poly(ref, t).all_coeffs()[::-1]
        assert list(minimal_polynomial(w.matrix)) == [int(c) for c in coeffs]


def test_e8_coxeter_minimal_polynomial_is_phi30():
    from extlie.cyclotomic import cyclotomic_polynomial
    assert coxeter("E8").minimal_polynomial == cyclotomic_polynomial(30)


# -- coinvariants -----------------------------------------------------------

@pytest.mark.parametrize("label,power,factors", [
    ("E8", 6, (5, 5)), ("E8", 10, (3, 3, 3, 3)), ("E8", 15, (2,) * 8), ("A2", 1, (3,)),
    ("D4", 1, (2, 2)), ("A1", 1, (2,)), ("E6", 1, (3,)), ("D5", 1, (4,))])
def test_coinvariant_invariant_factors(label, power, factors):
    w = coxeter(label, power)
    G = coinvariants(lattice(label), w)
    assert G.invariant_factors == factors
    assert G.order == abs(w.det_one_minus())
    # oracle: sympy Smith normal form of 1 - w
    from sympy.matrices.normalforms import smith_normal_form as sym_snf
    D = sym_snf(sympy.eye(w.lattice.rank) - sym(w.matrix), domain=sympy.ZZ)
    diag = sorted(abs(int(D[i, i])) for i in range(w.lattice.rank))
    assert tuple(x for x in diag if x != 1) == tuple(sorted(factors))


@pytest.mark.parametrize("label", ["A1", "A3", "D4", "E6", "E7"])
def test_minus_identity_coinvariants(label):
    L = lattice(label)
    assert coinvariants(L, minus_identity(L)).invariant_factors == (2,) * L.rank


def test_snf_transform_is_verified():
    w = coxeter("E8", 6)
    U, D, V = smith_normal_form(w.one_minus())
    assert matmul(matmul(U, w.one_minus()), V) == D
    assert abs(int_det(U)) == 1 and abs(int_det(V)) == 1


def test_coinvariants_reject_non_elliptic():
    L = lattice("A2")
    with pytest.raises(NotElliptic):
        CoinvariantGroup(L, aut_from_reflection_word(L, [1]))
    with pytest.raises(NotElliptic):
        Pairing(aut_from_reflection_word(L, [1]))


vec8 = st.lists(st.integers(-4, 4), min_size=8, max_size=8).map(tuple)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([6, 10, 15]), vec8, vec8)
def test_projection_is_well_defined_and_lift_is_a_section(power, v, u):
    w = coxeter("E8", power)
    G = coinvariants(lattice("E8"), w)
    img = [sum(r[k] * u[k] for k in range(8)) for r in w.one_minus()]
    assert G.project([a + b for a, b in zip(v, img)]) == G.project(v)
    cls = G.project(v)
    assert G.project(G.lift(cls)) == cls
    assert G.add(cls, G.neg(cls)) == G.zero


# -- pairings ---------------------------------------------------------------

@pytest.mark.parametrize("label,power", [("A2", 1), ("D4", 1), ("E8", 10), ("E8", 6), ("E8", 15),
                                         ("A1", 1), ("E6", 4)])
def test_pairing_equals_lepowsky_on_all_roots(label, power):
    ok, n, witness = pairing_equality(coxeter(label, power))
    assert ok and witness is None
    assert n == len(lattice(label).roots) ** 2


def test_minus_one_pairing_is_parity():
    for label in ["A2", "D4", "E8"]:
        L = lattice(label)
        w = minus_identity(L)
        for a in L.roots[:20]:
            for b in L.roots[-20:]:
                assert pairing_w(L, w, a, b) == L.ip(a, b) % 2
                assert pairing_lepowsky(L, w, a, b) == L.ip(a, b) % 2


@pytest.mark.parametrize("label", ADE_UP_TO_8)
def test_coxeter_pairing_is_trivial(label):
    assert is_trivial_pairing(coxeter(label))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([6, 10, 15]), vec8, vec8, vec8)
def test_pairing_bilinear_alternating_skew(power, a, a2, b):
    L = lattice("E8")
    w = coxeter("E8", power)
    P = Pairing(w)
    d = w.order
    s = tuple(x + y for x, y in zip(a, a2))
    assert P(s, b) == (P(a, b) + P(a2, b)) % d
    assert P(a, a) == 0
    assert (P(a, b) + P(b, a)) % d == 0
    assert P(a, b) == pairing_lepowsky(L, w, a, b)
    C = lepowsky_matrix(w)
    assert sum(a[i] * C[i][j] * b[j] for i in range(8) for j in range(8)) % d == P(a, b)


def test_e8_order5_pairing_is_nondegenerate_on_classes():
    w = coxeter("E8", 6)
    G = coinvariants(lattice("E8"), w)
    P = Pairing(w)
    gens = [G.lift(G.generator(i)) for i in range(G.ngens)]
    assert P(gens[0], gens[1]) != 0
