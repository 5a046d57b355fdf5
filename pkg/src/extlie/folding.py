"""Folding by diagram automorphisms and Galois descent to rational forms."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

from .cyclotomic import CycNum
from .epsilon import InputDatum, make_datum
from .errors import (ActionConditionsViolated, NonCommutingPair, UnexpectedType)
from .lattice import (aut_from_reflection_word, build_lattice, cartan_matrix,
                      diagram_automorphism, is_trivial_pairing, LatticeAut)
from .lie_algebra import (ExtensionIso, GradedLieAlgebra, LieTable, SparseMap, construct,
                          extension_iso_from_lattice, apply_datum_isomorphism,
                          killing_det, vsub)
from .linalg import SpanCoordinates, det, matmul, sparse_kernel


# ---------------------------------------------------------------------------
# subalgebras


def subalgebra_table(alg: LieTable, basis: Sequence[dict], labels: Sequence[str] | None = None,
                     field_order: int | None = None) -> tuple[LieTable, SpanCoordinates]:
    """Structure constants of the span of ``basis`` (must be a subalgebra)."""
    coords = SpanCoordinates(basis)
    n = len(basis)
    fo = alg.field_order if field_order is None else field_order
    brackets = {}
    for a in range(n):
        for b in range(a + 1, n):
            v = alg.bracket_vec(basis[a], basis[b])
            c = coords.coords(v)
            if c is None:
                raise ArithmeticError(f"span is not closed under the bracket ({a}, {b})")
            terms = tuple(sorted((k, _to_cyc(x, fo)) for k, x in c.items() if x))
            if terms:
                brackets[(a, b)] = terms
    labels = labels or [f"v{k}" for k in range(n)]
    return LieTable(labels, fo, brackets), coords


def _to_cyc(x, order: int) -> CycNum:
    if isinstance(x, CycNum):
        if x.order == order:
            return x
        return x.at_order(order)
    return CycNum.rational(x, order)


# ---------------------------------------------------------------------------
# root systems of arbitrary type (for identifying folded algebras)


def _frac_matrix(rows) -> list[list[Fraction]]:
    return [[Fraction(x) for x in r] for r in rows]


def simple_root_gram(kind: str, n: int) -> list[list[Fraction]]:
    """Gram matrix of simple roots, long roots of squared length 2 unless noted."""
    if kind in "ADE":
        return _frac_matrix(cartan_matrix(f"{kind}{n}"))
    g = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        g[i][i] = Fraction(2)
    for i in range(n - 1):
        g[i][i + 1] = g[i + 1][i] = Fraction(-1)
    if kind == "B":  # e_i - e_{i+1}, e_n
        g[n - 1][n - 1] = Fraction(1)
        return g
    if kind == "C":  # e_i - e_{i+1}, 2 e_n
        g[n - 1][n - 1] = Fraction(4)
        g[n - 2][n - 1] = g[n - 1][n - 2] = Fraction(-2)
        return g
    if kind == "F" and n == 4:
        return _frac_matrix([[2, -1, 0, 0], [-1, 2, -1, 0],
                             [0, -1, 1, Fraction(-1, 2)], [0, 0, Fraction(-1, 2), 1]])
    if kind == "G" and n == 2:
        return _frac_matrix([[2, -3], [-3, 6]])
    raise UnexpectedType(f"{kind}{n}")


def roots_from_gram(g: Sequence[Sequence[Fraction]]) -> list[tuple]:
    n = len(g)
    simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]

    def ip(a, b):
        return sum(a[i] * g[i][j] * b[j] for i in range(n) for j in range(n))

    seen = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for v in frontier:
            for i in range(n):
                c = 2 * ip(simple[i], v) / g[i][i]
                assert c.denominator == 1
                r = tuple(x - int(c) * (k == i) for k, x in enumerate(v))
                if r not in seen:
                    seen.add(r)
                    nxt.append(r)
        frontier = nxt
    return sorted(seen)


def root_system_invariants(lengths: Sequence[Fraction], rank: int) -> tuple:
    """(rank, #roots, counts per length from short to long, long/short ratio)."""
    distinct = sorted(set(lengths))
    counts = tuple(sum(1 for x in lengths if x == L) for L in distinct)
    ratio = distinct[-1] / distinct[0] if distinct else Fraction(1)
    return rank, len(lengths), counts, ratio


def candidate_types(rank: int) -> list[str]:
    out = [f"A{rank}"]
    if rank >= 3:
        out.append(f"B{rank}")
    if rank >= 2:
        out.append(f"C{rank}")  # C2 stands for B2 = C2
    if rank >= 4:
        out.append(f"D{rank}")
    if rank in (6, 7, 8):
        out.append(f"E{rank}")
    if rank == 4:
        out.append("F4")
    if rank == 2:
        out.append("G2")
    return out


def type_invariants(label: str) -> tuple:
    kind, n = label[0], int(label[1:])
    g = simple_root_gram(kind, n)
    roots = roots_from_gram(g)
    lengths = [sum(r[i] * g[i][j] * r[j] for i in range(n) for j in range(n)) for r in roots]
    return root_system_invariants(lengths, n)


def identify_type(weights: Sequence[Sequence], rank: int) -> dict:
    """Match a root multiset (weights in some coordinates) to a Dynkin type.

    Lengths come from the trace form K = sum_l l l^T on the coordinate space.
    """
    n = rank
    K = [[sum(Fraction(w[i]) * Fraction(w[j]) for w in weights) for j in range(n)] for i in range(n)]
    from .linalg import fraction_inverse
    Kinv = fraction_inverse(K)

    def ip(a, b):
        return sum(Fraction(a[i]) * Kinv[i][j] * Fraction(b[j]) for i in range(n) for j in range(n))

    lengths = [ip(w, w) for w in weights]
    wset = {tuple(Fraction(x) for x in w) for w in weights}
    crystallographic = len(wset) == len(weights)
    for a in wset:
        for b in wset:
            c = 2 * ip(a, b) / ip(b, b)
            if c.denominator != 1 or tuple(x - c * y for x, y in zip(a, b)) not in wset:
                crystallographic = False
                break
        if not crystallographic:
            break
    inv = root_system_invariants(lengths, n)
    match = next((t for t in candidate_types(n) if type_invariants(t) == inv), None)
    distinct = sorted(set(lengths))
    return {
        "type": match,
        "rank": n,
        "roots": len(weights),
        "crystallographic": crystallographic,
        "length_ratio": str(inv[3]),
        "long_roots": sum(1 for x in lengths if x == distinct[-1]) if distinct else 0,
        "short_roots": sum(1 for x in lengths if x == distinct[0]) if len(distinct) > 1 else 0,
    }


# ---------------------------------------------------------------------------
# folding


@dataclass
class FoldingCase:
    name: str
    source: str
    word: list[int]
    diagram: list[int]  # 1-based image of each simple root
    expected: str


FOLDING_CASES = {
    "A3C2": FoldingCase("A3C2", "A3", [1, 3, 2], [3, 2, 1], "C2"),
    "D5B4": FoldingCase("D5B4", "D5", [1, 2, 3, 4, 5], [1, 2, 3, 5, 4], "B4"),
    "D4G2": FoldingCase("D4G2", "D4", [2, 1, 3, 4], [3, 2, 4, 1], "G2"),
    "E6F4": FoldingCase("E6F4", "E6", [2, 4, 1, 6, 3, 5], [6, 2, 5, 4, 3, 1], "F4"),
}


@dataclass
class FoldResult:
    case: FoldingCase
    algebra: GradedLieAlgebra
    phi: SparseMap
    fixed_basis: list[dict]
    fixed: LieTable
    cartan_indices: list[int]
    identification: dict
    checks: dict = field(default_factory=dict)

    @property
    def type(self) -> str | None:
        return self.identification["type"]

    @property
    def dim(self) -> int:
        return self.fixed.dim

    @property
    def ok(self) -> bool:
        return all(self.checks.values()) and self.type == self.case.expected

    def to_json(self) -> dict:
        out = self.fixed.to_json()
        out.update({
            "case": "fold:" + self.case.name,
            "source": self.case.source,
            "coxeter_word": self.case.word,
            "diagram": self.case.diagram,
            "identification": self.identification,
            "checks": self.checks,
        })
        return out


def folding_datum(case: FoldingCase) -> tuple[InputDatum, LatticeAut]:
    L = build_lattice(case.source)
    c = aut_from_reflection_word(L, case.word)
    theta = diagram_automorphism(L, case.diagram)
    if matmul(theta.matrix, c.matrix) != matmul(c.matrix, theta.matrix):
        raise NonCommutingPair(f"diagram automorphism does not commute with {case.word}")
    if not is_trivial_pairing(c):
        raise ArithmeticError("Coxeter pairing is not trivial")
    datum = make_datum(L, c, "eps_w", name="fold:" + case.name)
    if not datum.cocycle.is_trivial:
        raise ArithmeticError("extension for a Coxeter element should split")
    return datum, theta


def fold(case: FoldingCase | str) -> FoldResult:
    if isinstance(case, str):
        case = FOLDING_CASES[case.split(":")[-1]]
    datum, theta = folding_datum(case)
    alg = construct(datum)
    # the extension map is (e, a) -> (e, theta a); trivial cocycle so no correction
    phi = apply_datum_isomorphism(alg, alg, theta.matrix,
                                  extension_iso_from_lattice(datum, datum, theta.matrix))
    checks = {
        "commutes": True,
        "phi-order": phi.order() == theta.order,
        "phi-homomorphism": phi.is_homomorphism(alg) is None,
    }
    fixed_basis = phi.eigenspace(CycNum.one(alg.field_order))
    # order: Cartan part first
    fixed_basis.sort(key=lambda v: (min(v) >= alg.ell, min(v)))
    cart = [k for k, v in enumerate(fixed_basis) if max(v) < alg.ell]
    labels = [f"t{k + 1}" for k in range(len(cart))] + \
        [f"y{k}" for k in range(len(fixed_basis) - len(cart))]
    table, _ = subalgebra_table(alg, fixed_basis, labels)
    weights, cartan_ok = _weights(table, cart)
    checks["cartan-self-centralizing"] = cartan_ok
    ident = identify_type(weights, len(cart))
    checks["crystallographic"] = ident["crystallographic"]
    res = FoldResult(case, alg, phi, fixed_basis, table, cart, ident, checks)
    if ident["type"] is None:
        raise UnexpectedType(f"fixed algebra of {case.name} matches no Dynkin type")
    return res


def _weights(table: LieTable, cart: list[int]) -> tuple[list[list[Fraction]], bool]:
    """Weights of ad(t) on the non-Cartan basis, plus the Cartan property.

    The non-Cartan basis vectors must be simultaneous eigenvectors.
    """
    rest = [k for k in range(table.dim) if k not in cart]
    weights = []
    ok = all(not table.bracket(a, b) for a in cart for b in cart)
    for k in rest:
        w = []
        for t in cart:
            v = table.bracket(t, k)
            if set(v) - {k}:
                raise UnexpectedType("fixed basis is not a weight basis for the torus")
            c = v.get(k, table.zero)
            if not c.is_rational():
                raise UnexpectedType("weight value is not rational")
            w.append(c.rational_value())
        weights.append(w)
    # centralizer of the torus, by exact kernel of the stacked ad maps
    rows = []
    for t in cart:
        for k_out in range(table.dim):
            rows.append({})
        base = len(rows) - table.dim
        for k in range(table.dim):
            for m, c in table.bracket(t, k).items():
                rows[base + m][k] = c
    cent = sparse_kernel(rows, table.dim, table.one)
    ok = ok and len(cent) == len(cart)
    return weights, ok


# ---------------------------------------------------------------------------
# Galois descent


@dataclass
class GaloisAction:
    """Cyclic group generated by sigma: zeta -> zeta^s, lattice action
    ``matrix``, and the extension action (e, a) -> (s e + g(a), Q a)."""
    s: int
    matrix: list
    ext: ExtensionIso | None = None

    def group_order(self, n: int) -> int:
        k, x = 1, self.s % n
        while x != 1 % n:
            x = x * self.s % n
            k += 1
        return k


def check_action(datum: InputDatum, act: GaloisAction) -> list[str]:
    """Conditions A1-A3 plus compatibility of the pairing and epsilon."""
    L = datum.lattice
    w = datum.w
    d = datum.d
    G = datum.group
    probs = []
    if gcd(act.s, d) != 1:
        probs.append("s is not a unit mod d")
        return probs
    sig = LatticeAut(L, act.matrix)
    order = act.group_order(d)
    if sig.order > order and order % sig.order:
        probs.append("lattice action order incompatible with the group")
    if sig.power(order).matrix != w.power(0).matrix:
        probs.append("sigma^|Gamma| is not the identity on the lattice")
    # A1: sigma w^i sigma^-1 = w^{s i}
    sinv = sig.inverse().matrix
    for i in range(d):
        lhs = matmul(matmul(act.matrix, w.powers[i]), sinv)
        if lhs != [list(r) for r in w.powers[(act.s * i) % d]]:
            probs.append("A1 fails")
            break
    ext = act.ext or extension_iso_from_lattice(datum, datum, act.matrix)
    # A2: the extension action is s on the centre and a twisted homomorphism
    c = datum.cocycle
    elems = G.elements()
    for a in elems:
        for b in elems:
            lhs = ext.f(G.add(a, b)) - ext.f(a) - ext.f(b)
            rhs = c(ext.cls_image(G, a), ext.cls_image(G, b)) - act.s * c(a, b)
            if (lhs - rhs) % d:
                probs.append("A2 fails: extension action is not a homomorphism")
                break
        else:
            continue
        break
    # A3: the two induced actions on coinvariants agree
    for r in L.roots:
        im = tuple(sum(act.matrix[i][k] * x for k, x in enumerate(r)) for i in range(L.rank))
        if G.project(im) != ext.cls_image(G, G.project(r)):
            probs.append("A3 fails")
            break
    # pairing and epsilon compatibility over all root pairs
    eps = datum.epsilon
    roots = L.roots
    img = [tuple(sum(act.matrix[i][k] * x for k, x in enumerate(r)) for i in range(L.rank))
           for r in roots]
    for a, r in enumerate(roots):
        for b, t in enumerate(roots):
            if act.s * c.commutator_on_lattice(r, t) % d != c.commutator_on_lattice(img[a], img[b]):
                probs.append("pairing not Galois compatible")
                break
            if eps(r, t).galois(act.s) != eps(img[a], img[b]):
                probs.append("epsilon not Galois compatible")
                break
        else:
            continue
        break
    return probs


def semilinear_map(alg: GradedLieAlgebra, act: GaloisAction) -> tuple[SparseMap, int]:
    """Images of the basis under a_sigma (apply sigma to coefficients first)."""
    datum = alg.datum
    ext = act.ext or extension_iso_from_lattice(datum, datum, act.matrix)
    m = apply_datum_isomorphism(alg, alg, act.matrix, ext, check=False)
    return m, act.s


def _expand(v: dict, n: int, phi: int) -> dict:
    out = {}
    for k, c in v.items():
        c = c if c.order == n else c.at_order(n)
        for m, x in enumerate(c.coeffs):
            if x:
                out[k * phi + m] = x
    return out


def _collapse(v: dict, n: int, phi: int) -> dict:
    groups: dict = {}
    for key, x in v.items():
        k, m = divmod(key, phi)
        groups.setdefault(k, [Fraction(0)] * phi)[m] = Fraction(x)
    return {k: CycNum(n, cs) for k, cs in groups.items() if any(cs)}


@dataclass
class DescentResult:
    form: LieTable
    basis: list[dict]
    fixed_dim_q: int
    expected_dim_q: int
    checks: dict
    folded: LieTable | None = None
    folded_basis: list | None = None

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        out = self.form.to_json()
        out["checks"] = self.checks
        out["q_dim"] = self.fixed_dim_q
        if self.folded is not None:
            out["folded"] = self.folded.to_json()
        return out


def galois_descend(alg: GradedLieAlgebra, act: GaloisAction, phi_map: SparseMap | None = None,
                   killing_check: bool = True) -> DescentResult:
    """Rational form of ``alg`` fixed by the semilinear action of <sigma>.

    With ``phi_map`` (a Gamma-equivariant automorphism), also returns the
    rational form of its fixed subalgebra.
    """
    datum = alg.datum
    n = alg.field_order
    probs = check_action(datum, act)
    if probs:
        raise ActionConditionsViolated("; ".join(probs))
    order = act.group_order(n)
    if order == 1 and act.matrix == [list(r) for r in datum.w.power(0).matrix]:
        # trivial group: the form is the algebra itself
        basis = [{k: alg.one} for k in range(alg.dim)]
        return DescentResult(alg, basis, alg.dim, alg.dim, {"trivial-group": True})
    a_sigma, s = semilinear_map(alg, act)
    phi = len(alg.one.coeffs)
    zeta_pows = [CycNum.zeta(n, m) for m in range(phi)]
    # Q-linear matrix of a_sigma on the basis {zeta^m b_k}
    rows: list[dict] = [dict() for _ in range(alg.dim * phi)]
    for k in range(alg.dim):
        img = a_sigma.columns[k]
        for m in range(phi):
            col = k * phi + m
            z = zeta_pows[m].galois(s)
            v = _expand({j: z * c for j, c in img.items()}, n, phi)
            for r, x in v.items():
                rows[r][col] = x
            rows[col][col] = rows[col].get(col, 0) - 1
    kern = sparse_kernel(rows, alg.dim * phi, Fraction(1))
    expected = alg.dim * phi // order
    basis = [_collapse(v, n, phi) for v in kern]
    checks = {"q-dimension": len(kern) == expected}
    # structure constants: coordinates over Q of brackets of basis vectors
    coords = SpanCoordinates([dict(v) for v in kern])
    brackets = {}
    rational = True
    closed = True
    for a in range(len(basis)):
        for b in range(a + 1, len(basis)):
            v = _expand(alg.bracket_vec(basis[a], basis[b]), n, phi)
            c = coords.coords(v)
            if c is None:
                closed = False
                continue
            terms = []
            for k, x in sorted(c.items()):
                if isinstance(x, CycNum):
                    rational = rational and x.is_rational()
                    x = x.rational_value()
                terms.append((k, CycNum.rational(x)))
            if terms:
                brackets[(a, b)] = tuple(terms)
    checks["closed"] = closed
    checks["rational"] = rational
    form = LieTable([f"q{k}" for k in range(len(basis))], 1, brackets)
    res = DescentResult(form, basis, len(kern), expected, checks)
    if killing_check and len(basis) == alg.dim:
        checks["killing-square-class"] = killing_square_witness(alg, form, basis)
    if phi_map is not None:
        checks["phi-equivariant"] = all(
            not vsub(a_sigma.apply(phi_map.columns[k]), phi_map.apply(a_sigma.columns[k]))
            for k in range(alg.dim))
        # phi acts Q-linearly on the form; take its fixed vectors
        img_rows: list[dict] = [dict() for _ in range(len(basis))]
        for k, v in enumerate(basis):
            c = coords.coords(_expand(phi_map.apply(v), n, phi))
            if c is None:
                checks["phi-preserves-form"] = False
                return res
            for r, x in c.items():
                img_rows[r][k] = Fraction(x.rational_value() if isinstance(x, CycNum) else x)
            img_rows[k][k] = img_rows[k].get(k, 0) - 1
        checks["phi-preserves-form"] = True
        fixed = sparse_kernel(img_rows, len(basis), Fraction(1))
        fixed_vecs = [{k: CycNum.rational(x) for k, x in v.items()} for v in fixed]
        table, _ = subalgebra_table(form, fixed_vecs, [f"g{k}" for k in range(len(fixed))], 1)
        res.folded = table
        res.folded_basis = fixed_vecs
        checks["folded-rational"] = table.structure_rational()
    return res


def killing_square_witness(alg: GradedLieAlgebra, form: LieTable, basis: list[dict]) -> bool:
    """det K(form) == det(P)^2 det K(alg), with P the change of basis."""
    from .lie_algebra import killing_form
    Kq = form.killing_form_dense()
    det_q = det(Kq)
    det_h = killing_det(alg, killing_form(alg))
    P = [[basis[b].get(a, alg.zero) for b in range(len(basis))] for a in range(alg.dim)]
    dp = det(P)
    if not det_q or not det_h or not dp:
        return False
    return _to_cyc(det_q, alg.field_order) == dp * dp * det_h


def g2_descent_action() -> tuple[InputDatum, GaloisAction]:
    """D4 with c = w2 w1 w3 w4 over Q(zeta_6), sigma acting by w2 and zeta -> zeta^5."""
    datum, theta = folding_datum(FOLDING_CASES["D4G2"])
    w2 = aut_from_reflection_word(datum.lattice, [2])
    return datum, GaloisAction(5, [list(r) for r in w2.matrix])


def descend_g2() -> tuple[DescentResult, dict]:
    case = FOLDING_CASES["D4G2"]
    datum, theta = folding_datum(case)
    alg = construct(datum)
    _, act = g2_descent_action()
    phi = apply_datum_isomorphism(alg, alg, theta.matrix,
                                  extension_iso_from_lattice(datum, datum, theta.matrix))
    c = datum.w
    w2 = LatticeAut(datum.lattice, act.matrix)
    extra = {"sigma-c-sigma-inverse": matmul(matmul(w2.matrix, c.matrix), w2.matrix)
             == [list(r) for r in c.inverse().matrix]}
    res = galois_descend(alg, act, phi)
    res.checks.update(extra)
    return res, {"algebra": alg, "phi": phi}
