"""Representations of the Heisenberg-type extension and of the fixed subalgebra.

Character values are kept as exponents in Q/Z (``Fraction`` in [0, 1)), so a
monomial matrix is a list of (row, exponent) pairs, one per column.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Callable, Sequence

import numpy as np

from .central_ext import Cocycle, ExtElement, ext_inv, ext_mul, ext_pow
from .cyclotomic import CycNum
from .errors import CharacterDoesNotExtend, EpsilonNotEpsW
from .lattice import CoinvariantGroup, LatticeAut, Pairing, RootLattice
from .lie_algebra import GradedLieAlgebra, g_structure, orbits, vadd, vsub
from .linalg import SparseEchelon, smith_normal_form, sparse_kernel

Cls = tuple[int, ...]


# ---------------------------------------------------------------------------
# isotropic subgroups


@dataclass
class Subgroup:
    group: CoinvariantGroup
    elements: list[Cls]
    generators: list[Cls]

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def index(self) -> int:
        return self.group.order // self.order

    def __contains__(self, a) -> bool:
        return tuple(a) in self._set

    @property
    def _set(self):
        s = self.__dict__.get("_set_cache")
        if s is None:
            s = self.__dict__["_set_cache"] = set(self.elements)
        return s


def _span(G: CoinvariantGroup, gens: Sequence[Cls]) -> list[Cls]:
    elems = {G.zero}
    frontier = [G.zero]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = G.add(a, g)
                if b not in elems:
                    elems.add(b)
                    nxt.append(b)
        frontier = nxt
    return sorted(elems)


def radical(G: CoinvariantGroup, pairing: Callable[[Cls, Cls], int]) -> list[Cls]:
    gens = [G.generator(i) for i in range(G.ngens)]
    return [a for a in G.elements() if all(pairing(a, g) == 0 for g in gens)]


def maximal_isotropic(G: CoinvariantGroup, pairing: Callable[[Cls, Cls], int]) -> Subgroup:
    """Greedy isotropic subgroup in class order, containing the radical."""
    gens = [G.generator(i) for i in range(G.ngens)]
    for g in gens:
        if pairing(g, g):
            raise ValueError("pairing is not alternating")
    rad = radical(G, pairing)
    members = set(_span(G, rad))
    chosen_gens = [a for a in rad if any(a)]
    for a in G.elements():
        if a in members:
            continue
        if all(pairing(a, s) == 0 for s in chosen_gens):
            chosen_gens.append(a)
            members = set(_span(G, chosen_gens))
    elements = sorted(members)
    sub = Subgroup(G, elements, _minimal_generators(G, elements))
    if not is_maximal_isotropic(sub, pairing):
        raise AssertionError("greedy subgroup is not maximal isotropic")
    return sub


def _minimal_generators(G: CoinvariantGroup, elements: list[Cls]) -> list[Cls]:
    gens: list[Cls] = []
    span = {G.zero}
    for a in elements:
        if a not in span:
            gens.append(a)
            span = set(_span(G, gens))
    return gens


def is_isotropic(sub: Subgroup, pairing) -> bool:
    return all(pairing(a, b) == 0 for a in sub.generators for b in sub.generators)


def is_maximal_isotropic(sub: Subgroup, pairing) -> bool:
    """Isotropic, and no element outside pairs trivially with all of it."""
    if not is_isotropic(sub, pairing):
        return False
    for g in sub.group.elements():
        if g in sub:
            continue
        if all(pairing(g, s) == 0 for s in sub.generators):
            return False
    return True


def abelian_basis(G: CoinvariantGroup, sub: Subgroup) -> list[tuple[Cls, int]]:
    """Independent generators (g_i, order m_i) with sub = prod <g_i>, via SNF."""
    gens = sub.generators
    if not gens:
        return []
    # relation lattice of Z^k -> sub: kernel computed by brute force over the
    # box prod [0, order(g)) is too big in general, so use SNF on the
    # presentation [gens | diag(invariant factors)] instead.
    k = len(gens)
    n = G.ngens
    M = [[gens[j][i] for j in range(k)] + [G.invariant_factors[i] * (i == c) for c in range(n)]
         for i in range(n)]
    # integer kernel of M: rows of the right transform with zero image
    U, D, V = smith_normal_form(M)
    rank = sum(1 for i in range(min(len(D), len(D[0]))) if D[i][i])
    kern = [[V[r][c] for r in range(k + n)] for c in range(rank, k + n)]
    rel = [v[:k] for v in kern]
    # SNF of the relation matrix gives the structure of sub
    if not rel:
        raise ArithmeticError("subgroup of a finite group must have relations")
    U2, D2, V2 = smith_normal_form(rel)
    out = []
    for c in range(k):
        m = D2[c][c] if c < len(D2) else 0
        if m == 1:
            continue
        # new generator: column c of V2 expresses it in the old ones
        g = G.zero
        for j in range(k):
            g = G.add(g, G.scale(V2[j][c], gens[j]))
        out.append((g, m))
    total = 1
    for _, m in out:
        total *= m
    if total != sub.order:
        raise ArithmeticError("abelian basis does not match the subgroup order")
    return out


# ---------------------------------------------------------------------------
# monomial matrices


@dataclass(frozen=True)
class Monomial:
    """Column k maps to row rows[k] with scalar exp(2 pi i phases[k])."""
    rows: tuple[int, ...]
    phases: tuple[Fraction, ...]

    def __matmul__(self, other: "Monomial") -> "Monomial":
        rows = tuple(self.rows[r] for r in other.rows)
        phases = tuple((self.phases[r] + p) % 1 for r, p in zip(other.rows, other.phases))
        return Monomial(rows, phases)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def trace_phases(self) -> list[Fraction]:
        return [p for k, (r, p) in enumerate(zip(self.rows, self.phases)) if r == k]

    def to_sparse(self, order: int) -> dict:
        return {(r, k): _root(p, order) for k, (r, p) in enumerate(zip(self.rows, self.phases))}


def _root(p: Fraction, order: int) -> CycNum:
    e = p * order
    if e.denominator != 1:
        raise ValueError(f"exponent {p} needs a larger field than order {order}")
    return CycNum.zeta(order, int(e))


# ---------------------------------------------------------------------------
# induced representations


@dataclass
class HeisenbergRep:
    cocycle: Cocycle
    subgroup: Subgroup
    basis_chars: list  # [(g_i, m_i, phase of chi(0, g_i))]
    transversal: list[Cls]
    central_exp: int
    field_order: int
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.transversal)

    @property
    def d(self) -> int:
        return self.cocycle.d

    # -- characters --------------------------------------------------------

    def chi(self, a: ExtElement) -> Fraction:
        """Phase of the extended character on an element of the subgroup preimage."""
        c = self.cocycle
        G = c.group
        if a.cls not in self.subgroup:
            raise CharacterDoesNotExtend(f"{a} is outside the inducing subgroup")
        coeffs = self._decompose(a.cls)
        prod = ExtElement(0, G.zero)
        phase = Fraction(0)
        for (g, m, ph), k in zip(self.basis_chars, coeffs):
            prod = ext_mul(c, prod, ext_pow(c, ExtElement(0, g), k))
            phase += k * ph
        assert prod.cls == a.cls
        central = (a.zeta_exp - prod.zeta_exp) % self.d
        return (phase + Fraction(self.central_exp * central, self.d)) % 1

    def _decompose(self, cls: Cls) -> tuple[int, ...]:
        table = self.__dict__.get("_decomp")
        if table is None:
            G = self.cocycle.group
            table = {}
            ranges = [range(m) for _, m, _ in self.basis_chars]
            import itertools
            for ks in itertools.product(*ranges):
                x = G.zero
                for (g, _, _), k in zip(self.basis_chars, ks):
                    x = G.add(x, G.scale(k, g))
                table[x] = ks
            self.__dict__["_decomp"] = table
        return table[tuple(cls)]

    def _coset_of(self, cls: Cls) -> int:
        table = self.__dict__.get("_cosets")
        if table is None:
            G = self.cocycle.group
            table = {}
            for k, t in enumerate(self.transversal):
                for s in self.subgroup.elements:
                    table[G.add(t, s)] = k
            self.__dict__["_cosets"] = table
        return table[tuple(cls)]

    # -- matrices ----------------------------------------------------------

    def monomial(self, h: ExtElement) -> Monomial:
        c = self.cocycle
        rows, phases = [], []
        for t in self.transversal:
            x = ext_mul(c, h, ExtElement(0, t))
            j = self._coset_of(x.cls)
            a = ext_mul(c, ext_inv(c, ExtElement(0, self.transversal[j])), x)
            rows.append(j)
            phases.append(self.chi(a))
        return Monomial(tuple(rows), tuple(phases))

    def matrix(self, h: ExtElement) -> dict:
        return self.monomial(h).to_sparse(self.field_order)

    def generator_elements(self) -> dict[str, ExtElement]:
        G = self.cocycle.group
        out = {"zeta": ExtElement(1, G.zero)}
        for i in range(G.ngens):
            out[f"x{i + 1}"] = ExtElement(0, G.generator(i))
        return out

    def to_json(self) -> dict:
        gens = {}
        for name, h in self.generator_elements().items():
            m = self.matrix(h)
            gens[name] = [[(m.get((r, k)) or CycNum.zero(self.field_order)).to_json()
                           for k in range(self.dim)] for r in range(self.dim)]
        return {"dim": self.dim, "field_order": self.field_order, "generators": gens,
                "subgroup": [list(g) for g in self.subgroup.generators],
                "transversal": [list(t) for t in self.transversal],
                "central_exp": self.central_exp}


def induce(c: Cocycle, sub: Subgroup, central_exp: int = 1) -> HeisenbergRep:
    """Induce the canonical extension of zeta -> zeta^central_exp from the
    preimage of the isotropic subgroup ``sub``."""
    from math import gcd
    G = c.group
    d = c.d
    if gcd(central_exp, d) != 1:
        raise CharacterDoesNotExtend("central character must be faithful")
    for a in sub.generators:
        for b in sub.generators:
            if c.commutator(a, b):
                raise CharacterDoesNotExtend("subgroup is not isotropic, preimage not abelian")
    basis = abelian_basis(G, sub)
    chars = []
    order = d
    for g, m in basis:
        t = ext_pow(c, ExtElement(0, g), m)
        assert t.cls == G.zero
        # chi(0, g)^m must equal chi(zeta^t) = zeta^{s t}
        ph = Fraction(central_exp * t.zeta_exp, d * m) % 1
        chars.append((g, m, ph))
        order = lcm(order, ph.denominator)
    seen = set()
    transversal = []
    for a in G.elements():
        if a in seen:
            continue
        transversal.append(a)
        for s in sub.elements:
            seen.add(G.add(a, s))
    return HeisenbergRep(c, sub, chars, transversal, central_exp, order)


def check_homomorphism(rep: HeisenbergRep, samples: int = 10_000, seed: int = 0):
    """rho(a) rho(b) = rho(ab) on random pairs; returns None or a witness."""
    c = rep.cocycle
    G = c.group
    rng = random.Random(seed)
    cache: dict = {}

    def mono(h):
        m = cache.get(h)
        if m is None:
            m = cache[h] = rep.monomial(h)
        return m

    def rand():
        return ExtElement(rng.randrange(c.d), tuple(rng.randrange(x) for x in G.invariant_factors))

    for _ in range(samples):
        a, b = rand(), rand()
        if mono(a) @ mono(b) != mono(ext_mul(c, a, b)):
            return (a, b)
    return None


def central_character_ok(rep: HeisenbergRep) -> bool:
    G = rep.cocycle.group
    for e in range(rep.d):
        m = rep.monomial(ExtElement(e, G.zero))
        want = Fraction(rep.central_exp * e, rep.d) % 1
        if m.rows != tuple(range(rep.dim)) or any(p != want for p in m.phases):
            return False
    return True


def character_norm(rep: HeisenbergRep) -> tuple[CycNum, int]:
    """(sum_h |tr rho(h)|^2, |H|); equal iff rho is irreducible."""
    c = rep.cocycle
    G = c.group
    total = CycNum.zero(rep.field_order)
    count = 0
    for e in range(c.d):
        for a in G.elements():
            m = rep.monomial(ExtElement(e, a))
            tr = CycNum.zero(rep.field_order)
            for p in m.trace_phases():
                tr = tr + _root(p, rep.field_order)
            total = total + tr * tr.galois(-1)
            count += 1
    return total, count


def commutant_dimension(mats: Sequence[dict], dim: int, field_order: int) -> int:
    """dim {M : M X = X M for all X} by exact nullspace (X sparse dicts)."""
    rows = []
    for X in mats:
        # (M X - X M)[i, j] = sum_k M[i,k] X[k,j] - X[i,k] M[k,j]
        eqs: dict = {}
        for (k, j), x in X.items():
            for i in range(dim):
                eqs.setdefault((i, j), {})
                key = i * dim + k
                eqs[(i, j)][key] = eqs[(i, j)].get(key, 0) + x
        for (i, k), x in X.items():
            for j in range(dim):
                eqs.setdefault((i, j), {})
                key = k * dim + j
                eqs[(i, j)][key] = eqs[(i, j)].get(key, 0) - x
        rows.extend(eqs.values())
    return len(sparse_kernel(rows, dim * dim, CycNum.one(field_order)))


def rep_traces_differ(r1: HeisenbergRep, r2: HeisenbergRep) -> bool:
    G = r1.cocycle.group
    z = ExtElement(1, G.zero)
    m1, m2 = r1.monomial(z), r2.monomial(z)
    order = lcm(r1.field_order, r2.field_order)
    tr1 = sum((_root(p, order) for p in m1.trace_phases()), CycNum.zero(order))
    tr2 = sum((_root(p, order) for p in m2.trace_phases()), CycNum.zero(order))
    return tr1 != tr2


# ---------------------------------------------------------------------------
# extension to the fixed subalgebra


def _mmul(a: dict, b: dict) -> dict:
    rows_b: dict = {}
    for (k, j), x in b.items():
        rows_b.setdefault(k, []).append((j, x))
    out: dict = {}
    for (i, k), x in a.items():
        for j, y in rows_b.get(k, ()):
            vadd(out, {(i, j): x * y})
    return out


def _mcomm(a: dict, b: dict) -> dict:
    return vsub(_mmul(a, b), _mmul(b, a))


@dataclass
class GRep:
    """rho~ on Z generators of the fixed subalgebra."""
    alg: GradedLieAlgebra
    rep: HeisenbergRep
    field_order: int
    z_mats: dict[int, dict]  # root index -> matrix of rho~(Z_{s(r)})
    reps: list[int]  # orbit representatives (basis of g)

    def basis_matrices(self) -> list[dict]:
        return [self.z_mats[a] for a in self.reps]


def extend_to_g(alg: GradedLieAlgebra, rep: HeisenbergRep) -> GRep:
    if alg.datum.epsilon.kind != "eps_w":
        raise EpsilonNotEpsW("representation extension needs eps_w")
    G = alg.datum.group
    w = alg.datum.w
    order = lcm(rep.field_order, alg.field_order)
    mats = {}
    for a, r in enumerate(alg.roots):
        cls = G.project(r)
        # pi(w^j s(r)) = pi(s(r)) since w acts trivially on coinvariants
        if G.project(w.apply(r)) != cls:
            raise ArithmeticError("projection is not w-invariant")
        m = rep.monomial(ExtElement(0, cls)).to_sparse(order)
        mats[a] = m
    reps = [o[0] for o in orbits(w.root_perm)]
    return GRep(alg, rep, order, mats, reps)


@dataclass
class RepHomReport:
    ok: bool
    pairs: int
    witness: list | None = None
    image_dim: int | None = None
    kernel_dim: int | None = None
    commutant_dim: int | None = None
    table_cross_check: bool | None = None

    def to_json(self) -> dict:
        return {"ok": self.ok, "pairs": self.pairs, "witness": self.witness,
                "image_dim": self.image_dim, "kernel_dim": self.kernel_dim,
                "commutant_dim": self.commutant_dim, "table_cross_check": self.table_cross_check}


def _lhs_expansion(g: GRep, a: int, b: int) -> dict:
    """rho~ of sum_{j: (w^j r_a, r_b) = -1} eps(w^j r_a, r_b) Z_{(w^j s(r_a)) s(r_b)}."""
    alg = g.alg
    L = alg.lattice
    datum = alg.datum
    eps = datum.epsilon
    coc = datum.cocycle
    perm = datum.w.root_perm
    rb = alg.roots[b]
    out: dict = {}
    c = a
    for _ in range(alg.d):
        rc = alg.roots[c]
        if L.ip(rc, rb) == -1:
            s = tuple(x + y for x, y in zip(rc, rb))
            scal = eps(rc, rb) * CycNum.zeta(alg.d, coc.on_lattice(rc, rb))
            vadd(out, g.z_mats[L.root_index[s]], scal.at_order(g.field_order)
                 if scal.order != g.field_order else scal)
        c = perm[c]
    return out


def verify_rep_homomorphism(g: GRep, cross_check: bool = True, image: bool = True) -> RepHomReport:
    reps = g.reps
    n = 0
    table = None
    if cross_check:
        zr, table = g_structure(g.alg)
        assert zr == reps
    for p in range(len(reps)):
        for q in range(p + 1, len(reps)):
            a, b = reps[p], reps[q]
            n += 1
            lhs = _lhs_expansion(g, a, b)
            rhs = _mcomm(g.z_mats[a], g.z_mats[b])
            if vsub(lhs, rhs):
                return RepHomReport(False, n, [a, b])
            if table is not None:
                via_table: dict = {}
                for k, c in table.bracket(p, q).items():
                    vadd(via_table, g.z_mats[reps[k]], c)
                if vsub(via_table, lhs):
                    return RepHomReport(False, n, [a, b], table_cross_check=False)
    rep = RepHomReport(True, n, table_cross_check=cross_check or None)
    if image:
        dim = g.rep.dim
        ech = SparseEchelon()
        for m in g.basis_matrices():
            ech.add({i * dim + j: x for (i, j), x in m.items()})
        rep.image_dim = len(ech)
        rep.kernel_dim = len(reps) - rep.image_dim
        rep.commutant_dim = commutant_dimension(g.basis_matrices(), dim, g.field_order)
    return rep


def image_is_traceless(g: GRep) -> bool:
    for m in g.basis_matrices():
        tr = CycNum.zero(g.field_order)
        for (i, j), x in m.items():
            if i == j:
                tr = tr + x
        if tr:
            return False
    return True


# ---------------------------------------------------------------------------
# the orbit-sum identity


@dataclass
class IdentityReport:
    ok: bool
    eligible: int
    checked: int
    witness: list | None = None
    polynomial_ok: bool | None = None

    def to_json(self) -> dict:
        return {"ok": self.ok, "eligible": self.eligible, "checked": self.checked,
                "witness": self.witness, "polynomial_ok": self.polynomial_ok}


def orbit_sum_check(L: RootLattice, w: LatticeAut, samples: int | None = None, seed: int = 0,
                 poly_trials: int = 200) -> IdentityReport:
    """1 - <b, a>_w = sum_{j: (w^j a, b) = -1} eps_w(w^j a, b) on eligible pairs.

    A pair is eligible when (w^j a, b) lies in {-1, 0, 1} for every j.
    """
    from .central_ext import cocycle_for_w
    from .epsilon import EpsilonChoice
    from .lattice import coinvariants
    d = w.order
    eps = EpsilonChoice("eps_w", L, w, cocycle_for_w(coinvariants(L, w)))
    P = Pairing(w)
    roots = L.roots
    arr = np.array(roots, dtype=np.int64)
    G = np.array(L.gram, dtype=np.int64)
    # ip[j][a, b] = (w^j r_a, r_b)
    perm = np.array(w.root_perm)
    ip0 = arr @ G @ arr.T
    ips = [ip0]
    cur = np.arange(len(roots))
    for _ in range(1, d):
        cur = perm[cur]
        ips.append(ip0[cur])
    stack = np.stack(ips)
    eligible = np.all(np.abs(stack) <= 1, axis=0)
    pairs = np.argwhere(eligible)
    total = len(pairs)
    if samples is not None and samples < total:
        rng = np.random.default_rng(seed)
        pairs = pairs[rng.choice(total, samples, replace=False)]
    pmat = np.array(P.matrix, dtype=np.int64)
    pw = (arr @ pmat @ arr.T) % d
    ids, values = eps.root_table
    one = CycNum.one(d)
    zeta = [CycNum.zeta(d, k) for k in range(d)]
    memo: dict = {}
    orbit_idx = [np.arange(len(roots))]
    for _ in range(1, d):
        orbit_idx.append(perm[orbit_idx[-1]])
    for a, b in pairs.tolist():
        js = [j for j in range(d) if stack[j, a, b] == -1]
        key = (int(pw[b, a]), tuple(sorted(int(ids[orbit_idx[j][a], b]) for j in js)))
        ok = memo.get(key)
        if ok is None:
            lhs = one - zeta[key[0]]
            rhs = CycNum.zero(d)
            for i in key[1]:
                rhs = rhs + values[i]
            ok = memo[key] = lhs == rhs
        if not ok:
            return IdentityReport(False, total, len(pairs), [list(roots[a]), list(roots[b])])
    poly_ok = polynomial_sum_identity(d, poly_trials, seed)
    return IdentityReport(poly_ok, total, len(pairs), None, poly_ok)


def polynomial_sum_identity(d: int, trials: int = 200, seed: int = 0, max_deg: int = 20) -> bool:
    """sum_{j<d} P(zeta^j) = d * sum_{i = 0 mod d} c_i for random integer P."""
    rng = random.Random(seed)
    for _ in range(trials):
        coeffs = [rng.randint(-9, 9) for _ in range(rng.randint(0, max_deg) + 1)]
        lhs = CycNum.zero(d)
        for j in range(d):
            z = CycNum.zeta(d, j)
            val = CycNum.zero(d)
            for cf in reversed(coeffs):
                val = val * z + cf
            lhs = lhs + val
        rhs = d * sum(cf for i, cf in enumerate(coeffs) if i % d == 0)
        if lhs != rhs:
            return False
    return True
