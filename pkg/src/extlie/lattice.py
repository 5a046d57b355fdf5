"""Simply laced root lattices, their automorphisms, coinvariants and pairings.

Vectors are integer tuples in the simple-root basis.  Simple roots use
Bourbaki numbering (1-based in public APIs): for E the branch node 2 hangs off
node 4, for D the last node hangs off node l-2.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence

from .errors import (IndexOutOfRange, NotCoxeterWord, NotDiagramAutomorphism,
                     NotElliptic, UnknownType)
from .linalg import (identity, int_det, int_inverse_unimodular, matmul, matvec,
                     rref, smith_normal_form, transpose)

Vec = tuple[int, ...]
Mat = tuple[tuple[int, ...], ...]

_LABEL = re.compile(r"^([ADE])(\d+)$")


def _edges(kind: str, rank: int) -> list[tuple[int, int]]:
    if kind == "A":
        if rank < 1:
            raise UnknownType(f"A{rank}")
        return [(i, i + 1) for i in range(rank - 1)]
    if kind == "D":
        if rank < 4:
            raise UnknownType(f"D{rank}")
        return [(i, i + 1) for i in range(rank - 2)] + [(rank - 3, rank - 1)]
    if kind == "E":
        if rank not in (6, 7, 8):
            raise UnknownType(f"E{rank}")
        # 1-3-4-5-...-rank with 2 attached to 4 (0-based below)
        chain = [0, 2] + list(range(3, rank))
        return list(zip(chain, chain[1:])) + [(1, 3)]
    raise UnknownType(kind)


def cartan_matrix(label: str) -> Mat:
    m = _LABEL.match(label.strip())
    if not m:
        raise UnknownType(label)
    kind, rank = m.group(1), int(m.group(2))
    g = [[2 * (i == j) for j in range(rank)] for i in range(rank)]
    for i, j in _edges(kind, rank):
        g[i][j] = g[j][i] = -1
    return tuple(map(tuple, g))


def _block_diag(blocks: Sequence[Mat]) -> Mat:
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[off + i][off + j] = x
        off += len(b)
    return tuple(map(tuple, out))


def mat_order(m: Sequence[Sequence[int]], limit: int = 10_000) -> int:
    n = len(m)
    ident = [list(r) for r in identity(n)]
    p = [list(r) for r in m]
    for k in range(1, limit + 1):
        if p == ident:
            return k
        p = matmul(p, m)
    raise ValueError("matrix order exceeds limit")


class RootLattice:
    """Gram matrix plus the sorted list of roots (norm-2 vectors)."""

    def __init__(self, type_label: str, gram: Mat):
        self.type_label = type_label
        self.gram = gram
        self.rank = len(gram)
        self.roots: list[Vec] = self._enumerate_roots()
        self.root_index: dict[Vec, int] = {r: i for i, r in enumerate(self.roots)}

    def ip(self, a: Sequence[int], b: Sequence[int]) -> int:
        g = self.gram
        return sum(a[i] * g[i][j] * b[j] for i in range(self.rank) if a[i]
                   for j in range(self.rank) if b[j])

    def gram_vec(self, v: Sequence[int]) -> Vec:
        return tuple(matvec(self.gram, v))

    def simple_root(self, i: int) -> Vec:
        return tuple(int(k == i) for k in range(self.rank))

    def reflect(self, i: int, v: Sequence[int]) -> Vec:
        c = sum(self.gram[i][k] * v[k] for k in range(self.rank))
        out = list(v)
        out[i] -= c
        return tuple(out)

    def _enumerate_roots(self) -> list[Vec]:
        seen = {self.simple_root(i) for i in range(self.rank)}
        frontier = list(seen)
        while frontier:
            nxt = []
            for v in frontier:
                for i in range(self.rank):
                    r = self.reflect(i, v)
                    if r not in seen:
                        seen.add(r)
                        nxt.append(r)
            frontier = nxt
        return sorted(seen)

    def is_root(self, v: Sequence[int]) -> bool:
        return tuple(v) in self.root_index

    @cached_property
    def positive_roots(self) -> list[Vec]:
        return [r for r in self.roots if any(r) and min(r) >= 0]

    def __repr__(self):
        return f"RootLattice({self.type_label!r}, roots={len(self.roots)})"


def build_lattice(type_label: str) -> RootLattice:
    """Root lattice for an ADE label such as ``"E8"`` or a sum ``"A2+A1"``."""
    parts = [p.strip() for p in type_label.split("+")]
    if not parts or not all(parts):
        raise UnknownType(type_label)
    gram = _block_diag([cartan_matrix(p) for p in parts])
    return RootLattice("+".join(parts), gram)


class LatticeAut:
    """Integer matrix acting on the simple-root basis (columns = images)."""

    def __init__(self, lattice: RootLattice, matrix: Sequence[Sequence[int]]):
        self.lattice = lattice
        self.matrix: Mat = tuple(tuple(int(x) for x in r) for r in matrix)
        n = lattice.rank
        if len(self.matrix) != n or any(len(r) != n for r in self.matrix):
            raise ValueError("automorphism matrix has wrong shape")
        g = lattice.gram
        if matmul(transpose(self.matrix), matmul(g, self.matrix)) != [list(r) for r in g]:
            raise ValueError("matrix does not preserve the Gram form")
        self.order = mat_order(self.matrix)
        self.elliptic = self.det_one_minus() != 0

    def apply(self, v: Sequence[int]) -> Vec:
        return tuple(matvec(self.matrix, v))

    def one_minus(self) -> list[list[int]]:
        n = self.lattice.rank
        return [[int(i == j) - self.matrix[i][j] for j in range(n)] for i in range(n)]

    def det_one_minus(self) -> int:
        return int_det(self.one_minus())

    def power(self, e: int) -> "LatticeAut":
        e %= self.order
        m = identity(self.lattice.rank)
        for _ in range(e):
            m = matmul(self.matrix, m)
        return LatticeAut(self.lattice, m)

    def compose(self, other: "LatticeAut") -> "LatticeAut":
        return LatticeAut(self.lattice, matmul(self.matrix, other.matrix))

    def inverse(self) -> "LatticeAut":
        return self.power(self.order - 1)

    @cached_property
    def powers(self) -> list[Mat]:
        out = [tuple(map(tuple, identity(self.lattice.rank)))]
        for _ in range(self.order - 1):
            out.append(tuple(map(tuple, matmul(self.matrix, out[-1]))))
        return out

    @cached_property
    def root_perm(self) -> tuple[int, ...]:
        """Index permutation of the root list induced by w."""
        idx = self.lattice.root_index
        return tuple(idx[self.apply(r)] for r in self.lattice.roots)

    @cached_property
    def minimal_polynomial(self) -> tuple[int, ...]:
        return minimal_polynomial(self.matrix)

    def __eq__(self, other):
        return isinstance(other, LatticeAut) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        return f"LatticeAut(order={self.order}, elliptic={self.elliptic})"


def _check_indices(L: RootLattice, word: Iterable[int]) -> list[int]:
    out = []
    for i in word:
        if not isinstance(i, int) or not 1 <= i <= L.rank:
            raise IndexOutOfRange(f"simple root index {i!r} outside 1..{L.rank}")
        out.append(i - 1)
    return out


def reflection_matrix(L: RootLattice, i: int) -> list[list[int]]:
    """Matrix of the simple reflection s_i (0-based i)."""
    n = L.rank
    m = [list(r) for r in identity(n)]
    for k in range(n):
        m[i][k] -= L.gram[i][k]
    return m


def aut_from_reflection_word(L: RootLattice, word: Sequence[int]) -> LatticeAut:
    """Product s_{i1} s_{i2} ... s_{ik}; the rightmost factor acts first."""
    m = identity(L.rank)
    for i in _check_indices(L, word):
        m = matmul(m, reflection_matrix(L, i))
    return LatticeAut(L, m)


def minus_identity(L: RootLattice) -> LatticeAut:
    return LatticeAut(L, [[-x for x in r] for r in identity(L.rank)])


def diagram_automorphism(L: RootLattice, perm: Sequence[int]) -> LatticeAut:
    """Lattice map alpha_i -> alpha_{perm[i]} (1-based permutation list)."""
    p = _check_indices(L, perm)
    if sorted(p) != list(range(L.rank)):
        raise NotDiagramAutomorphism("not a permutation of the simple roots")
    g = L.gram
    if any(g[p[i]][p[j]] != g[i][j] for i in range(L.rank) for j in range(L.rank)):
        raise NotDiagramAutomorphism(f"{list(perm)} does not preserve the Dynkin diagram")
    m = [[0] * L.rank for _ in range(L.rank)]
    for i, j in enumerate(p):
        m[j][i] = 1
    return LatticeAut(L, m)


def coxeter_power(L: RootLattice, word: Sequence[int], e: int) -> LatticeAut:
    if sorted(word) != list(range(1, L.rank + 1)):
        raise NotCoxeterWord(f"{list(word)} is not a product of all simple reflections")
    return aut_from_reflection_word(L, word).power(e)


def aut_special(L: RootLattice, kind: str, *, perm=None, word=None, power=1,
                rows=None) -> LatticeAut:
    if kind == "matrix":
        return LatticeAut(L, rows)
    if kind == "word":
        return aut_from_reflection_word(L, word)
    if kind == "minus_identity":
        return minus_identity(L)
    if kind == "diagram":
        return diagram_automorphism(L, perm)
    if kind == "coxeter_power":
        return coxeter_power(L, word, power)
    raise ValueError(f"unknown automorphism kind {kind!r}")


# ---------------------------------------------------------------------------
# minimal polynomial


def minimal_polynomial(m: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Monic integer minimal polynomial, coefficients low degree first.

    Found as the first linear dependency among I, m, m^2, ...; the result is
    checked by evaluating it at m.
    """
    n = len(m)
    powers = [identity(n)]
    flat = [[Fraction(x) for r in powers[0] for x in r]]
    while True:
        nxt = matmul(m, powers[-1])
        target = [Fraction(x) for r in nxt for x in r]
        k = len(powers)
        # solve sum_i c_i flat[i] = target
        cols = [[flat[i][j] for i in range(k)] + [target[j]] for j in range(n * n)]
        red, piv = rref(cols, k + 1)
        if k not in piv:
            sol = [Fraction(0)] * k
            for row, p in zip(red, piv):
                sol[p] = row[k]
            coeffs = [-c for c in sol] + [Fraction(1)]
            if any(c.denominator != 1 for c in coeffs):
                raise ArithmeticError("minimal polynomial is not integral")
            poly = tuple(int(c) for c in coeffs)
            _assert_annihilates(poly, m)
            return poly
        powers.append(nxt)
        flat.append(target)


def _assert_annihilates(poly: Sequence[int], m: Sequence[Sequence[int]]) -> None:
    n = len(m)
    acc = [[0] * n for _ in range(n)]
    p = identity(n)
    for c in poly:
        acc = [[a + c * b for a, b in zip(ra, rb)] for ra, rb in zip(acc, p)]
        p = matmul(m, p)
    if any(any(r) for r in acc):
        raise ArithmeticError("minimal polynomial does not annihilate the matrix")


def poly_eval_matrix(poly: Sequence[int], m: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(m)
    acc = [[0] * n for _ in range(n)]
    for c in reversed(poly):  # Horner
        acc = matmul(m, acc)
        for i in range(n):
            acc[i][i] += c
    return acc


def pairing_data(w: LatticeAut) -> tuple[int, int, list[list[int]]]:
    """Return (m, d0, M0(w)) for the pairing <.,.>_w.

    M is the minimal polynomial, m = M(1), d0 = d/m and
    M0(t) = (M(t) - M(1))/(t - 1).
    """
    if not w.elliptic:
        raise NotElliptic("pairing requires an elliptic automorphism")
    M = list(w.minimal_polynomial)
    m = sum(M)
    d = w.order
    if m <= 0 or d % m:
        raise ArithmeticError(f"M(1) = {m} does not divide the order {d}")
    # synthetic division of M(t) - m by (t - 1)
    num = M[:]
    num[0] -= m
    q = [0] * (len(num) - 1)
    carry = 0
    for k in range(len(num) - 1, 0, -1):
        carry = num[k] + carry
        q[k - 1] = carry
    assert num[0] + carry == 0
    return m, d // m, poly_eval_matrix(q, w.matrix)


# ---------------------------------------------------------------------------
# coinvariants


class CoinvariantGroup:
    """The finite group Lambda/(1-w)Lambda in Smith normal form coordinates."""

    def __init__(self, lattice: RootLattice, w: LatticeAut):
        if not w.elliptic:
            raise NotElliptic("coinvariants of a non-elliptic automorphism are infinite")
        self.lattice = lattice
        self.w = w
        A = w.one_minus()
        U, D, V = smith_normal_form(A)
        self.snf = (U, D, V)
        n = lattice.rank
        diag = [D[i][i] for i in range(n)]
        keep = [i for i in range(n) if diag[i] != 1]
        self.invariant_factors: tuple[int, ...] = tuple(diag[i] for i in keep)
        self._proj_rows = [U[i] for i in keep]
        Uinv = int_inverse_unimodular(U)
        self._lift_cols = [[Uinv[r][i] for r in range(n)] for i in keep]

    @property
    def order(self) -> int:
        out = 1
        for x in self.invariant_factors:
            out *= x
        return out

    @property
    def ngens(self) -> int:
        return len(self.invariant_factors)

    def project(self, v: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(a * b for a, b in zip(row, v)) % d
                     for row, d in zip(self._proj_rows, self.invariant_factors))

    def lift(self, cls: Sequence[int]) -> Vec:
        n = self.lattice.rank
        out = [0] * n
        for r, col, d in zip(cls, self._lift_cols, self.invariant_factors):
            r %= d
            for i in range(n):
                out[i] += r * col[i]
        return tuple(out)

    def generator(self, i: int) -> tuple[int, ...]:
        return tuple(int(k == i) for k in range(self.ngens))

    def add(self, a, b) -> tuple[int, ...]:
        return tuple((x + y) % d for x, y, d in zip(a, b, self.invariant_factors))

    def neg(self, a) -> tuple[int, ...]:
        return tuple(-x % d for x, d in zip(a, self.invariant_factors))

    def scale(self, k: int, a) -> tuple[int, ...]:
        return tuple(k * x % d for x, d in zip(a, self.invariant_factors))

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * self.ngens

    def elements(self) -> list[tuple[int, ...]]:
        """All classes in lexicographic order."""
        out = [()]
        for d in self.invariant_factors:
            out = [c + (r,) for c in out for r in range(d)]
        return out

    def __repr__(self):
        return f"CoinvariantGroup({list(self.invariant_factors)})"


def coinvariants(L: RootLattice, w: LatticeAut) -> CoinvariantGroup:
    return CoinvariantGroup(L, w)


# ---------------------------------------------------------------------------
# pairings


class Pairing:
    """Exponent form of <a, b>_w = zeta_d^{e(a, b)} as an integer matrix.

    e(a, b) = d0 * a^T G M0(w) b  (mod d).
    """

    def __init__(self, w: LatticeAut):
        L = w.lattice
        self.w = w
        self.d = w.order
        self.m, self.d0, m0 = pairing_data(w)
        gm = matmul(L.gram, m0)
        self.matrix = tuple(tuple(self.d0 * x % self.d for x in r) for r in gm)

    def __call__(self, a: Sequence[int], b: Sequence[int]) -> int:
        return sum(a[i] * self.matrix[i][j] * b[j] for i in range(len(a)) if a[i]
                   for j in range(len(b)) if b[j]) % self.d


def pairing_w(L: RootLattice, w: LatticeAut, a: Sequence[int], b: Sequence[int]) -> int:
    m, d0, m0 = pairing_data(w)
    return d0 * L.ip(a, matvec(m0, b)) % w.order


def lepowsky_matrix(w: LatticeAut) -> tuple[tuple[int, ...], ...]:
    """Integer matrix C with C(a, b) = a^T C b = sum_j j (w^j a, b) mod d."""
    L = w.lattice
    d = w.order
    n = L.rank
    acc = [[0] * n for _ in range(n)]
    for j in range(1, d):
        # (w^j a, b) = a^T (w^j)^T G b
        t = matmul(transpose(w.powers[j]), L.gram)
        acc = [[x + j * y for x, y in zip(ra, rb)] for ra, rb in zip(acc, t)]
    return tuple(tuple(x % d for x in r) for r in acc)


def pairing_lepowsky(L: RootLattice, w: LatticeAut, a: Sequence[int], b: Sequence[int]) -> int:
    d = w.order
    return sum(j * L.ip(matvec(w.powers[j], a), b) for j in range(1, d)) % d


def is_trivial_pairing(w: LatticeAut) -> bool:
    p = Pairing(w)
    return all(x == 0 for r in p.matrix for x in r)


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def pairing_equality(w: LatticeAut):
    """Compare the two pairing formulas on every root pair.

    Returns ``(ok, pairs_checked, witness)``.  The Lepowsky side is summed
    over the powers of w directly rather than through ``lepowsky_matrix``.
    """
    import numpy as np
    L = w.lattice
    d = w.order
    arr = np.array(L.roots, dtype=np.int64)
    G = np.array(L.gram, dtype=np.int64)
    left = (arr @ np.array(Pairing(w).matrix, dtype=np.int64) @ arr.T) % d
    right = np.zeros_like(left)
    for j in range(1, d):
        wa = arr @ np.array(w.powers[j], dtype=np.int64).T
        right += j * (wa @ G @ arr.T)
    right %= d
    bad = np.argwhere(left != right)
    witness = None
    if len(bad):
        i, k = bad[0]
        witness = [list(L.roots[i]), list(L.roots[k])]
    return witness is None, left.size, witness
