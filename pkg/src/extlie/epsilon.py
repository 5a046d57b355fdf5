"""Bilinear pairings epsilon and validation of input data.

Every supported epsilon has the shape

    eps(a, b) = zeta_d^{a^T Z b} * prod_g base_g^{a^T B_g b}

with integer matrices Z, B_g.  Values are cached by the exponent tuple, so a
full table over a root system needs only a handful of field operations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .central_ext import Cocycle, cocycle_for_w
from .cyclotomic import CycNum
from .lattice import CoinvariantGroup, LatticeAut, RootLattice, coinvariants
from .linalg import matmul, transpose

KINDS = ("eps_w", "trivial", "d3_variant", "odd_variant")


class EpsilonChoice:
    """One of the named epsilon pairings attached to (L, w, extension)."""

    def __init__(self, kind: str, lattice: RootLattice, w: LatticeAut, cocycle: Cocycle,
                 overrides: dict | None = None):
        if kind not in KINDS:
            raise ValueError(f"unknown epsilon kind {kind!r}")
        self.kind = kind
        self.lattice = lattice
        self.w = w
        self.cocycle = cocycle
        self.d = d = w.order
        self.overrides = dict(overrides or {})
        G = lattice.gram
        n = lattice.rank
        zero = [[0] * n for _ in range(n)]
        bases: list[CycNum] = []
        forms: list = []
        zeta_form = zero
        if kind == "eps_w":
            for j in range(1, d):
                bases.append(CycNum.one(d) - CycNum.zeta(d, -j))
                forms.append(matmul(transpose(w.powers[j]), G))  # (w^j a, b)
        elif kind == "d3_variant":
            bases.append(CycNum.rational(-1, d))
            forms.append(matmul(G, w.matrix))  # (a, w b)
            zeta_form = cocycle.commutator_matrix
        elif kind == "odd_variant":
            if d % 2 == 0:
                raise ValueError("odd_variant needs odd order")
            h = (d - 1) // 2
            s = [[0] * n for _ in range(n)]
            for j in range(1, h + 1):
                s = [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(s, w.powers[j])]
            bases.append(CycNum.rational(-1, d))
            forms.append(matmul(G, s))
            zeta_form = [[h * x for x in r] for r in cocycle.commutator_matrix]
        self.bases = tuple(bases)
        self.zeta_form = tuple(tuple(x % d for x in r) for r in zeta_form)
        self.forms = tuple(tuple(map(tuple, f)) for f in forms)
        self._cache: dict[tuple, CycNum] = {}

    # -- evaluation ----------------------------------------------------------

    def key(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        def form(m):
            return sum(a[i] * m[i][j] * b[j] for i in range(len(a)) if a[i]
                       for j in range(len(b)) if b[j])
        return (form(self.zeta_form) % self.d,) + tuple(form(f) for f in self.forms)

    def value(self, key: tuple[int, ...]) -> CycNum:
        v = self._cache.get(key)
        if v is None:
            v = CycNum.zeta(self.d, key[0])
            for base, k in zip(self.bases, key[1:]):
                if k:
                    v = v * base ** k
            self._cache[key] = v
        return v

    def __call__(self, a: Sequence[int], b: Sequence[int]) -> CycNum:
        if self.overrides:
            hit = self.overrides.get((tuple(a), tuple(b)))
            if hit is not None:
                return hit
        return self.value(self.key(a, b))

    # -- root tables -----------------------------------------------------------

    def key_arrays(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        """Exponent keys for all pairs, shape (len(left), len(right), nkeys)."""
        mats = [np.array(self.zeta_form, dtype=np.int64)] + [np.array(f, dtype=np.int64) for f in self.forms]
        out = np.stack([left @ m @ right.T for m in mats], axis=-1)
        out[..., 0] %= self.d
        return out

    @cached_property
    def root_table(self) -> tuple[np.ndarray, list[CycNum]]:
        """(ids, values): eps(root_i, root_j) == values[ids[i, j]]."""
        roots = np.array(self.lattice.roots, dtype=np.int64)
        keys = self.key_arrays(roots, roots)
        R = len(roots)
        flat = keys.reshape(R * R, -1)
        uniq, inv = np.unique(flat, axis=0, return_inverse=True)
        ids = inv.reshape(R, R).astype(np.int64)
        values = [self.value(tuple(int(x) for x in k)) for k in uniq]
        if self.overrides:
            idx = self.lattice.root_index
            for (a, b), v in sorted(self.overrides.items()):
                if a in idx and b in idx:
                    ids[idx[a], idx[b]] = len(values)
                    values.append(v)
        return ids, values

    def corrupted(self, pair=None) -> "EpsilonChoice":
        """Copy with one value negated (negative control).

        The default pair is the first pair of roots with (a, b) = -1; without
        one (type A1) it is (a, a) for the first root, which breaks w-invariance.
        """
        L = self.lattice
        if pair is None:
            pair = next(((a, b) for a in L.roots for b in L.roots if L.ip(a, b) == -1),
                        (L.roots[0], L.roots[0]))
        a, b = map(tuple, pair)
        over = dict(self.overrides)
        over[(a, b)] = -self(a, b)
        return EpsilonChoice(self.kind, self.lattice, self.w, self.cocycle, over)


# ---------------------------------------------------------------------------
# input data


@dataclass
class InputDatum:
    lattice: RootLattice
    w: LatticeAut
    group: CoinvariantGroup
    cocycle: Cocycle
    epsilon: EpsilonChoice
    name: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return self.w.order


def make_datum(lattice: RootLattice, w: LatticeAut, epsilon: str = "eps_w",
               cocycle: Cocycle | None = None, name: str = "") -> InputDatum:
    """Datum with the SNF cocycle for <., .>_w unless a cocycle is supplied."""
    group = coinvariants(lattice, w)
    if cocycle is None:
        cocycle = cocycle_for_w(group)
    eps = EpsilonChoice(epsilon, lattice, w, cocycle)
    return InputDatum(lattice, w, group, cocycle, eps, name=name)


@dataclass
class ValidationReport:
    property1: bool
    property2: bool
    counterexamples: list
    pairs_checked: int

    @property
    def ok(self) -> bool:
        return self.property1 and self.property2

    def to_json(self) -> dict:
        return {"property1": self.property1, "property2": self.property2,
                "counterexamples": self.counterexamples, "pairs_checked": self.pairs_checked}


def validate_input_datum(L: RootLattice, w: LatticeAut, cocycle: Cocycle,
                         choice: EpsilonChoice, max_witnesses: int = 5) -> ValidationReport:
    """Check both input-datum properties exhaustively over root pairs.

    1. eps(a, b) / eps(b, a) = -<b, a> whenever (a, b) = -1;
    2. eps(wa, wb) = eps(a, b).
    <., .> is the commutator pairing of the supplied extension.
    """
    roots = L.roots
    R = len(roots)
    arr = np.array(roots, dtype=np.int64)
    ids, values = choice.root_table
    gram = arr @ np.array(L.gram, dtype=np.int64) @ arr.T
    comm = (arr @ np.array(cocycle.commutator_matrix, dtype=np.int64) @ arr.T) % cocycle.d
    d = cocycle.d
    zeta_pows = [CycNum.zeta(d, k) for k in range(d)]
    witnesses: list = []

    p1 = True
    memo: dict = {}
    ii, jj = np.nonzero(gram == -1)
    for i, j in zip(ii.tolist(), jj.tolist()):
        key = (int(ids[i, j]), int(ids[j, i]), int(comm[j, i]))
        ok = memo.get(key)
        if ok is None:
            ok = values[key[0]] == -(zeta_pows[key[2]] * values[key[1]])
            memo[key] = ok
        if not ok:
            p1 = False
            if len(witnesses) < max_witnesses:
                witnesses.append({"property": 1, "alpha": list(roots[i]), "beta": list(roots[j])})

    p2 = True
    perm = np.array(w.root_perm, dtype=np.int64)
    moved = ids[np.ix_(perm, perm)]
    ii, jj = np.nonzero(moved != ids)
    for i, j in zip(ii.tolist(), jj.tolist()):
        if values[moved[i, j]] != values[ids[i, j]]:
            p2 = False
            if len(witnesses) < max_witnesses:
                witnesses.append({"property": 2, "alpha": list(roots[i]), "beta": list(roots[j])})
    return ValidationReport(p1, p2, witnesses, R * R)
