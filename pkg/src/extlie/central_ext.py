"""Central extensions of coinvariant groups by <zeta>, presented by cocycles.

Group elements are pairs (e, a) standing for zeta^e times the section of the
class a.  The cocycle is bilinear in residue coordinates, so everything is
integer arithmetic mod d.
"""
from __future__ import annotations

from typing import Callable, NamedTuple, Sequence

from .errors import PairingNotAlternating, SumNotRootOrZero
from .lattice import CoinvariantGroup, LatticeAut, Pairing
from .linalg import matmul, transpose

Cls = tuple[int, ...]


class ExtElement(NamedTuple):
    zeta_exp: int
    cls: Cls


class ExtendedRoot(NamedTuple):
    zeta_exp: int
    root: tuple[int, ...]


class Cocycle:
    """Bilinear cocycle c(a, b) = sum_ij a_i b_j table[i][j] (mod d)."""

    def __init__(self, group: CoinvariantGroup, d: int, table: Sequence[Sequence[int]]):
        self.group = group
        self.d = d
        self.table = tuple(tuple(int(x) % d for x in r) for r in table)
        proj = group._proj_rows
        # the same form pulled back to lattice coordinates
        self.lattice_matrix = tuple(
            tuple(x % d for x in r)
            for r in matmul(transpose(proj), matmul(self.table, proj))
        ) if proj else tuple((0,) * group.lattice.rank for _ in range(group.lattice.rank))
        self.commutator_matrix = tuple(
            tuple((self.lattice_matrix[i][j] - self.lattice_matrix[j][i]) % d
                  for j in range(group.lattice.rank))
            for i in range(group.lattice.rank))

    def __call__(self, a: Sequence[int], b: Sequence[int]) -> int:
        t = self.table
        return sum(a[i] * t[i][j] * b[j] for i in range(len(a)) if a[i]
                   for j in range(len(b)) if b[j]) % self.d

    def on_lattice(self, a: Sequence[int], b: Sequence[int]) -> int:
        m = self.lattice_matrix
        n = len(a)
        return sum(a[i] * m[i][j] * b[j] for i in range(n) if a[i]
                   for j in range(n) if b[j]) % self.d

    def commutator(self, a: Sequence[int], b: Sequence[int]) -> int:
        """Exponent of the commutator pairing <a, b> on classes."""
        return (self(a, b) - self(b, a)) % self.d

    def commutator_on_lattice(self, a: Sequence[int], b: Sequence[int]) -> int:
        m = self.commutator_matrix
        n = len(a)
        return sum(a[i] * m[i][j] * b[j] for i in range(n) if a[i]
                   for j in range(n) if b[j]) % self.d

    @property
    def is_trivial(self) -> bool:
        return not any(any(r) for r in self.table)

    def to_json(self) -> dict:
        return {
            "modulus": self.d,
            "invariant_factors": list(self.group.invariant_factors),
            "table": [list(r) for r in self.table],
        }


def class_pairing(group: CoinvariantGroup, pairing: Pairing) -> Callable[[Cls, Cls], int]:
    """Pairing on classes, evaluated through the SNF lift."""
    return lambda a, b: pairing(group.lift(a), group.lift(b))


def build_cocycle(group: CoinvariantGroup, pairing: Callable[[Cls, Cls], int] | None,
                  d: int | None = None) -> Cocycle:
    """Upper triangular cocycle on the SNF generators realising ``pairing``.

    ``pairing`` maps two classes to an exponent mod d; ``None`` means trivial.
    """
    d = group.w.order if d is None else d
    k = group.ngens
    gens = [group.generator(i) for i in range(k)]
    if pairing is None:
        q = [[0] * k for _ in range(k)]
    else:
        q = [[pairing(gens[i], gens[j]) % d for j in range(k)] for i in range(k)]
    for i in range(k):
        if q[i][i]:
            raise PairingNotAlternating(f"<x{i}, x{i}> = zeta^{q[i][i]}")
        for j in range(k):
            if (q[i][j] + q[j][i]) % d:
                raise PairingNotAlternating(f"pairing not skew on generators {i}, {j}")
            di = group.invariant_factors[i]
            if di * q[i][j] % d:
                raise PairingNotAlternating(f"pairing not defined on classes (generator {i})")
    table = [[q[i][j] if i < j else 0 for j in range(k)] for i in range(k)]
    return Cocycle(group, d, table)


def cocycle_for_w(group: CoinvariantGroup) -> Cocycle:
    """Cocycle whose commutator is <., .>_w."""
    return build_cocycle(group, class_pairing(group, Pairing(group.w)))


def check_commutator(c: Cocycle, pairing: Callable[[Cls, Cls], int],
                     limit: int = 5 ** 4, samples: int = 10_000, seed: int = 0) -> tuple[bool, object]:
    """Compare c(a,b) - c(b,a) with ``pairing``; exhaustive up to ``limit`` classes."""
    import random
    G = c.group
    if G.order <= limit:
        elems = G.elements()
        pairs = ((a, b) for a in elems for b in elems)
    else:
        rng = random.Random(seed)
        def rand():
            return tuple(rng.randrange(x) for x in G.invariant_factors)
        pairs = ((rand(), rand()) for _ in range(samples))
    for a, b in pairs:
        if c.commutator(a, b) != pairing(a, b) % c.d:
            return False, (a, b)
    return True, None


# ---------------------------------------------------------------------------
# group law


def ext_mul(c: Cocycle, a: ExtElement, b: ExtElement) -> ExtElement:
    G = c.group
    return ExtElement((a.zeta_exp + b.zeta_exp + c(a.cls, b.cls)) % c.d, G.add(a.cls, b.cls))


def ext_inv(c: Cocycle, a: ExtElement) -> ExtElement:
    G = c.group
    na = G.neg(a.cls)
    c00 = c(G.zero, G.zero)
    assert c00 == 0, "bilinear cocycle must vanish at (0, 0)"
    return ExtElement((-a.zeta_exp - c(na, a.cls) - c00) % c.d, na)


def ext_identity(c: Cocycle) -> ExtElement:
    return ExtElement(0, c.group.zero)


def ext_pow(c: Cocycle, a: ExtElement, k: int) -> ExtElement:
    if k < 0:
        a, k = ext_inv(c, a), -k
    out = ext_identity(c)
    for _ in range(k):
        out = ext_mul(c, out, a)
    return out


def ext_commutator(c: Cocycle, a: ExtElement, b: ExtElement) -> ExtElement:
    return ext_mul(c, ext_mul(c, a, b), ext_mul(c, ext_inv(c, a), ext_inv(c, b)))


# ---------------------------------------------------------------------------
# pulled-back extension over the lattice


def tilde_lift(root: Sequence[int]) -> ExtendedRoot:
    return ExtendedRoot(0, tuple(root))


def tilde_mul(c: Cocycle, a: ExtendedRoot, b: ExtendedRoot, typed: bool = True):
    """Product in the pulled-back extension.

    With ``typed`` the sum must be a root or zero; a zero sum returns the
    bare zeta exponent.  Otherwise the raw pair (e, vector) is returned.
    """
    e = (a.zeta_exp + b.zeta_exp + c.on_lattice(a.root, b.root)) % c.d
    s = tuple(x + y for x, y in zip(a.root, b.root))
    if not typed:
        return e, s
    if not any(s):
        return e
    if not c.group.lattice.is_root(s):
        raise SumNotRootOrZero(f"{a.root} + {b.root} is not a root")
    return ExtendedRoot(e, s)


def tilde_project(c: Cocycle, a: ExtendedRoot) -> ExtElement:
    return ExtElement(a.zeta_exp, c.group.project(a.root))


def w_act(w: LatticeAut, a: ExtendedRoot) -> ExtendedRoot:
    """w fixes the extension and acts on the lattice coordinate."""
    return ExtendedRoot(a.zeta_exp, w.apply(a.root))


def w_action_is_automorphism(c: Cocycle, w: LatticeAut) -> bool:
    """(e, a) -> (e, wa) respects the group law iff c is w-invariant."""
    n = c.group.lattice.rank
    m = c.lattice_matrix
    wm = w.matrix
    pulled = matmul(transpose(wm), matmul(m, wm))
    return all((pulled[i][j] - m[i][j]) % c.d == 0 for i in range(n) for j in range(n))
