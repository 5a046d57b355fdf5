"""Exact arithmetic in cyclotomic fields Q(zeta_n).

Elements are stored as coefficient vectors in the power basis
``1, zeta, ..., zeta^(phi(n)-1)`` after reduction modulo the n-th cyclotomic
polynomial, so equality at a fixed order is coefficientwise.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Optional, Sequence, Union

__all__ = [
    "CycNum",
    "DivisionByZero",
    "NotCoprime",
    "cyclotomic_polynomial",
    "cyc_root_of_unity",
    "cyc_arith",
    "cyc_as_root_of_unity",
    "cyc_galois",
    "lcm",
]

Scalar = Union[int, Fraction]


class DivisionByZero(ZeroDivisionError):
    pass


class NotCoprime(ValueError):
    pass


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def _poly_divmod_int(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    # den is monic; coefficient lists are low-to-high
    num = list(num)
    dd = len(den) - 1
    if len(num) - 1 < dd:
        return [0], num
    quot = [0] * (len(num) - dd)
    for k in range(len(num) - 1, dd - 1, -1):
        c = num[k]
        if c:
            quot[k - dd] = c
            for i, dc in enumerate(den):
                num[k - dd + i] -= c * dc
    rem = num[:dd] or [0]
    return quot, rem


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (low to high) of the n-th cyclotomic polynomial."""
    if n < 1:
        raise ValueError("order must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod_int(poly, list(cyclotomic_polynomial(d)))
            assert not any(rem), "non-exact cyclotomic division"
    return tuple(poly)


class _Field:
    """Per-order tables: degree, power table of zeta, trace vector."""

    __slots__ = ("n", "phi", "poly", "powers", "power_index", "traces")

    def __init__(self, n: int):
        self.n = n
        self.poly = cyclotomic_polynomial(n)
        self.phi = len(self.poly) - 1
        phi = self.phi
        powers = []
        cur = [0] * phi
        cur[0] = 1
        for _ in range(n):
            powers.append(tuple(cur))
            # multiply by zeta and reduce the overflow coefficient
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                for i in range(phi):
                    cur[i] -= top * self.poly[i]
        self.powers = tuple(powers)
        self.power_index = {p: k for k, p in enumerate(powers)}
        # Tr(zeta^k) for the basis powers, used for order-independent hashing
        self.traces = tuple(_trace_of_power(n, k) for k in range(phi))


def _mobius(n: int) -> int:
    res, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            res = -res
        p += 1
    if n > 1:
        res = -res
    return res


def _euler_phi(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if gcd(k, n) == 1)


def _trace_of_power(n: int, k: int) -> int:
    g = gcd(n, k)
    m = n // g
    return _mobius(m) * _euler_phi(n) // _euler_phi(m)


@lru_cache(maxsize=None)
def _field(n: int) -> _Field:
    return _Field(n)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


class CycNum:
    """An element of Q(zeta_n), immutable."""

    __slots__ = ("order", "coeffs", "_hash")

    def __init__(self, order: int, coeffs: Sequence[Scalar]):
        if order < 1:
            raise ValueError("order must be positive")
        fd = _field(order)
        cs = tuple(_as_fraction(c) for c in coeffs)
        if len(cs) != fd.phi:
            raise ValueError(f"expected {fd.phi} coefficients for order {order}, got {len(cs)}")
        self.order = order
        self.coeffs = cs
        self._hash = None

    # -- construction ------------------------------------------------------
    @classmethod
    def _raw(cls, order: int, coeffs: tuple) -> "CycNum":
        obj = object.__new__(cls)
        obj.order = order
        obj.coeffs = coeffs
        obj._hash = None
        return obj

    @classmethod
    def rational(cls, q: Scalar, order: int = 1) -> "CycNum":
        phi = _field(order).phi
        return cls._raw(order, (_as_fraction(q),) + (Fraction(0),) * (phi - 1))

    @classmethod
    def zero(cls, order: int = 1) -> "CycNum":
        return cls.rational(0, order)

    @classmethod
    def one(cls, order: int = 1) -> "CycNum":
        return cls.rational(1, order)

    @classmethod
    def zeta(cls, n: int, k: int = 1) -> "CycNum":
        fd = _field(n)
        return cls._raw(n, tuple(Fraction(c) for c in fd.powers[k % n]))

    @classmethod
    def from_poly(cls, order: int, poly: Sequence[Scalar]) -> "CycNum":
        """Reduce an arbitrary polynomial in zeta_order."""
        fd = _field(order)
        out = [Fraction(0)] * fd.phi
        for k, c in enumerate(poly):
            if c:
                c = _as_fraction(c)
                for i, p in enumerate(fd.powers[k % order]):
                    if p:
                        out[i] += c * p
        return cls._raw(order, tuple(out))

    # -- order handling ----------------------------------------------------
    def at_order(self, m: int) -> "CycNum":
        """Re-express at order ``m``; ``m`` must be a multiple or a divisor of the order."""
        n = self.order
        if m == n:
            return self
        if m % n == 0:
            step = m // n
            fd = _field(m)
            out = [Fraction(0)] * fd.phi
            for k, c in enumerate(self.coeffs):
                if c:
                    for i, p in enumerate(fd.powers[(k * step) % m]):
                        if p:
                            out[i] += c * p
            return CycNum._raw(m, tuple(out))
        if n % m == 0:
            return _project(self, m)
        raise ValueError(f"order {m} is not comparable with {n}")

    def minimal_order(self) -> "CycNum":
        """Smallest-order representation of the same field element."""
        n = self.order
        for m in range(1, n + 1):
            if n % m == 0:
                try:
                    return _project(self, m)
                except ValueError:
                    continue
        return self

    # -- predicates --------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coeffs[0]

    def is_integer(self) -> bool:
        return self.is_rational() and self.coeffs[0].denominator == 1

    # -- arithmetic --------------------------------------------------------
    def _coerce(self, other) -> tuple["CycNum", "CycNum"]:
        if isinstance(other, CycNum):
            if other.order == self.order:
                return self, other
            m = lcm(self.order, other.order)
            return self.at_order(m), other.at_order(m)
        if isinstance(other, (int, Fraction)):
            return self, CycNum.rational(other, self.order)
        return NotImplemented, NotImplemented

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            cs = list(self.coeffs)
            cs[0] += other
            return CycNum._raw(self.order, tuple(cs))
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return CycNum._raw(a.order, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycNum._raw(self.order, tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            return self + (-other)
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return CycNum._raw(a.order, tuple(x - y for x, y in zip(a.coeffs, b.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 1:
                return self
            return CycNum._raw(self.order, tuple(x * other for x in self.coeffs))
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return _mul(a, b)

    __rmul__ = __mul__

    def inverse(self) -> "CycNum":
        if self.is_zero():
            raise DivisionByZero("inverse of zero in a cyclotomic field")
        if self.is_rational():
            return CycNum.rational(1 / self.coeffs[0], self.order)
        return _inverse(self)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZero("division by zero")
            return CycNum._raw(self.order, tuple(x / other for x in self.coeffs))
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return _mul(a, b.inverse())

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = CycNum.one(self.order)
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def galois(self, s: int) -> "CycNum":
        """Image under the automorphism zeta -> zeta^s."""
        n = self.order
        if gcd(s, n) != 1:
            raise NotCoprime(f"{s} is not coprime to {n}")
        fd = _field(n)
        out = [Fraction(0)] * fd.phi
        for k, c in enumerate(self.coeffs):
            if c:
                for i, p in enumerate(fd.powers[(k * s) % n]):
                    if p:
                        out[i] += c * p
        return CycNum._raw(n, tuple(out))

    def conjugate(self) -> "CycNum":
        return self.galois(-1)

    def root_of_unity_exponent(self) -> Optional[int]:
        """k with self == zeta_n^k, or None."""
        return _field(self.order).power_index.get(tuple(self.coeffs))

    def trace(self) -> Fraction:
        fd = _field(self.order)
        return sum((c * t for c, t in zip(self.coeffs, fd.traces)), Fraction(0))

    def norm(self) -> Fraction:
        n = self.order
        result = CycNum.one(n)
        for s in range(1, n):
            if gcd(s, n) == 1:
                result = result * self.galois(s)
        return result.rational_value()

    # -- comparison / hashing ---------------------------------------------
    def __eq__(self, other):
        if isinstance(other, CycNum):
            if other.order == self.order:
                return self.coeffs == other.coeffs
            a, b = self._coerce(other)
            return a.coeffs == b.coeffs
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        return NotImplemented

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                h = hash(self.coeffs[0])
            else:
                # normalized trace is invariant under change of order
                fd = _field(self.order)
                h = hash(("cyc", self.trace() / fd.phi))
            self._hash = h
        return self._hash

    # -- conversion --------------------------------------------------------
    def to_complex(self) -> complex:
        import cmath

        z = cmath.exp(2j * cmath.pi / self.order)
        return sum(float(c) * z**k for k, c in enumerate(self.coeffs))

    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> "CycNum":
        return cls(int(obj["order"]), [Fraction(c) for c in obj["coeffs"]])

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(str(c) if k == 0 else f"{c}*z{self.order}^{k}")
        return "CycNum(" + (" + ".join(terms) if terms else "0") + (f" @ {self.order})")


def _mul(a: CycNum, b: CycNum) -> CycNum:
    n = a.order
    fd = _field(n)
    phi = fd.phi
    if phi == 1:
        return CycNum._raw(n, (a.coeffs[0] * b.coeffs[0],))
    conv = [0] * (2 * phi - 1)
    for i, x in enumerate(a.coeffs):
        if x:
            for j, y in enumerate(b.coeffs):
                if y:
                    conv[i + j] += x * y
    out = conv[:phi]
    powers = fd.powers
    for k in range(phi, 2 * phi - 1):
        c = conv[k]
        if c:
            for i, p in enumerate(powers[k % n]):
                if p:
                    out[i] += c * p
    return CycNum._raw(n, tuple(o if isinstance(o, Fraction) else Fraction(o) for o in out))


def _poly_trim(p: list) -> list:
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: list, b: list) -> tuple[list, list]:
    a = _poly_trim(list(a))
    b = _poly_trim(list(b))
    if len(a) < len(b):
        return [Fraction(0)], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    lead = b[-1]
    for k in range(len(a) - len(b), -1, -1):
        c = a[k + len(b) - 1] / lead
        q[k] = c
        if c:
            for i, bc in enumerate(b):
                a[k + i] -= c * bc
    rem = _poly_trim(a[: len(b) - 1] or [Fraction(0)])
    return q, rem


def _poly_mul(a: list, b: list) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_sub(a: list, b: list) -> list:
    m = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (m - len(a))
    b = list(b) + [Fraction(0)] * (m - len(b))
    return _poly_trim([x - y for x, y in zip(a, b)])


def _inverse(a: CycNum) -> CycNum:
    # extended Euclid of the representative against the cyclotomic polynomial
    fd = _field(a.order)
    r0 = [Fraction(c) for c in fd.poly]
    r1 = _poly_trim(list(a.coeffs))
    s0, s1 = [Fraction(0)], [Fraction(1)]
    while len(r1) > 1 or r1[0] != 0:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
    # r0 is a nonzero constant since the cyclotomic polynomial is irreducible
    assert len(r0) == 1 and r0[0] != 0
    inv = [c / r0[0] for c in s0]
    return CycNum.from_poly(a.order, inv)


@lru_cache(maxsize=None)
def _embedding_inverse(m: int, n: int):
    """Solver data for writing order-n coordinates in the Q(zeta_m) basis."""
    sub = _field(m)
    rows = [CycNum.zeta(m, j).at_order(n).coeffs for j in range(sub.phi)]
    # Gauss-Jordan on the transpose: columns are basis images
    phi_n = _field(n).phi
    aug = [[rows[j][i] for j in range(sub.phi)] for i in range(phi_n)]
    return aug


def _project(x: CycNum, m: int) -> CycNum:
    n = x.order
    if m == n:
        return x
    aug = [list(r) + [x.coeffs[i]] for i, r in enumerate(_embedding_inverse(m, n))]
    ncols = len(aug[0]) - 1
    piv_row = 0
    pivots = []
    for col in range(ncols):
        pr = next((r for r in range(piv_row, len(aug)) if aug[r][col] != 0), None)
        if pr is None:
            continue
        aug[piv_row], aug[pr] = aug[pr], aug[piv_row]
        pv = aug[piv_row][col]
        aug[piv_row] = [v / pv for v in aug[piv_row]]
        for r in range(len(aug)):
            if r != piv_row and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[piv_row])]
        pivots.append(col)
        piv_row += 1
    for r in range(piv_row, len(aug)):
        if aug[r][-1] != 0:
            raise ValueError(f"element does not lie in Q(zeta_{m})")
    sol = [Fraction(0)] * ncols
    for r, col in enumerate(pivots):
        sol[col] = aug[r][-1]
    return CycNum._raw(m, tuple(sol))


# -- functional surface ---------------------------------------------------

def cyc_root_of_unity(n: int, k: int) -> CycNum:
    if n < 1:
        raise ValueError("n must be >= 1")
    return CycNum.zeta(n, k)


def cyc_arith(a: CycNum, b: CycNum, op: str) -> CycNum:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def cyc_as_root_of_unity(a: CycNum) -> Optional[int]:
    return a.root_of_unity_exponent()


def cyc_galois(a: CycNum, s: int) -> CycNum:
    return a.galois(s)


def as_cyc(x, order: int = 1) -> CycNum:
    if isinstance(x, CycNum):
        return x
    return CycNum.rational(x, order)


def common_order(values: Iterable[CycNum]) -> int:
    n = 1
    for v in values:
        n = lcm(n, v.order)
    return n
