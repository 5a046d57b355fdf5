"""Exact linear algebra over Q, Q(zeta_n) and Z.

Field routines accept any exact field elements supporting ``+ - * /`` and
truthiness for nonzero (``Fraction`` and ``CycNum`` both qualify).  Sparse
routines take rows as ``{column: value}`` dicts.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

IntMatrix = list[list[int]]

# ---------------------------------------------------------------------------
# integer matrices


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> list:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def transpose(a: Sequence[Sequence]) -> list[list]:
    return [list(r) for r in zip(*a)]


def int_det(a: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant."""
    m = [list(r) for r in a]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def smith_normal_form(a: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(U, D, V)`` with ``U @ a @ V == D`` and U, V unimodular.

    D is diagonal with nonnegative entries d1 | d2 | ... .
    """
    D = [list(map(int, r)) for r in a]
    rows = len(D)
    cols = len(D[0]) if rows else 0
    U = identity(rows)
    V = identity(cols)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, f):  # row_dst += f * row_src
        D[dst] = [x + f * y for x, y in zip(D[dst], D[src])]
        U[dst] = [x + f * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, f):
        for r in D:
            r[dst] += f * r[src]
        for r in V:
            r[dst] += f * r[src]

    t = 0
    while t < min(rows, cols):
        # pick the smallest nonzero entry in the remaining block as pivot
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        done = False
        while not done:
            done = True
            p = D[t][t]
            for i in range(t + 1, rows):
                if D[i][t]:
                    q = D[i][t] // p
                    add_row(i, t, -q)
                    if D[i][t]:
                        swap_rows(t, i)
                        done = False
                        break
            if not done:
                continue
            p = D[t][t]
            for j in range(t + 1, cols):
                if D[t][j]:
                    q = D[t][j] // p
                    add_col(j, t, -q)
                    if D[t][j]:
                        swap_cols(t, j)
                        done = False
                        break
            if not done:
                continue
            # divisibility: the pivot must divide every remaining entry
            p = D[t][t]
            for i in range(t + 1, rows):
                bad = next((j for j in range(t + 1, cols) if D[i][j] % p), None)
                if bad is not None:
                    add_row(t, i, 1)
                    done = False
                    break
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return U, D, V


def int_inverse_unimodular(a: Sequence[Sequence[int]]) -> IntMatrix:
    n = len(a)
    inv = fraction_inverse([[Fraction(x) for x in r] for r in a])
    out = []
    for r in inv:
        row = []
        for x in r:
            if x.denominator != 1:
                raise ValueError("matrix is not unimodular")
            row.append(int(x))
        out.append(row)
    assert len(out) == n
    return out


# ---------------------------------------------------------------------------
# dense field routines


def rref(rows: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form; returns (rows, pivot_columns)."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0]) if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        pv = m[r][c]
        m[r] = [x / pv if x else x for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y if y else x for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def kernel(rows: Sequence[Sequence], ncols: int, zero, one) -> list[list]:
    """Basis of {x : rows @ x = 0}, as dense vectors."""
    red, pivots = rref(rows, ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for row, p in zip(red, pivots):
            if row[f]:
                v[p] = -row[f]
        basis.append(v)
    return basis


def fraction_inverse(a: Sequence[Sequence]) -> list[list]:
    n = len(a)
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(a)]
    red, pivots = rref(aug, n)
    if pivots != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def solve_left(basis: Sequence[Sequence], target: Sequence):
    """Coefficients c with sum_i c_i * basis[i] == target, or None."""
    k = len(basis)
    n = len(target)
    cols = [[basis[i][j] for i in range(k)] + [target[j]] for j in range(n)]
    red, pivots = rref(cols, k + 1)
    if k in pivots:
        return None
    zero = target[0] - target[0] if n else 0
    sol = [zero] * k
    for row, p in zip(red, pivots):
        sol[p] = row[k]
    return sol


def det(a: Sequence[Sequence]):
    """Determinant by Gaussian elimination over a field."""
    n = len(a)
    m = [list(r) for r in a]
    result = None
    sign = 1
    for c in range(n):
        pr = next((i for i in range(c, n) if m[i][c]), None)
        if pr is None:
            return m[0][0] - m[0][0]
        if pr != c:
            m[c], m[pr] = m[pr], m[c]
            sign = -sign
        pv = m[c][c]
        result = pv if result is None else result * pv
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] / pv
                m[i] = [x - f * y if y else x for x, y in zip(m[i], m[c])]
    return result if sign == 1 else -result


# ---------------------------------------------------------------------------
# sparse field routines


def _axpy(dst: dict, f, src: dict) -> None:
    """dst -= f * src, dropping exact zeros."""
    for k, v in src.items():
        cur = dst.get(k)
        nv = -(f * v) if cur is None else cur - f * v
        if nv:
            dst[k] = nv
        elif cur is not None:
            del dst[k]


class SparseEchelon:
    """Incremental reduced echelon basis of a row space."""

    def __init__(self):
        self.rows: dict[int, dict] = {}  # pivot column -> row with pivot 1

    def reduce(self, row: dict) -> dict:
        row = {k: v for k, v in row.items() if v}
        # stored rows are fully reduced, so one pass clears every pivot column
        for c in sorted(set(row) & set(self.rows)):
            if c in row:
                _axpy(row, row[c], self.rows[c])
        return row

    def add(self, row: dict) -> bool:
        row = self.reduce(row)
        if not row:
            return False
        p = min(row)
        pv = row[p]
        row = {k: v / pv for k, v in row.items()}
        for c, other in self.rows.items():
            if p in other:
                _axpy(other, other[p], row)
        self.rows[p] = row
        return True

    def __len__(self):
        return len(self.rows)


def sparse_kernel(rows: Sequence[dict], ncols: int, one) -> list[dict]:
    ech = SparseEchelon()
    for r in rows:
        ech.add(r)
    pivots = set(ech.rows)
    basis = []
    for f in range(ncols):
        if f in pivots:
            continue
        v = {f: one}
        for p, row in ech.rows.items():
            if f in row:
                v[p] = -row[f]
        basis.append(v)
    return basis


def sparse_rank(rows: Sequence[dict]) -> int:
    ech = SparseEchelon()
    for r in rows:
        ech.add(r)
    return len(ech)


def sparse_det(rows: Sequence[dict], n: int):
    """Determinant of an n x n matrix given as sparse rows."""
    work = [dict((k, v) for k, v in r.items() if v) for r in rows]
    used = [False] * n
    pivot_row_of = []
    result = None
    for c in range(n):
        cand = [i for i in range(n) if not used[i] and c in work[i]]
        if not cand:
            return None  # singular; caller supplies the zero of its field
        p = min(cand, key=lambda i: (len(work[i]), i))
        used[p] = True
        pivot_row_of.append(p)
        pv = work[p][c]
        result = pv if result is None else result * pv
        for i in cand:
            if i != p:
                _axpy(work[i], work[i][c] / pv, work[p])
    # sign of the permutation c -> pivot_row_of[c]
    perm = pivot_row_of
    seen = [False] * n
    sign = 1
    for i in range(n):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
    return result if sign == 1 else -result


class SpanCoordinates:
    """Coordinates of sparse vectors in a fixed independent family."""

    def __init__(self, vectors: Sequence[dict]):
        self.n = len(vectors)
        self.rows: dict[int, tuple[dict, dict]] = {}  # pivot -> (row, combination)
        for k, v in enumerate(vectors):
            rest, used = self._reduce(v)
            if not rest:
                raise ValueError(f"vector {k} is dependent on the previous ones")
            # rest = v_k - sum used_n v_n
            combo = {n: -x for n, x in used.items()}
            combo[k] = Fraction(1)
            p = min(rest)
            pv = rest[p]
            row = {c: x / pv for c, x in rest.items()}
            combo = {c: x / pv for c, x in combo.items()}
            for r2, c2 in self.rows.values():
                if p in r2:
                    f = r2[p]
                    _axpy(r2, f, row)
                    _axpy(c2, f, combo)
            self.rows[p] = (row, combo)

    def _reduce(self, v: dict) -> tuple[dict, dict]:
        """Return (rest, used) with v = rest + sum_n used_n vectors[n]."""
        rest = {k: x for k, x in v.items() if x}
        used: dict = {}
        for p in sorted(set(rest) & set(self.rows)):
            if p in rest:
                f = rest[p]
                row, combo = self.rows[p]
                _axpy(rest, f, row)
                _axpy(used, -f, combo)
        return rest, used

    def coords(self, v: dict) -> dict | None:
        """Sparse coefficients c with v = sum c_k vectors[k], or None."""
        rest, used = self._reduce(v)
        return None if rest else used
