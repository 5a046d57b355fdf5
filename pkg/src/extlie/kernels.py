"""Integer Jacobi kernels (numba and numpy backends).

The structure table of a weight-basis algebra is encoded as

    kind[i, j]  0: [b_i, b_j] = 0
                1: [b_i, b_j] = coef[i, j] * b_{idx[i, j]}
                2: [b_i, b_j] = coef[i, j] * coroot(root idx[i, j])
    coef[i, j]  integer coordinates in the power basis of Q(zeta_n), scaled
                by a common denominator D

plus ``wt[r, x]`` = D * (coefficient of x in [x, coroot(r)]) and
``hcoord[r]`` = simple-coroot coordinates of coroot(r).  Field products use
``red[k]`` = coordinates of zeta^k for k < 2*phi - 1.

Each kernel returns a status per triple (0 = Jacobi holds).
"""
from __future__ import annotations

import numpy as np

from ._accel import njit, prange


@njit(cache=True)
def _fmul(x, y, red, out):
    phi = x.shape[0]
    for k in range(phi):
        out[k] = 0
    for a in range(phi):
        xa = x[a]
        if xa == 0:
            continue
        for b in range(phi):
            yb = y[b]
            if yb == 0:
                continue
            p = xa * yb
            for k in range(phi):
                out[k] += p * red[a + b, k]


@njit(cache=True)
def _term(a, b, c, kind, idx, coef, wt, red, out):
    """Write [b_a, [b_b, b_c]] into out; return (kind, index)."""
    k1 = kind[b, c]
    if k1 == 0:
        return 0, 0
    i1 = idx[b, c]
    if k1 == 1:
        k2 = kind[a, i1]
        if k2 == 0:
            return 0, 0
        _fmul(coef[b, c], coef[a, i1], red, out)
        return k2, idx[a, i1]
    # [b_a, coroot] is a multiple of b_a
    s = wt[i1, a]
    if s == 0:
        return 0, 0
    for k in range(out.shape[0]):
        out[k] = coef[b, c, k] * s
    return 1, a


@njit(cache=True)
def _check_one(x, y, z, kind, idx, coef, wt, hcoord, red, ell):
    phi = coef.shape[2]
    vals = np.zeros((3, phi), dtype=np.int64)
    kinds = np.zeros(3, dtype=np.int64)
    inds = np.zeros(3, dtype=np.int64)
    kinds[0], inds[0] = _term(x, y, z, kind, idx, coef, wt, red, vals[0])
    kinds[1], inds[1] = _term(y, z, x, kind, idx, coef, wt, red, vals[1])
    kinds[2], inds[2] = _term(z, x, y, kind, idx, coef, wt, red, vals[2])
    acc = np.zeros((ell, phi), dtype=np.int64)
    for t in range(3):
        if kinds[t] == 2:
            r = inds[t]
            for m in range(ell):
                h = hcoord[r, m]
                if h != 0:
                    for k in range(phi):
                        acc[m, k] += h * vals[t, k]
    for m in range(ell):
        for k in range(phi):
            if acc[m, k] != 0:
                return 1
    for t in range(3):
        if kinds[t] != 1:
            continue
        for k in range(phi):
            s = 0
            for u in range(3):
                if kinds[u] == 1 and inds[u] == inds[t]:
                    s += vals[u, k]
            if s != 0:
                return 1
    return 0


@njit(parallel=True, cache=True)
def jacobi_numba(triples, kind, idx, coef, wt, hcoord, red, ell):
    n = triples.shape[0]
    status = np.zeros(n, dtype=np.int8)
    for t in prange(n):
        status[t] = _check_one(triples[t, 0], triples[t, 1], triples[t, 2],
                               kind, idx, coef, wt, hcoord, red, ell)
    return status


def _terms_numpy(a, b, c, kind, idx, coef, wt, red3):
    k1 = kind[b, c]
    i1 = idx[b, c]
    c1 = coef[b, c]
    # route 1: [b, c] is a basis element
    k2 = kind[a, i1]
    i2 = idx[a, i1]
    c2 = coef[a, i1]
    prod = np.einsum("ti,tj,ijk->tk", c1, c2, red3)
    # route 2: [b, c] is a coroot
    s = wt[np.where(k1 == 2, i1, 0), a]
    scaled = c1 * s[:, None]
    kinds = np.where(k1 == 1, k2, np.where((k1 == 2) & (s != 0), 1, 0))
    inds = np.where(k1 == 1, i2, a)
    vals = np.where((k1 == 1)[:, None], prod, scaled)
    vals = np.where((kinds == 0)[:, None], 0, vals)
    return kinds, inds, vals


def jacobi_numpy(triples, kind, idx, coef, wt, hcoord, red, ell, batch=50_000):
    phi = coef.shape[2]
    ii = np.arange(phi)
    red3 = red[ii[:, None] + ii[None, :]]  # (phi, phi, phi)
    status = np.zeros(len(triples), dtype=np.int8)
    for start in range(0, len(triples), batch):
        tr = triples[start:start + batch]
        x, y, z = tr[:, 0], tr[:, 1], tr[:, 2]
        terms = [_terms_numpy(x, y, z, kind, idx, coef, wt, red3),
                 _terms_numpy(y, z, x, kind, idx, coef, wt, red3),
                 _terms_numpy(z, x, y, kind, idx, coef, wt, red3)]
        bad = np.zeros(len(tr), dtype=bool)
        acc = np.zeros((len(tr), ell, phi), dtype=np.int64)
        for kinds, inds, vals in terms:
            m = kinds == 2
            acc += np.where(m[:, None, None], hcoord[np.where(m, inds, 0)][:, :, None] * vals[:, None, :], 0)
        bad |= acc.any(axis=(1, 2))
        for kinds_t, inds_t, _ in terms:
            s = np.zeros((len(tr), phi), dtype=np.int64)
            for kinds_u, inds_u, vals_u in terms:
                same = (kinds_u == 1) & (inds_u == inds_t)
                s += np.where(same[:, None], vals_u, 0)
            bad |= (kinds_t == 1) & s.any(axis=1)
        status[start:start + len(tr)] = bad
    return status
