"""Numba backend: JIT-compiled inner loops, parallel over replicates."""

from __future__ import annotations

import math

import numpy as np
from numba import njit, prange

from ..specfun import _PPND_A, _PPND_B, _PPND_C, _PPND_D, _PPND_E, _PPND_F
from ._common import GOLDEN, MASK64, MIX_M1, MIX_M2, U64_TO_UNIT, stream_seed

_GOLDEN_U = np.uint64(GOLDEN)
_M1 = np.uint64(MIX_M1)
_M2 = np.uint64(MIX_M2)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE_U = np.uint64(1)
_EPS = 2.220446049250313e-16

_A0, _A1, _A2, _A3, _A4, _A5, _A6, _A7 = _PPND_A
_B0, _B1, _B2, _B3, _B4, _B5, _B6, _B7 = _PPND_B
_C0, _C1, _C2, _C3, _C4, _C5, _C6, _C7 = _PPND_C
_D0, _D1, _D2, _D3, _D4, _D5, _D6, _D7 = _PPND_D
_E0, _E1, _E2, _E3, _E4, _E5, _E6, _E7 = _PPND_E
_F0, _F1, _F2, _F3, _F4, _F5, _F6, _F7 = _PPND_F


@njit(cache=True)
def _mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True)
def _stream_seed(master, index):
    return _mix64(master + _GOLDEN_U * (np.uint64(index) + _ONE_U))


@njit(cache=True)
def _ppnd16(u):
    q = u - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        num = (((((((_A7 * r + _A6) * r + _A5) * r + _A4) * r + _A3) * r + _A2) * r + _A1) * r + _A0)
        den = (((((((_B7 * r + _B6) * r + _B5) * r + _B4) * r + _B3) * r + _B2) * r + _B1) * r + _B0)
        return q * num / den
    if q < 0.0:
        r = u
    else:
        r = 1.0 - u
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        val = (((((((_C7 * r + _C6) * r + _C5) * r + _C4) * r + _C3) * r + _C2) * r + _C1) * r + _C0) / (
            ((((((_D7 * r + _D6) * r + _D5) * r + _D4) * r + _D3) * r + _D2) * r + _D1) * r + _D0
        )
    else:
        r -= 5.0
        val = (((((((_E7 * r + _E6) * r + _E5) * r + _E4) * r + _E3) * r + _E2) * r + _E1) * r + _E0) / (
            ((((((_F7 * r + _F6) * r + _F5) * r + _F4) * r + _F3) * r + _F2) * r + _F1) * r + _F0
        )
    if q < 0.0:
        return -val
    return val


@njit(cache=True)
def _uniform_at(seed, position):
    bits = _mix64(seed + _GOLDEN_U * np.uint64(position))
    return ((bits >> _S11) + 0.5) * U64_TO_UNIT


@njit(cache=True)
def _uniform_block(master, stream, offset, count):
    seed = _stream_seed(master, stream)
    out = np.empty(count, dtype=np.float64)
    for i in range(count):
        out[i] = _uniform_at(seed, offset + i + 1)
    return out


@njit(cache=True)
def _normal_block(master, stream, offset, count):
    seed = _stream_seed(master, stream)
    out = np.empty(count, dtype=np.float64)
    for i in range(count):
        out[i] = _ppnd16(_uniform_at(seed, offset + i + 1))
    return out


@njit(cache=True)
def _fill_scaled_normals(x, seed, start, sd):
    # Consumes n*p draws row-major, counter positions start+1 ...
    n, p = x.shape
    c = start
    for r in range(n):
        for j in range(p):
            c += 1
            x[r, j] = sd * _ppnd16(_uniform_at(seed, c))
    return c


@njit(cache=True)
def _scatter(x):
    # Four accumulators break the FP dependence chain in the column
    # dots; the summation order is fixed by the code, so results stay
    # deterministic.
    n, p = x.shape
    xt = np.empty((p, n), dtype=np.float64)
    for j in range(p):
        m = 0.0
        for r in range(n):
            m += x[r, j]
        m /= n
        for r in range(n):
            xt[j, r] = x[r, j] - m
    s = np.empty((p, p), dtype=np.float64)
    for a in range(p):
        for b in range(a + 1):
            a0 = 0.0
            a1 = 0.0
            a2 = 0.0
            a3 = 0.0
            r = 0
            while r + 4 <= n:
                a0 += xt[a, r] * xt[b, r]
                a1 += xt[a, r + 1] * xt[b, r + 1]
                a2 += xt[a, r + 2] * xt[b, r + 2]
                a3 += xt[a, r + 3] * xt[b, r + 3]
                r += 4
            tail = 0.0
            while r < n:
                tail += xt[a, r] * xt[b, r]
                r += 1
            acc = ((a0 + a1) + (a2 + a3)) + tail
            s[a, b] = acc
            s[b, a] = acc
    return s


@njit(cache=True)
def _chol_inplace(a):
    # Lower factor in place; pivot tolerance p * eps * max(diag).
    p = a.shape[0]
    maxd = a[0, 0]
    for j in range(1, p):
        if a[j, j] > maxd:
            maxd = a[j, j]
    tol = p * _EPS * maxd
    for j in range(p):
        d0 = 0.0
        d1 = 0.0
        d2 = 0.0
        d3 = 0.0
        m = 0
        while m + 4 <= j:
            d0 += a[j, m] * a[j, m]
            d1 += a[j, m + 1] * a[j, m + 1]
            d2 += a[j, m + 2] * a[j, m + 2]
            d3 += a[j, m + 3] * a[j, m + 3]
            m += 4
        dt = 0.0
        while m < j:
            dt += a[j, m] * a[j, m]
            m += 1
        d = a[j, j] - (((d0 + d1) + (d2 + d3)) + dt)
        if not (d > tol):
            return False
        d = math.sqrt(d)
        a[j, j] = d
        inv = 1.0 / d
        for i in range(j + 1, p):
            c0 = 0.0
            c1 = 0.0
            c2 = 0.0
            c3 = 0.0
            m = 0
            while m + 4 <= j:
                c0 += a[i, m] * a[j, m]
                c1 += a[i, m + 1] * a[j, m + 1]
                c2 += a[i, m + 2] * a[j, m + 2]
                c3 += a[i, m + 3] * a[j, m + 3]
                m += 4
            ct = 0.0
            while m < j:
                ct += a[i, m] * a[j, m]
                m += 1
            a[i, j] = (a[i, j] - (((c0 + c1) + (c2 + c3)) + ct)) * inv
    return True


@njit(cache=True)
def _chol_logdet_inplace(a):
    if not _chol_inplace(a):
        return math.nan, False
    acc = 0.0
    for j in range(a.shape[0]):
        acc += math.log(a[j, j])
    return 2.0 * acc, True


@njit(cache=True)
def _chol_lower(s):
    p = s.shape[0]
    a = np.zeros((p, p), dtype=np.float64)
    for i in range(p):
        for j in range(i + 1):
            a[i, j] = s[i, j]
    ok = _chol_inplace(a)
    return a, ok


@njit(cache=True)
def _chol_logdet(s):
    p = s.shape[0]
    a = np.empty((p, p), dtype=np.float64)
    for i in range(p):
        for j in range(p):
            a[i, j] = s[i, j]
    return _chol_logdet_inplace(a)


@njit(cache=True)
def _replicate_logdets(p, ns, sds, master, stream):
    seed = _stream_seed(master, stream)
    k = ns.shape[0]
    nmax = ns[0]
    for i in range(1, k):
        if ns[i] > nmax:
            nmax = ns[i]
    x = np.empty((nmax, p), dtype=np.float64)
    lds = np.empty(k, dtype=np.float64)
    pooled = np.zeros((p, p), dtype=np.float64)
    c = 0
    for i in range(k):
        n_i = ns[i]
        xv = x[:n_i]
        c = _fill_scaled_normals(xv, seed, c, sds[i])
        a = _scatter(xv)
        for r in range(p):
            for q in range(p):
                pooled[r, q] += a[r, q]
        ld, ok = _chol_logdet_inplace(a)
        if not ok:
            return lds, math.nan, False
        lds[i] = ld
    ldp, ok = _chol_logdet_inplace(pooled)
    if not ok:
        return lds, math.nan, False
    return lds, ldp, True


@njit(cache=True, parallel=True)
def _raw_stat_batch(p, ns, sds, master, n_reps):
    k = ns.shape[0]
    n_total = 0
    for i in range(k):
        n_total += ns[i]
    nk = np.float64(n_total - k)
    out = np.empty(n_reps, dtype=np.float64)
    for rep in prange(n_reps):
        lds, ldp, ok = _replicate_logdets(p, ns, sds, master, rep)
        if not ok:
            out[rep] = math.nan
        else:
            acc = nk * ldp
            for i in range(k):
                acc -= (ns[i] - 1.0) * lds[i]
            acc -= p * nk * math.log(nk)
            for i in range(k):
                acc += p * (ns[i] - 1.0) * math.log(ns[i] - 1.0)
            out[rep] = acc
    return out


def _as_master(master_seed: int) -> np.uint64:
    return np.uint64(master_seed & MASK64)


def uniform_block(master_seed, stream_index, offset, count):
    return _uniform_block(_as_master(master_seed), int(stream_index), int(offset), int(count))


def normal_block(master_seed, stream_index, offset, count):
    return _normal_block(_as_master(master_seed), int(stream_index), int(offset), int(count))


def scatter_matrix(x):
    return _scatter(np.ascontiguousarray(x, dtype=np.float64))


def chol_lower(s):
    return _chol_lower(np.ascontiguousarray(s, dtype=np.float64))


def chol_logdet(s):
    return _chol_logdet(np.ascontiguousarray(s, dtype=np.float64))


def replicate_logdets(p, ns, sds, master_seed, stream_index):
    return _replicate_logdets(
        int(p),
        np.ascontiguousarray(ns, dtype=np.int64),
        np.ascontiguousarray(sds, dtype=np.float64),
        _as_master(master_seed),
        int(stream_index),
    )


def raw_stat_batch(p, ns, sds, master_seed, n_reps):
    return _raw_stat_batch(
        int(p),
        np.ascontiguousarray(ns, dtype=np.int64),
        np.ascontiguousarray(sds, dtype=np.float64),
        _as_master(master_seed),
        int(n_reps),
    )
