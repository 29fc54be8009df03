"""Pure-numpy backend: vectorized within a replicate, BLAS/LAPACK for
the matrix work."""

from __future__ import annotations

import math

import numpy as np

from ..specfun import _PPND_A, _PPND_B, _PPND_C, _PPND_D, _PPND_E, _PPND_F
from ._common import GOLDEN, MASK64, MIX_M1, MIX_M2, U64_TO_UNIT, stream_seed

_GOLDEN_U = np.uint64(GOLDEN)
_M1 = np.uint64(MIX_M1)
_M2 = np.uint64(MIX_M2)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def _polyval(coeffs, r: np.ndarray) -> np.ndarray:
    acc = np.full_like(r, coeffs[7])
    for c in (coeffs[6], coeffs[5], coeffs[4], coeffs[3], coeffs[2], coeffs[1], coeffs[0]):
        acc = acc * r + c
    return acc


def _norm_ppf_vec(u: np.ndarray) -> np.ndarray:
    """Vectorized AS 241 PPND16."""
    out = np.empty_like(u)
    q = u - 0.5
    central = np.abs(q) <= 0.425
    if central.any():
        qc = q[central]
        r = 0.180625 - qc * qc
        out[central] = qc * _polyval(_PPND_A, r) / _polyval(_PPND_B, r)
    tails = ~central
    if tails.any():
        qt = q[tails]
        ut = u[tails]
        r = np.where(qt < 0.0, ut, 1.0 - ut)
        r = np.sqrt(-np.log(r))
        near = r <= 5.0
        val = np.empty_like(r)
        if near.any():
            rn = r[near] - 1.6
            val[near] = _polyval(_PPND_C, rn) / _polyval(_PPND_D, rn)
        far = ~near
        if far.any():
            rf = r[far] - 5.0
            val[far] = _polyval(_PPND_E, rf) / _polyval(_PPND_F, rf)
        out[tails] = np.where(qt < 0.0, -val, val)
    return out


def uniform_block(master_seed: int, stream_index: int, offset: int, count: int) -> np.ndarray:
    """``count`` uniforms in (0, 1) at positions offset..offset+count-1."""
    seed = np.uint64(stream_seed(master_seed, stream_index))
    idx = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    bits = _mix64(seed + _GOLDEN_U * idx)
    return ((bits >> _S11).astype(np.float64) + 0.5) * U64_TO_UNIT


def normal_block(master_seed: int, stream_index: int, offset: int, count: int) -> np.ndarray:
    return _norm_ppf_vec(uniform_block(master_seed, stream_index, offset, count))


def scatter_matrix(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    xc = x - x.mean(axis=0)
    s = xc.T @ xc
    lower = np.tril(s)
    return lower + np.tril(s, -1).T


def chol_lower(s: np.ndarray):
    s = np.asarray(s, dtype=np.float64)
    p = s.shape[0]
    tol = p * np.finfo(np.float64).eps * float(np.max(np.diagonal(s)))
    try:
        lower = np.linalg.cholesky(s)
    except np.linalg.LinAlgError:
        return np.zeros_like(s), False
    if float(np.min(np.diagonal(lower)) ** 2) <= tol:
        return np.zeros_like(s), False
    return lower, True


def chol_logdet(s: np.ndarray):
    lower, ok = chol_lower(s)
    if not ok:
        return math.nan, False
    return 2.0 * float(np.sum(np.log(np.diagonal(lower)))), True


def replicate_logdets(p, ns, sds, master_seed, stream_index):
    ns = np.asarray(ns, dtype=np.int64)
    sds = np.asarray(sds, dtype=np.float64)
    k = ns.shape[0]
    total = int(ns.sum()) * p
    z = normal_block(master_seed, stream_index, 0, total)
    lds = np.empty(k, dtype=np.float64)
    pooled = np.zeros((p, p), dtype=np.float64)
    pos = 0
    for i in range(k):
        n_i = int(ns[i])
        x = sds[i] * z[pos : pos + n_i * p].reshape(n_i, p)
        pos += n_i * p
        a = scatter_matrix(x)
        pooled += a
        ld, ok = chol_logdet(a)
        if not ok:
            return lds, math.nan, False
        lds[i] = ld
    ldp, ok = chol_logdet(pooled)
    if not ok:
        return lds, math.nan, False
    return lds, ldp, True


def raw_stat_batch(p, ns, sds, master_seed, n_reps) -> np.ndarray:
    ns = np.asarray(ns, dtype=np.int64)
    sds = np.asarray(sds, dtype=np.float64)
    k = ns.shape[0]
    nk = float(ns.sum() - k)
    out = np.empty(n_reps, dtype=np.float64)
    for r in range(n_reps):
        lds, ld_pool, ok = replicate_logdets(p, ns, sds, master_seed, r)
        if not ok:
            out[r] = math.nan
            continue
        acc = nk * ld_pool
        for i in range(k):
            acc -= (ns[i] - 1.0) * lds[i]
        acc -= p * nk * math.log(nk)
        for i in range(k):
            acc += p * (ns[i] - 1.0) * math.log(ns[i] - 1.0)
        out[r] = acc
    return out
