"""Hot numeric kernels with two interchangeable backends.

The numba backend JIT-compiles the inner loops; the numpy backend is a
pure-vectorized fallback.  Selection: the ``COVEQ_BACKEND`` environment
variable (``auto`` | ``numba`` | ``numpy``; default ``auto`` picks numba
when importable), or :func:`use_backend` at runtime.

Both backends implement the same contracts:

- ``normal_block(master, stream, offset, count)`` -- standard normal
  draws from the counter-based stream, one uniform per normal.
- ``scatter_matrix(x)`` -- centered cross-product matrix, bitwise
  symmetric (upper triangle mirrored from the computed lower triangle).
- ``chol_lower(s)`` -- ``(L, ok)`` lower Cholesky factor with pivot
  tolerance ``p * eps * max(diag)``.
- ``chol_logdet(s)`` -- ``(log det, ok)`` through the same factorization.
- ``replicate_logdets(p, ns, sds, master, stream)`` -- per-group and
  pooled scatter log-determinants for one simulated replicate.
- ``raw_stat_batch(p, ns, sds, master, n_reps)`` -- the raw test
  statistic for replicates ``0..n_reps-1`` (stream index == replicate
  index); NaN marks an internal failure.

Uniform draws are bit-identical across backends; floating-point results
may differ at rounding level between backends but are deterministic
within each.
"""

from __future__ import annotations

import os

from ._common import GOLDEN, MASK64, mix64, stream_seed
from . import numpy_impl

RNG_ALGORITHM = "splitmix64"

_IMPLS = {"numpy": numpy_impl}
try:
    from . import numba_impl

    _IMPLS["numba"] = numba_impl
except ImportError:  # pragma: no cover - numba genuinely absent
    numba_impl = None

_active_name = ""
_active = numpy_impl


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_IMPLS))


def use_backend(name: str) -> None:
    """Switch the active backend ('numba' or 'numpy')."""
    global _active, _active_name
    if name not in _IMPLS:
        raise ValueError(
            f"unknown backend {name!r}; available: {', '.join(sorted(_IMPLS))}"
        )
    _active = _IMPLS[name]
    _active_name = name


def active_backend() -> str:
    return _active_name


def _initial_backend() -> str:
    choice = os.environ.get("COVEQ_BACKEND", "auto").strip().lower()
    if choice in ("", "auto"):
        return "numba" if "numba" in _IMPLS else "numpy"
    if choice not in _IMPLS:
        raise RuntimeError(
            f"COVEQ_BACKEND={choice!r} is not available; "
            f"choose one of: auto, {', '.join(sorted(_IMPLS))}"
        )
    return choice


use_backend(_initial_backend())


def uniform_block(master_seed: int, stream_index: int, offset: int, count: int):
    return _active.uniform_block(master_seed, stream_index, offset, count)


def normal_block(master_seed: int, stream_index: int, offset: int, count: int):
    return _active.normal_block(master_seed, stream_index, offset, count)


def scatter_matrix(x):
    return _active.scatter_matrix(x)


def chol_lower(s):
    return _active.chol_lower(s)


def chol_logdet(s):
    return _active.chol_logdet(s)


def replicate_logdets(p, ns, sds, master_seed, stream_index):
    return _active.replicate_logdets(p, ns, sds, master_seed, stream_index)


def raw_stat_batch(p, ns, sds, master_seed, n_reps):
    return _active.raw_stat_batch(p, ns, sds, master_seed, n_reps)
