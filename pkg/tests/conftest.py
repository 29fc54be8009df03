"""Shared fixtures: a memoized study runner so the expensive Monte
Carlo grids are computed once per session and reused across tests."""

from __future__ import annotations

import functools

import pytest

import coveq

ACCEPT_SEED = 20260810

# The 12-cell size/power grid of the reference tables.
TABLE_GRID = [(p, k) for k in (3, 20, 50) for p in (5, 20, 50, 95)]


@functools.lru_cache(maxsize=None)
def _study(p, k, n, scenario, replicates, seed, alpha, emit):
    spec = coveq.SimulationSpec(
        design=coveq.DesignSpec(p=p, group_sizes=(n,) * k),
        scenario=scenario,
        alpha=alpha,
        replicates=replicates,
        master_seed=seed,
        emit_statistics=emit,
    )
    return coveq.run_study(spec)


def run_cached_study(p, k, n=100, scenario="null", replicates=10_000,
                     seed=ACCEPT_SEED, alpha=0.05, emit=True):
    return _study(p, k, n, scenario, replicates, seed, alpha, emit)


@pytest.fixture(scope="session")
def study():
    return run_cached_study


@pytest.fixture
def numpy_backend():
    """Temporarily switch the kernels to the pure-numpy fallback."""
    previous = coveq.active_backend()
    coveq.use_backend("numpy")
    try:
        yield
    finally:
        coveq.use_backend(previous)
