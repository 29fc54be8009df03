"""Dense symmetric linear algebra and deterministic MVN sampling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .kernels import RNG_ALGORITHM

__all__ = [
    "NotPositiveDefiniteError",
    "CholeskyFactor",
    "RngStream",
    "scatter",
    "cholesky",
    "log_det_pd",
    "sample_mvn",
]

_SYMMETRY_RTOL = 1e-9


class NotPositiveDefiniteError(ValueError):
    """The matrix has a non-positive pivot: rank-deficient scatter
    (e.g. p >= n_i or degenerate data)."""


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower-triangular factor L with L @ L.T reconstructing the source."""

    lower: np.ndarray

    @property
    def dim(self) -> int:
        return self.lower.shape[0]


@dataclass
class RngStream:
    """One deterministic substream of the counter-based generator.

    Identical (master_seed, stream_index) always yields the identical
    sequence; the stream is single-owner and must not be shared across
    threads.
    """

    master_seed: int
    stream_index: int
    algorithm: str = RNG_ALGORITHM
    _position: int = field(default=0, repr=False)

    def normals(self, count: int) -> np.ndarray:
        """Next ``count`` standard normal draws (one uniform each)."""
        if count < 0:
            raise ValueError("count must be nonnegative")
        out = kernels.normal_block(
            self.master_seed, self.stream_index, self._position, count
        )
        self._position += count
        return out

    def uniforms(self, count: int) -> np.ndarray:
        """Next ``count`` uniforms in the open interval (0, 1)."""
        if count < 0:
            raise ValueError("count must be nonnegative")
        out = kernels.uniform_block(
            self.master_seed, self.stream_index, self._position, count
        )
        self._position += count
        return out


def _as_matrix(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def scatter(sample) -> np.ndarray:
    """Centered cross-product matrix sum_j (x_j - mean)(x_j - mean)'."""
    x = _as_matrix(sample, "sample")
    if x.shape[0] < 2:
        raise ValueError(f"need at least 2 observations, got {x.shape[0]}")
    return kernels.scatter_matrix(x)


def _check_symmetric(s: np.ndarray) -> None:
    scale = float(np.max(np.abs(s))) if s.size else 0.0
    asym = float(np.max(np.abs(s - s.T))) if s.size else 0.0
    if asym > _SYMMETRY_RTOL * max(scale, 1e-300):
        raise ValueError(
            f"matrix is not symmetric: max asymmetry {asym:g} exceeds "
            f"{_SYMMETRY_RTOL:g} * max|S| = {_SYMMETRY_RTOL * scale:g}"
        )


def cholesky(s) -> CholeskyFactor:
    """Lower Cholesky factor of a symmetric positive definite matrix."""
    mat = _as_matrix(s, "matrix")
    if mat.shape[0] != mat.shape[1]:
        raise ValueError(f"matrix must be square, got shape {mat.shape}")
    _check_symmetric(mat)
    lower, ok = kernels.chol_lower(mat)
    if not ok:
        raise NotPositiveDefiniteError(
            "matrix is not positive definite (pivot at or below "
            "p * eps * max diagonal); for scatter matrices this means "
            "p < n_i fails or the data are degenerate"
        )
    return CholeskyFactor(lower=lower)


def log_det_pd(s) -> float:
    """log-determinant of a symmetric positive definite matrix."""
    mat = _as_matrix(s, "matrix")
    if mat.shape[0] != mat.shape[1]:
        raise ValueError(f"matrix must be square, got shape {mat.shape}")
    _check_symmetric(mat)
    ld, ok = kernels.chol_logdet(mat)
    if not ok:
        raise NotPositiveDefiniteError(
            "matrix is not positive definite (pivot at or below "
            "p * eps * max diagonal)"
        )
    return ld


def sample_mvn(n: int, mean, chol_sigma: CholeskyFactor, rng: RngStream) -> np.ndarray:
    """``n`` draws from N(mean, L L') with L = chol_sigma.lower.

    Each row is mean + L z with z filled row-major from the stream via
    the inverse-CDF transform, so the draw count is exactly n * p.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    mu = np.asarray(mean, dtype=np.float64)
    p = chol_sigma.dim
    if mu.shape != (p,):
        raise ValueError(
            f"mean has shape {mu.shape}, expected ({p},) to match the factor"
        )
    z = rng.normals(n * p).reshape(n, p)
    return mu + z @ chol_sigma.lower.T
