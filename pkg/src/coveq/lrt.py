"""Test statistics and their null-distribution parameters.

The raw statistic is -2 log of the Bartlett-modified likelihood ratio
for equality of k covariance matrices, always handled in log space (the
ratio itself underflows catastrophically at realistic sizes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import specfun

__all__ = [
    "DesignSpec",
    "ScatterSummary",
    "AsymptoticParams",
    "neg2_log_lambda_star",
    "dof_f",
    "box_rho",
    "mu_n",
    "sigma2_n",
    "mu_bar_n",
    "asymptotic_params",
    "z_alrt",
    "log_mgf_W",
    "exact_moments",
]


@dataclass(frozen=True)
class DesignSpec:
    """Dimension p and per-group sample sizes; requires p < min n_i."""

    p: int
    group_sizes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "group_sizes", tuple(int(n) for n in self.group_sizes))
        if self.p < 1:
            raise ValueError(f"p must be at least 1, got {self.p}")
        if len(self.group_sizes) < 2:
            raise ValueError(
                f"need at least 2 groups, got {len(self.group_sizes)}"
            )
        for n_i in self.group_sizes:
            if n_i <= self.p:
                raise ValueError(
                    f"every group size must exceed p={self.p}; got n_i={n_i}"
                )

    @property
    def k(self) -> int:
        return len(self.group_sizes)

    @property
    def n(self) -> int:
        return sum(self.group_sizes)


@dataclass(frozen=True)
class ScatterSummary:
    """Per-group and pooled scatter log-determinants for one dataset."""

    design: DesignSpec
    log_det_groups: tuple[float, ...]
    log_det_pooled: float

    def __post_init__(self):
        object.__setattr__(
            self, "log_det_groups", tuple(float(v) for v in self.log_det_groups)
        )
        if len(self.log_det_groups) != self.design.k:
            raise ValueError(
                f"expected {self.design.k} group log-determinants, "
                f"got {len(self.log_det_groups)}"
            )
        values = self.log_det_groups + (self.log_det_pooled,)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("log-determinants must all be finite")


@dataclass(frozen=True)
class AsymptoticParams:
    """Null-distribution parameters for one design."""

    f: float
    rho: float
    mu_n: float
    sigma2_n: float
    mu_bar_n: float


def _kahan_sum_sorted(terms: list[float]) -> float:
    """Compensated sum in descending-magnitude order.

    The digamma sums have ~p*k terms of size ~n log n that cancel almost
    completely; this keeps the relative error near machine precision.
    """
    terms = sorted(terms, key=abs, reverse=True)
    total = 0.0
    comp = 0.0
    for t in terms:
        y = t - comp
        s = total + y
        comp = (s - total) - y
        total = s
    return total


def neg2_log_lambda_star(s: ScatterSummary) -> float:
    """-2 log Lambda* from scatter log-determinants, fully in log space."""
    d = s.design
    nk = float(d.n - d.k)
    acc = nk * s.log_det_pooled
    for i, n_i in enumerate(d.group_sizes):
        acc -= (n_i - 1.0) * s.log_det_groups[i]
    acc -= d.p * nk * math.log(nk)
    for n_i in d.group_sizes:
        acc += d.p * (n_i - 1.0) * math.log(n_i - 1.0)
    return acc


def dof_f(design: DesignSpec) -> float:
    """Degrees of freedom f = p(p+1)(k-1)/2."""
    return 0.5 * design.p * (design.p + 1) * (design.k - 1)


def box_rho(design: DesignSpec) -> float:
    """Box correction factor; approaches 1 as min n_i grows."""
    p, k = design.p, design.k
    nk = design.n - k
    harm = sum(nk / (n_i - 1.0) for n_i in design.group_sizes) - 1.0
    return 1.0 - (2.0 * p * p + 3.0 * p - 1.0) / (6.0 * (p + 1.0) * (k - 1.0) * nk) * harm


def mu_n(design: DesignSpec) -> float:
    """Exact null mean of -2 log Lambda* (digamma form)."""
    p, k = design.p, design.k
    nk = design.n - k
    terms: list[float] = []
    for j in range(1, p + 1):
        terms.append(nk * specfun.digamma((nk + 1 - j) / 2.0))
    for n_i in design.group_sizes:
        for j in range(1, p + 1):
            terms.append(-(n_i - 1.0) * specfun.digamma((n_i - j) / 2.0))
    for n_i in design.group_sizes:
        terms.append(p * (n_i - 1.0) * math.log(n_i - 1.0))
    terms.append(-p * float(nk) * math.log(nk))
    return _kahan_sum_sorted(terms)


def sigma2_n(design: DesignSpec) -> float:
    """Asymptotic null variance of -2 log Lambda*; always positive."""
    p, k = design.p, design.k
    nk = design.n - k
    total = 0.0
    for n_i in design.group_sizes:
        total += (n_i - 1.0) ** 2 * specfun.xi(p / n_i)
    total -= float(nk) ** 2 * specfun.xi(p / (nk + 1.0))
    total += p * (k - 1.0)
    if not total > 0.0:
        raise RuntimeError(
            f"variance formula produced a non-positive value ({total!r}); "
            "this indicates misuse outside the p < min n_i domain"
        )
    return total


def mu_bar_n(design: DesignSpec) -> float:
    """Digamma-free approximation to the null mean."""
    p, k = design.p, design.k
    nk = design.n - k
    total = nk * (p - design.n + k + 0.5) * math.log1p(-p / (nk + 1.0))
    for n_i in design.group_sizes:
        total -= (n_i - 1.0) * (p - n_i + 1.5) * math.log1p(-p / n_i)
    total -= p * (k - 1.0)
    return total


def asymptotic_params(design: DesignSpec) -> AsymptoticParams:
    return AsymptoticParams(
        f=dof_f(design),
        rho=box_rho(design),
        mu_n=mu_n(design),
        sigma2_n=sigma2_n(design),
        mu_bar_n=mu_bar_n(design),
    )


def z_alrt(neg2ll: float, params: AsymptoticParams, mu: float | None = None) -> float:
    """Adjusted statistic Z = raw * s + f - mu * s with s = sqrt(2f/sigma^2).

    Null mean f and null variance ~2f, so Z is chi-square calibrated for
    any p, k.  ``mu`` defaults to the exact mean; pass ``params.mu_bar_n``
    for the digamma-free variant.
    """
    if not params.sigma2_n > 0.0:
        raise ValueError("sigma2_n must be positive")
    if mu is None:
        mu = params.mu_n
    scale = math.sqrt(2.0 * params.f / params.sigma2_n)
    return neg2ll * scale + params.f - mu * scale


def log_mgf_W(design: DesignSpec, t: float) -> float:
    """log E(W^t) of the scale-free likelihood-ratio kernel W under the null.

    Valid for t > max_i (p-1)/(n_i-1) - 1; used as a verification oracle.
    """
    p = design.p
    nk = design.n - design.k
    t_min = max((p - 1.0) / (n_i - 1.0) for n_i in design.group_sizes) - 1.0
    if t <= t_min:
        raise ValueError(
            f"t must exceed {t_min!r} for the moment to exist, got {t!r}"
        )
    total = specfun.ln_multigamma(p, 0.5 * nk)
    total -= specfun.ln_multigamma(p, 0.5 * nk * (1.0 + t))
    for n_i in design.group_sizes:
        total += specfun.ln_multigamma(p, 0.5 * (n_i - 1.0) * (1.0 + t))
        total -= specfun.ln_multigamma(p, 0.5 * (n_i - 1.0))
    return total


def exact_moments(design: DesignSpec) -> tuple[float, float]:
    """Exact null mean and variance of -2 log Lambda*.

    The mean coincides with mu_n; the variance is the trigamma analogue,
    obtained by differentiating the log moment generating function twice.
    Shipped in the public API as a finite-sample diagnostic.
    """
    p, k = design.p, design.k
    nk = design.n - k
    terms: list[float] = []
    for n_i in design.group_sizes:
        for j in range(1, p + 1):
            terms.append((n_i - 1.0) ** 2 * specfun.trigamma((n_i - j) / 2.0))
    for j in range(1, p + 1):
        terms.append(-float(nk) ** 2 * specfun.trigamma((nk + 1 - j) / 2.0))
    variance = _kahan_sum_sorted(terms)
    return mu_n(design), variance
