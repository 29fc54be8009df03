"""The three rejection rules packaged as a uniform test interface.

All three compare an affine transform of the same raw statistic against
a fixed quantile, so for any dataset the rules are nested: whichever has
the lowest implied cutoff on the raw scale rejects first.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from . import specfun
from .lrt import AsymptoticParams, ScatterSummary, asymptotic_params, neg2_log_lambda_star, z_alrt

__all__ = [
    "Method",
    "MeanVariant",
    "TestOutcome",
    "classic_test",
    "clt_test",
    "alrt_test",
    "run_tests",
]


class Method(str, enum.Enum):
    CHISQ = "chisq"
    CLT = "clt"
    ALRT = "alrt"


class MeanVariant(str, enum.Enum):
    DIGAMMA = "digamma"
    DIGAMMA_FREE = "digamma-free"


@dataclass(frozen=True)
class TestOutcome:
    method: Method
    mean_variant: MeanVariant
    raw_statistic: float
    standardized: float
    reference: str
    critical_value: float
    p_value: float
    reject: bool
    params: AsymptoticParams


def _check_alpha(alpha: float) -> None:
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")


def _mean_for(params: AsymptoticParams, variant: MeanVariant) -> float:
    return params.mu_n if variant is MeanVariant.DIGAMMA else params.mu_bar_n


def classic_test(
    s: ScatterSummary, alpha: float, params: AsymptoticParams | None = None
) -> TestOutcome:
    """Box chi-square rule: reject when rho * raw exceeds the chi-square
    upper alpha quantile at f degrees of freedom."""
    _check_alpha(alpha)
    if params is None:
        params = asymptotic_params(s.design)
    raw = neg2_log_lambda_star(s)
    standardized = params.rho * raw
    critical = specfun.chisq_quantile(params.f, alpha)
    p_value = 1.0 - specfun.chisq_cdf(params.f, standardized)
    return TestOutcome(
        method=Method.CHISQ,
        mean_variant=MeanVariant.DIGAMMA,
        raw_statistic=raw,
        standardized=standardized,
        reference=f"chisq(f={params.f:g})",
        critical_value=critical,
        p_value=p_value,
        reject=standardized > critical,
        params=params,
    )


def clt_test(
    s: ScatterSummary,
    alpha: float,
    mean_variant: MeanVariant = MeanVariant.DIGAMMA,
    params: AsymptoticParams | None = None,
) -> TestOutcome:
    """Normal rule: reject when (raw - mu)/sigma exceeds the upper
    alpha normal critical value."""
    _check_alpha(alpha)
    if params is None:
        params = asymptotic_params(s.design)
    raw = neg2_log_lambda_star(s)
    mu = _mean_for(params, mean_variant)
    standardized = (raw - mu) / math.sqrt(params.sigma2_n)
    critical = specfun.normal_quantile(alpha)
    p_value = 1.0 - specfun.normal_cdf(standardized)
    return TestOutcome(
        method=Method.CLT,
        mean_variant=mean_variant,
        raw_statistic=raw,
        standardized=standardized,
        reference="normal",
        critical_value=critical,
        p_value=p_value,
        reject=standardized > critical,
        params=params,
    )


def alrt_test(
    s: ScatterSummary,
    alpha: float,
    mean_variant: MeanVariant = MeanVariant.DIGAMMA,
    params: AsymptoticParams | None = None,
) -> TestOutcome:
    """Adjusted rule: reject when Z exceeds the chi-square upper alpha
    quantile at f degrees of freedom."""
    _check_alpha(alpha)
    if params is None:
        params = asymptotic_params(s.design)
    raw = neg2_log_lambda_star(s)
    standardized = z_alrt(raw, params, mu=_mean_for(params, mean_variant))
    critical = specfun.chisq_quantile(params.f, alpha)
    p_value = 1.0 - specfun.chisq_cdf(params.f, standardized)
    return TestOutcome(
        method=Method.ALRT,
        mean_variant=mean_variant,
        raw_statistic=raw,
        standardized=standardized,
        reference=f"chisq(f={params.f:g})",
        critical_value=critical,
        p_value=p_value,
        reject=standardized > critical,
        params=params,
    )


def run_tests(
    s: ScatterSummary,
    alpha: float,
    methods: tuple[Method, ...] = (Method.CHISQ, Method.CLT, Method.ALRT),
    mean_variant: MeanVariant = MeanVariant.DIGAMMA,
) -> list[TestOutcome]:
    """Run the requested rules once, sharing one parameter computation."""
    params = asymptotic_params(s.design)
    outcomes = []
    for method in methods:
        if method is Method.CHISQ:
            outcomes.append(classic_test(s, alpha, params=params))
        elif method is Method.CLT:
            outcomes.append(clt_test(s, alpha, mean_variant, params=params))
        else:
            outcomes.append(alrt_test(s, alpha, mean_variant, params=params))
    return outcomes
