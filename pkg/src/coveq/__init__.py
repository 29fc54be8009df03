"""coveq: likelihood-ratio tests for equality of covariance matrices.

Three decision rules on k independent multivariate-normal samples --
the classic Box chi-square approximation, a high-dimensional normal
approximation, and an adjusted chi-square statistic calibrated for any
dimension/group count -- plus a deterministic Monte Carlo lab for size
and power studies.
"""

__version__ = "0.1.0"

from .decision import MeanVariant, Method, TestOutcome, alrt_test, classic_test, clt_test, run_tests
from .kernels import RNG_ALGORITHM, active_backend, available_backends, use_backend
from .linalg import (
    CholeskyFactor,
    NotPositiveDefiniteError,
    RngStream,
    cholesky,
    log_det_pd,
    sample_mvn,
    scatter,
)
from .lrt import (
    AsymptoticParams,
    DesignSpec,
    ScatterSummary,
    asymptotic_params,
    box_rho,
    dof_f,
    exact_moments,
    log_mgf_W,
    mu_bar_n,
    mu_n,
    neg2_log_lambda_star,
    sigma2_n,
    z_alrt,
)
from .simlab import (
    Scenario,
    SimulationReport,
    SimulationSpec,
    generate_replicate,
    histogram_data,
    replicate_samples,
    run_study,
    scenario_scales,
)

__all__ = [
    "__version__",
    "RNG_ALGORITHM",
    "active_backend",
    "available_backends",
    "use_backend",
    "NotPositiveDefiniteError",
    "CholeskyFactor",
    "RngStream",
    "scatter",
    "cholesky",
    "log_det_pd",
    "sample_mvn",
    "DesignSpec",
    "ScatterSummary",
    "AsymptoticParams",
    "asymptotic_params",
    "neg2_log_lambda_star",
    "dof_f",
    "box_rho",
    "mu_n",
    "sigma2_n",
    "mu_bar_n",
    "z_alrt",
    "log_mgf_W",
    "exact_moments",
    "Method",
    "MeanVariant",
    "TestOutcome",
    "classic_test",
    "clt_test",
    "alrt_test",
    "run_tests",
    "Scenario",
    "SimulationSpec",
    "SimulationReport",
    "scenario_scales",
    "generate_replicate",
    "replicate_samples",
    "run_study",
    "histogram_data",
]
