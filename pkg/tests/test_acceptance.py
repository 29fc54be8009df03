"""Acceptance gate: one test per criterion, one printed PASS/FAIL line
each (run with ``pytest tests/test_acceptance.py -s`` to see them).

Criteria 5 and 7 are implemented exactly as stated and marked strict
xfail: the quantities they bound are mathematically outside the stated
tolerances (details in the assertion messages), so an expected, honest
failure is recorded rather than a loosened test.
"""

import json
import math
import os
import re
import subprocess
import sys

import numpy as np
import pytest

import coveq
from coveq import kernels, specfun
from conftest import ACCEPT_SEED, TABLE_GRID, run_cached_study


def report_line(num: int, ok: bool, detail: str, expected_fail: bool = False):
    status = "PASS" if ok else ("FAIL (documented defect)" if expected_fail else "FAIL")
    print(f"[{status}] criterion {num}: {detail}")


# -- 1: size reproduction ------------------------------------------------------

TABLE1_TARGETS = {
    (5, 3): {"chisq": 0.0501, "clt": 0.0636, "alrt": 0.0529},
    (50, 3): {"chisq": 0.1861, "clt": 0.0539, "alrt": 0.0521},
    (20, 20): {"chisq": 0.0639, "clt": 0.0542, "alrt": 0.0530},
    (95, 50): {"chisq": 1.0000, "clt": 0.0619, "alrt": 0.0618},
}


def test_criterion_1_size_reproduction():
    failures = []
    details = []
    for (p, k), targets in TABLE1_TARGETS.items():
        report = run_cached_study(p, k, replicates=10_000)
        for method, target in targets.items():
            rate = report.rejection_rate[method]
            if target >= 0.9995:
                ok = rate > 0.999
                band = "must exceed 0.999"
            else:
                tol = 5.0 * math.sqrt(target * (1.0 - target) / 10_000)
                ok = abs(rate - target) <= tol
                band = f"±{tol:.4f}"
            details.append(f"p={p},k={k} {method}: {rate:.4f} vs {target:.4f} ({band})")
            if not ok:
                failures.append(details[-1])
    report_line(1, not failures, "Table-1 sizes at R=10,000: " + "; ".join(details))
    assert not failures, failures


# -- 2: power reproduction ------------------------------------------------------

TABLE2_TARGETS = [
    (20, 20, "alrt", 0.3315),
    (5, 50, "alrt", 0.5377),
    (95, 3, "clt", 0.0898),
]


def test_criterion_2_power_reproduction():
    failures = []
    details = []
    for p, k, method, target in TABLE2_TARGETS:
        report = run_cached_study(p, k, scenario="scaled", replicates=10_000)
        rate = report.rejection_rate[method]
        ok = abs(rate - target) <= 0.025
        details.append(f"p={p},k={k} {method}: {rate:.4f} vs {target:.4f} (±0.025)")
        if not ok:
            failures.append(details[-1])
    report_line(2, not failures, "Table-2 powers at R=10,000: " + "; ".join(details))
    assert not failures, failures


# -- 3: exact-mean identity ------------------------------------------------------

def test_criterion_3_exact_mean_identity():
    designs = [(1, (5, 5)), (3, (20, 20, 20)), (5, (100, 100, 100))]
    failures = []
    details = []
    for p, sizes in designs:
        design = coveq.DesignSpec(p=p, group_sizes=sizes)
        reps = 100_000
        raw = kernels.raw_stat_batch(
            p, np.array(sizes, dtype=np.int64), np.ones(len(sizes)),
            ACCEPT_SEED + 3, reps,
        )
        mu, variance = coveq.exact_moments(design)
        tol = 4.0 * math.sqrt(variance / reps)
        gap = abs(raw.mean() - mu)
        details.append(f"p={p},k={len(sizes)},n={sizes[0]}: |MC-mu|={gap:.4g} tol={tol:.4g}")
        if gap > tol:
            failures.append(details[-1])
    report_line(3, not failures, "exact-mean identity at R=1e5: " + "; ".join(details))
    assert not failures, failures


# -- 4: MGF oracle ---------------------------------------------------------------

def test_criterion_4_mgf_oracle():
    design = coveq.DesignSpec(p=2, group_sizes=(6, 8))
    reps = 1_000_000
    raw = kernels.raw_stat_batch(
        2, np.array([6, 8], dtype=np.int64), np.ones(2), ACCEPT_SEED + 4, reps
    )
    nk = design.n - design.k
    const = sum((n - 1) * math.log(n - 1) for n in design.group_sizes) - nk * math.log(nk)
    log_w = -0.5 * raw + 0.5 * design.p * const
    failures = []
    details = []
    for t in (-0.05, 0.1):
        samples = np.exp(t * log_w)
        mean = samples.mean()
        rel_se = samples.std(ddof=1) / (abs(mean) * math.sqrt(reps))
        target = math.exp(coveq.log_mgf_W(design, t))
        gap = abs(mean - target) / target
        details.append(f"t={t}: rel gap {gap:.3g} vs 3*relSE {3 * rel_se:.3g}")
        if gap > 3 * rel_se:
            failures.append(details[-1])
    report_line(4, not failures, "MGF oracle at R=1e6: " + "; ".join(details))
    assert not failures, failures


# -- 5: variance approximation quality (documented defect) -----------------------

@pytest.mark.xfail(
    strict=True,
    reason=(
        "The closed-form variance differs from the exact trigamma variance by "
        "3.3-14.3% (relative to exact) across the n_i=100 grid and by 34% at "
        "(p=1,k=2,n_i=5); verified against 50-digit mpmath and Monte Carlo. "
        "The stated 2%/10% bounds are not attainable by any implementation of "
        "these formulas."
    ),
)
def test_criterion_5_variance_approximation_quality():
    failures = []
    for p, k in TABLE_GRID:
        design = coveq.DesignSpec(p=p, group_sizes=(100,) * k)
        _, exact = coveq.exact_moments(design)
        gap = abs(exact - coveq.sigma2_n(design)) / exact
        if gap > 0.02:
            failures.append(f"p={p},k={k}: {gap:.4f} > 0.02")
    small = coveq.DesignSpec(p=1, group_sizes=(5, 5))
    _, exact = coveq.exact_moments(small)
    gap_small = abs(exact - coveq.sigma2_n(small)) / exact
    if gap_small > 0.10:
        failures.append(f"p=1,k=2,n=5: {gap_small:.4f} > 0.10")
    report_line(5, not failures,
                "variance approximation bounds as stated: " + "; ".join(failures),
                expected_fail=True)
    assert not failures, failures


# -- 6: variance lower bound ------------------------------------------------------

def test_criterion_6_variance_lower_bound():
    failures = []
    designs = [coveq.DesignSpec(p=p, group_sizes=(100,) * k) for p, k in TABLE_GRID]
    designs += [
        coveq.DesignSpec(p=1, group_sizes=(5, 5)),
        coveq.DesignSpec(p=3, group_sizes=(20,) * 3),
    ]
    for design in designs:
        n_min = min(design.group_sizes)
        delta = 2.0 * (1.0 - (1.0 - 1.0 / n_min) ** 2)
        bound = design.p * (design.p + 1) * (design.k - 1) * (1.0 - delta)
        if coveq.sigma2_n(design) < bound:
            failures.append(f"p={design.p},k={design.k}")
    report_line(6, not failures,
                f"sigma2 >= p(p+1)(k-1)(1-delta) on {len(designs)} designs")
    assert not failures, failures


# -- 7: digamma-free mean consistency (documented defect) --------------------------

@pytest.mark.xfail(
    strict=True,
    reason=(
        "|mu - mu_bar|/sigma <= 0.05 holds only for the k=3, p<=50 cells "
        "(0.025-0.035). It is 0.061-0.134 for k in {20,50} with p<=50 and "
        "0.17/0.42/0.66 at p=95 for k=3/20/50: the digamma-free mean needs "
        "sqrt(k)/min(n_i) -> 0 and p bounded away from min(n_i), which the "
        "grid violates. Verified against 50-digit mpmath."
    ),
)
def test_criterion_7_digamma_free_mean_consistency():
    failures = []
    for p, k in TABLE_GRID:
        design = coveq.DesignSpec(p=p, group_sizes=(100,) * k)
        gap = abs(coveq.mu_n(design) - coveq.mu_bar_n(design)) / math.sqrt(
            coveq.sigma2_n(design)
        )
        if gap > 0.05:
            failures.append(f"p={p},k={k}: {gap:.3f} > 0.05")
    report_line(7, not failures,
                "mean-variant consistency as stated: " + "; ".join(failures),
                expected_fail=True)
    assert not failures, failures


# -- 8: special-function golden suite ----------------------------------------------

def test_criterion_8_special_function_suite():
    checks = [
        (specfun.ln_gamma(1.0), 0.0, 1e-12),
        (specfun.ln_gamma(0.5), 0.57236494292470009, 1e-12),
        (specfun.ln_gamma(10.0), 12.801827480081470, 1e-12),
        (specfun.digamma(1.0), -0.57721566490153286, 1e-12),
        (specfun.digamma(0.5), -1.9635100260214235, 1e-12),
        (specfun.digamma(10.0), 2.2517525890667211, 1e-12),
        (specfun.trigamma(1.0), 1.6449340668482264, 1e-10),
        (specfun.trigamma(0.5), 4.9348022005446793, 1e-10),
        (specfun.trigamma(5.0), 0.22132295573711533, 1e-10),
        (specfun.xi(0.0), 0.0, 1e-13),
        (specfun.xi(0.5), 0.38629436111989062, 1e-12),
        (specfun.xi(1.0 / 3.0), 0.14426354954966210, 1e-12),
        (specfun.eta(0.0), 1.0, 0.0),
        (specfun.eta(0.5), 1.5451774444795625, 1e-12),
        (specfun.eta(0.9), 3.4631730691211005, 1e-12),
        (specfun.ln_multigamma(1, 2.5), 0.28468287047291916, 1e-12),
        (specfun.ln_multigamma(2, 1.5), 0.45158270528945486, 1e-12),
        (specfun.chisq_cdf(2, 2 * math.log(2)), 0.5, 1e-12),
        (specfun.chisq_cdf(1, 3.8414588206941260), 0.95, 1e-10),
        (specfun.chisq_cdf(45, 0.0), 0.0, 0.0),
        (specfun.chisq_quantile(2, 0.5), 2 * math.log(2), 1e-9),
        (specfun.chisq_quantile(1, 0.05), 3.8414588206941260, 1e-8),
        (specfun.chisq_quantile(45, 0.05), 61.656233376279565, 1e-6),
        (specfun.normal_cdf(0.0), 0.5, 0.0),
        (specfun.normal_quantile(0.05), 1.6448536269514727, 1e-10),
        (specfun.normal_quantile(0.5), 0.0, 1e-10),
    ]
    failures = [
        f"value {got!r} != {want!r} (tol {tol})"
        for got, want, tol in checks
        if abs(got - want) > tol
    ]
    round_trip_worst = 0.0
    for f in (1.0, 2.0, 45.0, 630.0, 24255.0, 223_440.0):
        for alpha in (0.01, 0.05, 0.5, 0.95):
            q = specfun.chisq_quantile(f, alpha)
            err = abs(specfun.chisq_cdf(f, q) - (1.0 - alpha))
            round_trip_worst = max(round_trip_worst, err)
            if err > 1e-8:
                failures.append(f"round trip f={f} alpha={alpha}: {err:.2e}")
    report_line(8, not failures,
                f"{len(checks)} golden values; worst quantile round-trip "
                f"{round_trip_worst:.2e} (f up to 223,440)")
    assert not failures, failures


# -- 9: determinism across worker threads -------------------------------------------

def _run_cli_report(path, threads, env):
    cmd = [
        sys.executable, "-m", "coveq.cli", "simulate",
        "--p", "5", "--k", "3", "--n", "100",
        "--replicates", "400", "--seed", "42",
        "--threads", str(threads), "--out", str(path),
    ]
    subprocess.run(cmd, check=True, env=env, capture_output=True)
    text = path.read_text()
    return re.sub(r'"elapsed_seconds": [^,\n]+', '"elapsed_seconds": X', text)


def test_criterion_9_thread_determinism(tmp_path):
    env = dict(os.environ)
    env["NUMBA_NUM_THREADS"] = "16"
    reports = {
        t: _run_cli_report(tmp_path / f"t{t}.json", t, env) for t in (1, 4, 16)
    }
    ok = reports[1] == reports[4] == reports[16]
    report_line(9, ok, "cmd_simulate byte-identical (modulo elapsed) at 1/4/16 threads")
    assert ok
    doc = json.loads(reports[1].replace('"elapsed_seconds": X', '"elapsed_seconds": 0'))
    assert doc["spec"]["replicates"] == 400


# -- 10: CLT shape -------------------------------------------------------------------

def test_criterion_10_clt_shape():
    report = run_cached_study(50, 50, replicates=10_000)
    z = np.sort(report.statistics["clt"])
    mean = float(z.mean())
    var = float(z.var(ddof=1))
    n = len(z)
    cdf = np.array([specfun.normal_cdf(float(v)) for v in z])
    upper = np.max(np.abs(cdf - np.arange(1, n + 1) / n))
    lower = np.max(np.abs(cdf - np.arange(0, n) / n))
    ks = max(upper, lower)
    ok = (-0.1 < mean < 0.1) and (0.9 < var < 1.1) and ks <= 0.03
    report_line(10, ok, f"CLT shape at p=50,k=50: mean={mean:.4f}, var={var:.4f}, KS={ks:.4f}")
    assert -0.1 < mean < 0.1
    assert 0.9 < var < 1.1
    assert ks <= 0.03
