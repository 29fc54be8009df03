"""Scalar special functions used by the covariance-equality tests.

Everything here is pure and reentrant: log-gamma, digamma/trigamma,
the variance building blocks xi/eta, the multivariate log-gamma, and
chi-square / standard-normal distribution functions with their
(upper-tail) quantiles.
"""

from __future__ import annotations

import math

__all__ = [
    "ln_gamma",
    "digamma",
    "trigamma",
    "xi",
    "eta",
    "ln_multigamma",
    "chisq_cdf",
    "chisq_quantile",
    "normal_cdf",
    "normal_quantile",
]

_LN_PI = math.log(math.pi)
_LN_2PI = math.log(2.0 * math.pi)

# Upward-recurrence shift thresholds.  With the 4-term asymptotic series
# below, truncation error at the threshold is <1e-13 (next omitted terms
# are 1/(240 x^8) for psi and 1/(42 x^7) for psi').
_DIGAMMA_SHIFT = 22.0
_TRIGAMMA_SHIFT = 44.0

# Small-argument crossover for eta; both branches agree to ~1e-13 there.
_ETA_TAYLOR_CUTOFF = 1e-4

# Regularized incomplete gamma: convergence tolerance and iteration cap.
_GAMMAINC_TOL = 1e-15
_GAMMAINC_MAXITER = 10**6


def _require_positive(x: float, name: str) -> None:
    if not (x > 0.0) or math.isinf(x):
        raise ValueError(f"{name} must be a positive finite real, got {x!r}")


def ln_gamma(x: float) -> float:
    """log Gamma(x) for x > 0."""
    _require_positive(x, "x")
    return math.lgamma(x)


def digamma(x: float) -> float:
    """psi(x) = d log Gamma(x) / dx for x > 0.

    Upward recurrence psi(x) = psi(x+1) - 1/x until the argument clears
    the shift threshold, then the asymptotic series
    log x - 1/(2x) - 1/(12x^2) + 1/(120x^4) - 1/(252x^6).
    """
    _require_positive(x, "x")
    # Compensated accumulation: the recurrence terms can span many
    # orders of magnitude when x is tiny.
    shift = 0.0
    comp = 0.0
    while x < _DIGAMMA_SHIFT:
        term = -1.0 / x
        y = term - comp
        t = shift + y
        comp = (t - shift) - y
        shift = t
        x += 1.0
    u = 1.0 / (x * x)
    series = math.log(x) - 0.5 / x - u * (
        1.0 / 12.0 - u * (1.0 / 120.0 - u / 252.0)
    )
    return shift + series


def trigamma(x: float) -> float:
    """psi'(x) for x > 0.

    Recurrence psi'(x) = psi'(x+1) + 1/x^2 plus the asymptotic series
    1/x + 1/(2x^2) + 1/(6x^3) - 1/(30x^5).
    """
    _require_positive(x, "x")
    shift = 0.0
    comp = 0.0
    while x < _TRIGAMMA_SHIFT:
        term = 1.0 / (x * x)
        y = term - comp
        t = shift + y
        comp = (t - shift) - y
        shift = t
        x += 1.0
    u = 1.0 / x
    u2 = u * u
    series = u + 0.5 * u2 + u * u2 * (1.0 / 6.0 - u2 / 30.0)
    return shift + series


def xi(x: float) -> float:
    """xi(x) = -2(log(1-x) + x) on [0, 1); nonnegative."""
    if not (0.0 <= x < 1.0):
        raise ValueError(f"x must lie in [0, 1), got {x!r}")
    return -2.0 * (math.log1p(-x) + x) + 0.0


def eta(x: float) -> float:
    """eta(x) = xi(x)/x^2 on [0, 1); eta(0) = 1, increasing."""
    if not (0.0 <= x < 1.0):
        raise ValueError(f"x must lie in [0, 1), got {x!r}")
    if x < _ETA_TAYLOR_CUTOFF:
        # xi(x) = x^2 + (2/3)x^3 + (1/2)x^4 + (2/5)x^5 + ...
        return 1.0 + x * (2.0 / 3.0 + x * (0.5 + x * (2.0 / 5.0)))
    return xi(x) / (x * x)


def ln_multigamma(q: int, z: float) -> float:
    """log of the q-variate gamma function at real z > (q-1)/2.

    Gamma_q(z) = pi^(q(q-1)/4) * prod_{i=1}^{q} Gamma(z - (i-1)/2).
    """
    if q < 1 or q != int(q):
        raise ValueError(f"q must be a positive integer, got {q!r}")
    if not (z > (q - 1) / 2.0):
        raise ValueError(f"z must exceed (q-1)/2 = {(q - 1) / 2.0}, got {z!r}")
    total = 0.25 * q * (q - 1) * _LN_PI
    for i in range(q):
        total += math.lgamma(z - 0.5 * i)
    return total


def _ln_gamma_prefactor(a: float, t: float) -> float:
    """log(t^a e^-t / Gamma(a)), stable against cancellation for large a."""
    if a < 30.0:
        return a * math.log(t) - t - math.lgamma(a)
    # a*log(t) - t - lgamma(a) = a*(log1p(d) - d) - 0.5*log(2*pi/a) - R(a)
    # with d = t/a - 1 and R(a) the Stirling-series remainder.
    d = (t - a) / a
    core = a * (math.log1p(d) - d)
    ia = 1.0 / a
    ia2 = ia * ia
    remainder = ia * (1.0 / 12.0 - ia2 * (1.0 / 360.0 - ia2 / 1260.0))
    return core - 0.5 * (_LN_2PI - math.log(a)) - remainder


def _reg_lower_gamma(a: float, t: float) -> float:
    """Regularized lower incomplete gamma P(a, t), clamped to [0, 1].

    Series expansion for t < a + 1, Lentz continued fraction otherwise.
    """
    if t <= 0.0:
        return 0.0
    ln_pre = _ln_gamma_prefactor(a, t)
    if t < a + 1.0:
        ap = a
        term = 1.0 / a
        total = term
        for _ in range(_GAMMAINC_MAXITER):
            ap += 1.0
            term *= t / ap
            total += term
            if abs(term) < abs(total) * _GAMMAINC_TOL:
                break
        p = total * math.exp(ln_pre)
    else:
        tiny = 1e-300
        b = t + 1.0 - a
        c = 1.0 / tiny
        d = 1.0 / b
        h = d
        for i in range(1, _GAMMAINC_MAXITER + 1):
            an = -i * (i - a)
            b += 2.0
            d = an * d + b
            if abs(d) < tiny:
                d = tiny
            c = b + an / c
            if abs(c) < tiny:
                c = tiny
            d = 1.0 / d
            step = d * c
            h *= step
            if abs(step - 1.0) < _GAMMAINC_TOL:
                break
        p = 1.0 - math.exp(ln_pre) * h
    return min(1.0, max(0.0, p))


def chisq_cdf(f: float, x: float) -> float:
    """P(X <= x) for X ~ chi-square with f > 0 degrees of freedom."""
    if not (f > 0.0) or math.isinf(f):
        raise ValueError(f"degrees of freedom must be positive, got {f!r}")
    if x <= 0.0:
        return 0.0
    return _reg_lower_gamma(0.5 * f, 0.5 * x)


def _chisq_pdf(f: float, x: float) -> float:
    if x <= 0.0:
        return 0.0
    a = 0.5 * f
    t = 0.5 * x
    return 0.5 * math.exp(_ln_gamma_prefactor(a, t) - math.log(t))


def chisq_quantile(f: float, alpha: float) -> float:
    """Upper alpha-level quantile: x with chisq_cdf(f, x) = 1 - alpha.

    Wilson-Hilferty start, Newton refinement, bisection fallback.
    """
    if not (f > 0.0) or math.isinf(f):
        raise ValueError(f"degrees of freedom must be positive, got {f!r}")
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    target = 1.0 - alpha

    lo = 0.0
    hi = f + 40.0 * math.sqrt(2.0 * f) + 100.0
    for _ in range(60):
        if chisq_cdf(f, hi) > target:
            break
        lo = hi
        hi *= 2.0

    z = normal_quantile(alpha)
    c = 2.0 / (9.0 * f)
    x = f * (1.0 - c + z * math.sqrt(c)) ** 3
    if not (lo < x < hi):
        x = 0.5 * (lo + hi)

    for _ in range(200):
        err = chisq_cdf(f, x) - target
        if err > 0.0:
            hi = x
        else:
            lo = x
        if abs(err) < 1e-13:
            break
        pdf = _chisq_pdf(f, x)
        step_ok = False
        if pdf > 0.0:
            nxt = x - err / pdf
            if lo < nxt < hi:
                step_ok = True
        if not step_ok:
            nxt = 0.5 * (lo + hi)
        if nxt == x or hi - lo < 1e-14 * max(1.0, x):
            break
        x = nxt
    return x


def normal_cdf(x: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _normal_sf(x: float) -> float:
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def _normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


# Wichura's PPND16 rational approximations for the standard normal
# inverse CDF (AS 241); absolute error below 1e-9 over (0, 1).
_PPND_A = (
    3.3871328727963666080e0,
    1.3314166789178437745e2,
    1.9715909503065514427e3,
    1.3731693765509461125e4,
    4.5921953931549871457e4,
    6.7265770927008700853e4,
    3.3430575583588128105e4,
    2.5090809287301226727e3,
)
_PPND_B = (
    1.0,
    4.2313330701600911252e1,
    6.8718700749205790830e2,
    5.3941960214247511077e3,
    2.1213794301586595867e4,
    3.9307895800092710610e4,
    2.8729085735721942674e4,
    5.2264952788528545610e3,
)
_PPND_C = (
    1.42343711074968357734e0,
    4.63033784615654529590e0,
    5.76949722146069140550e0,
    3.64784832476320460504e0,
    1.27045825245236838258e0,
    2.41780725177450611770e-1,
    2.27238449892691845833e-2,
    7.74545014278341407640e-4,
)
_PPND_D = (
    1.0,
    2.05319162663775882187e0,
    1.67638483018380384940e0,
    6.89767334985100004550e-1,
    1.48103976427480074590e-1,
    1.51986665636164571966e-2,
    5.47593808499534494600e-4,
    1.05075007164441684324e-9,
)
_PPND_E = (
    6.65790464350110377720e0,
    5.46378491116411436990e0,
    1.78482653991729133580e0,
    2.96560571828504891230e-1,
    2.65321895265761230930e-2,
    1.24266094738807843860e-3,
    2.71155556874348757815e-5,
    2.01033439929228813265e-7,
)
_PPND_F = (
    1.0,
    5.99832206555887937690e-1,
    1.36929880922735805310e-1,
    1.48753612908506148525e-2,
    7.86869131145613259100e-4,
    1.84631831751005468180e-5,
    1.42151175831644588870e-7,
    2.04426310338993978564e-15,
)


def _poly(coeffs, r: float) -> float:
    acc = coeffs[7]
    for c in (coeffs[6], coeffs[5], coeffs[4], coeffs[3], coeffs[2], coeffs[1], coeffs[0]):
        acc = acc * r + c
    return acc


def norm_ppf(u: float) -> float:
    """Inverse standard normal CDF on (0, 1) (AS 241, PPND16)."""
    q = u - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _poly(_PPND_A, r) / _poly(_PPND_B, r)
    r = u if q < 0.0 else 1.0 - u
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        val = _poly(_PPND_C, r) / _poly(_PPND_D, r)
    else:
        r -= 5.0
        val = _poly(_PPND_E, r) / _poly(_PPND_F, r)
    return -val if q < 0.0 else val


def normal_quantile(alpha: float) -> float:
    """Upper-tail critical value: z with Phi(z) = 1 - alpha."""
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    z = -norm_ppf(alpha)
    # Two Newton corrections on the upper-tail probability.
    for _ in range(2):
        pdf = _normal_pdf(z)
        if pdf <= 0.0:
            break
        z += (_normal_sf(z) - alpha) / pdf
    return z
