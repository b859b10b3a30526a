"""Structural-change and normality tests computed from GARCH residuals.

Three CUSUM statistics target a single break in the conditional mean
(first-moment partial sums) or conditional variance (second-moment partial
sums, uncentered or centered); under the no-change null each converges to
the supremum of a Brownian bridge, whose tail probabilities come from the
alternating Kolmogorov series.  The Jarque-Bera statistic and its
general-moment omnibus version test the shape of the innovation
distribution and are compared against a chi-square(2) limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import (
    CorrectionDomain,
    DegenerateNu2,
    DegenerateSample,
    DegenerateVariance,
    SeriesTooShort,
)
from .partial_sums import omnibus_variances, sample_stats

_SERIES_TOL = 1e-12
# Below this point the Brownian-bridge supremum tail is 1 to far more than
# double precision, and the alternating series converges too slowly to use.
_SMALL_X = 0.1


@dataclass(frozen=True)
class TestReport:
    """Outcome of one diagnostic test at a fixed level."""

    name: str
    statistic: float
    p_value: float
    critical_value: float
    level: float
    reject: bool
    n: int
    provenance: dict[str, Any] = field(default_factory=dict)


def sup_bb_pvalue(x: float) -> float:
    """P(sup_{0<=u<=1} |B0(u)| > x) = 2 sum_{j>=1} (-1)^(j-1) exp(-2 j^2 x^2)."""
    if x < 0.0:
        raise ValueError("x must be >= 0")
    if x < _SMALL_X:
        return 1.0
    total = 0.0
    sign = 1.0
    j = 1
    while True:
        term = math.exp(-2.0 * j * j * x * x)
        if term < _SERIES_TOL:
            break
        total += sign * term
        sign = -sign
        j += 1
    return min(max(2.0 * total, 0.0), 1.0)


def sup_bb_critical_value(level: float) -> float:
    """Upper quantile of sup|B0|: the x with sup_bb_pvalue(x) = level."""
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    lo, hi = _SMALL_X, 10.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if sup_bb_pvalue(mid) > level:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def chi2_2_pvalue(x: float) -> float:
    """Survival function of chi-square with 2 degrees of freedom: exp(-x/2)."""
    if x < 0.0:
        raise ValueError("x must be >= 0")
    return math.exp(-0.5 * x)


def chi2_2_critical_value(level: float) -> float:
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    return -2.0 * math.log(level)


def _bridge_report(name: str, deviations: np.ndarray, denom: float, n: int,
                   level: float, provenance: dict[str, Any]) -> TestReport:
    """Assemble a CUSUM report; deviations[i-1] is the numerator at 1 <= i < n."""
    stat = float(deviations.max()) / denom
    arg = int(np.argmax(deviations)) + 1
    critical = sup_bb_critical_value(level)
    provenance = dict(provenance, break_location=arg / n)
    return TestReport(
        name=name, statistic=stat, p_value=sup_bb_pvalue(stat),
        critical_value=critical, level=level, reject=stat > critical,
        n=n, provenance=provenance,
    )


def cusum_mean_test(eps_hat: np.ndarray, drop_scale: bool = False,
                    level: float = 0.05) -> TestReport:
    """Mean-change CUSUM: max_{1<=i<n} |sum_{t<=i} e_t - i e_bar| / (sd sqrt(n)).

    Since the innovations have variance 1 by model convention, the sample
    standard deviation in the denominator may be dropped (drop_scale=True).
    """
    e = np.asarray(eps_hat, dtype=float)
    n = len(e)
    if n < 2:
        raise SeriesTooShort("need at least 2 residuals")
    sd = float(np.sqrt(np.mean((e - e.mean()) ** 2)))
    if not drop_scale and sd == 0.0:
        raise DegenerateSample("sample variance of the residuals is 0")
    scale = 1.0 if drop_scale else sd
    i = np.arange(1, n)
    deviations = np.abs(np.cumsum(e)[:-1] - i * e.mean())
    return _bridge_report("cusum1", deviations, scale * math.sqrt(n), n, level,
                          {"drop_scale": drop_scale})


def _nu2_hat(e: np.ndarray) -> float:
    centered = e - e.mean()
    var = np.mean(centered**2)
    return float(np.sqrt(np.mean((centered**2 - var) ** 2)))


def cusum_var_test_1(eps_hat: np.ndarray, level: float = 0.05) -> TestReport:
    """Variance-change CUSUM from raw squares:
    max_{1<=i<n} |sum_{t<=i} e_t^2 - i * mean(e^2)| / (nu2_hat sqrt(n))."""
    e = np.asarray(eps_hat, dtype=float)
    n = len(e)
    if n < 2:
        raise SeriesTooShort("need at least 2 residuals")
    nu2 = _nu2_hat(e)
    if nu2 == 0.0:
        raise DegenerateNu2("squared residuals have zero spread")
    sq = e * e
    i = np.arange(1, n)
    deviations = np.abs(np.cumsum(sq)[:-1] - i * sq.mean())
    return _bridge_report("cusum2_1", deviations, nu2 * math.sqrt(n), n, level, {})


def cusum_var_test_2(eps_hat: np.ndarray, level: float = 0.05) -> TestReport:
    """Variance-change CUSUM from squares centered at the residual mean:
    max_{1<=i<n} |sum_{t<=i} (e_t - e_bar)^2 - i var| / (nu2_hat sqrt(n))."""
    e = np.asarray(eps_hat, dtype=float)
    n = len(e)
    if n < 2:
        raise SeriesTooShort("need at least 2 residuals")
    nu2 = _nu2_hat(e)
    if nu2 == 0.0:
        raise DegenerateNu2("squared residuals have zero spread")
    centered_sq = (e - e.mean()) ** 2
    i = np.arange(1, n)
    deviations = np.abs(np.cumsum(centered_sq)[:-1] - i * centered_sq.mean())
    return _bridge_report("cusum2_2", deviations, nu2 * math.sqrt(n), n, level, {})


def jb_corrected_critical_value(n: int) -> float:
    """Finite-sample 5% critical value 5.991645 - 15.17 n^-1/2 + 345.9 n^-1
    - 3110.8 n^-3/2, valid for n >= 100."""
    if n < 100:
        raise CorrectionDomain(f"correction polynomial needs n >= 100, got {n}")
    rn = math.sqrt(n)
    return 5.991645 - 15.17 / rn + 345.9 / n - 3110.8 / (n * rn)


def jarque_bera(eps_hat: np.ndarray, level: float = 0.05,
                finite_sample_correction: bool = False) -> TestReport:
    """JB = (n/6) skew^2 + (n/24) (kurt - 3)^2 against a chi-square(2) limit.

    With finite_sample_correction the 5% critical value is replaced by its
    small-sample polynomial approximation (n >= 100 only).
    """
    e = np.asarray(eps_hat, dtype=float)
    n = len(e)
    if n < 4:
        raise SeriesTooShort(f"need at least 4 residuals, got {n}")
    if finite_sample_correction:
        if abs(level - 0.05) > 1e-12:
            raise ValueError("the finite-sample correction is tabulated at level 0.05")
        critical = jb_corrected_critical_value(n)
    else:
        critical = chi2_2_critical_value(level)
    stats = sample_stats(e)
    jb = n / 6.0 * stats.skew**2 + n / 24.0 * (stats.kurt - 3.0) ** 2
    return TestReport(
        name="jb", statistic=jb, p_value=chi2_2_pvalue(jb),
        critical_value=critical, level=level, reject=jb > critical, n=n,
        provenance={"skew": stats.skew, "kurt": stats.kurt,
                    "finite_sample_correction": finite_sample_correction},
    )


def omnibus(eps_hat: np.ndarray, lambda3: float, lambda4: float,
            lambda_higher, level: float = 0.05) -> TestReport:
    """Moment-based shape test against a reference distribution:

        (n / sigma_gamma^2) (skew - lambda3)^2
          + (n / sigma_kappa^2) (kurt - lambda4)^2  ->  chi-square(2),

    with the two variances computed from the reference standardized moments
    lambda3, lambda4 and lambda_higher = (lambda5..lambda8).  With normal
    moments this is exactly the Jarque-Bera statistic.
    """
    lam5, lam6, lam7, lam8 = (float(v) for v in lambda_higher)
    lam = (1.0, 0.0, 1.0, float(lambda3), float(lambda4), lam5, lam6, lam7, lam8)
    sigma_gamma2, sigma_kappa2 = omnibus_variances(lam)
    if sigma_gamma2 <= 0.0 or sigma_kappa2 <= 0.0:
        raise DegenerateVariance(
            f"sigma_gamma^2 = {sigma_gamma2:.6g}, sigma_kappa^2 = {sigma_kappa2:.6g}"
        )
    e = np.asarray(eps_hat, dtype=float)
    n = len(e)
    if n < 8:
        raise SeriesTooShort(f"need at least 8 residuals, got {n}")
    stats = sample_stats(e)
    value = (n / sigma_gamma2 * (stats.skew - lambda3) ** 2
             + n / sigma_kappa2 * (stats.kurt - lambda4) ** 2)
    critical = chi2_2_critical_value(level)
    return TestReport(
        name="omnibus", statistic=value, p_value=chi2_2_pvalue(value),
        critical_value=critical, level=level, reject=value > critical, n=n,
        provenance={"skew": stats.skew, "kurt": stats.kurt,
                    "lambda3": lambda3, "lambda4": lambda4,
                    "sigma_gamma2": sigma_gamma2, "sigma_kappa2": sigma_kappa2},
    )
