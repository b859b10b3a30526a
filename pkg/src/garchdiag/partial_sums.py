"""High-moment partial sum processes of residuals and their limit covariance.

A k-th order partial sum process accumulates eps_hat_t^k (raw) or
(eps_hat_t - mean)^k (centered); sampled at the grid points i/n these are
right-continuous step functions on [0, 1] starting at 0.  The CUSUM
transform subtracts the straight line u * (end value); the self-normalized
variant divides the centered process by the k-th power of the sample
standard deviation and recenters by i * lambda_k, which converges to a
Gaussian process whose covariance is an explicit three-term expression in
the standardized moments lambda_0..lambda_{2k} of the innovations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSample

MAX_MOMENT = 8


@dataclass(frozen=True)
class StepProcess:
    """Step function on [0,1]: value v_{[nu]} at u, with v_0 = 0."""

    values: np.ndarray
    n: int
    k: int
    kind: str  # "raw-S" | "centered-T" | "cusum" | "self-normalized"

    def at(self, u: float) -> float:
        if not 0.0 <= u <= 1.0:
            raise ValueError("u must be in [0, 1]")
        idx = min(int(math.floor(self.n * u)), self.n)
        return 0.0 if idx == 0 else float(self.values[idx - 1])


@dataclass(frozen=True)
class SampleStats:
    """Divisor-n moment statistics of a residual sample.

    mu_hat[k] are raw moments (index 1..8 in mu_hat[k-1]); lambda_hat
    standardizes them by sd^k.  skew and kurt are the centered versions,
    i.e. the end values of the third and fourth centered partial sum
    processes over n * sd^k.
    """

    mean: float
    var: float
    mu_hat: tuple[float, ...]
    lambda_hat: tuple[float, ...]
    nu2_hat: float
    skew: float
    kurt: float


@dataclass(frozen=True)
class GaussianCovSpec:
    """Order k and standardized moments lambda_0..lambda_{2k} of the limit
    Gaussian process of the k-th self-normalized partial sum process."""

    k: int
    lambdas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(float(v) for v in self.lambdas))
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if len(self.lambdas) != 2 * self.k + 1:
            raise ValueError(f"need lambda_0..lambda_{2 * self.k}")
        lam = self.lambdas
        if lam[0] != 1.0 or abs(lam[1]) > 1e-9 or abs(lam[2] - 1.0) > 1e-9:
            raise ValueError("unit-variance innovations require lambda_0 = 1, "
                             "lambda_1 = 0, lambda_2 = 1")


def moment_psp(eps_hat: np.ndarray, k: int) -> StepProcess:
    """Raw k-th moment partial sums: v_i = sum_{t<=i} eps_hat_t^k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    e = np.asarray(eps_hat, dtype=float)
    return StepProcess(values=np.cumsum(e**k), n=len(e), k=k, kind="raw-S")


def centered_psp(eps_hat: np.ndarray, k: int) -> StepProcess:
    """Centered partial sums: v_i = sum_{t<=i} (eps_hat_t - mean)^k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    e = np.asarray(eps_hat, dtype=float)
    return StepProcess(values=np.cumsum((e - e.mean()) ** k), n=len(e),
                       k=k, kind="centered-T")


def cusum_transform(s: StepProcess) -> StepProcess:
    """Bridge transform v_i - (i/n) v_n; the result ends at exactly 0."""
    i = np.arange(1, s.n + 1)
    values = s.values - (i / s.n) * s.values[-1]
    return StepProcess(values=values, n=s.n, k=s.k, kind="cusum")


def sample_stats(eps_hat: np.ndarray) -> SampleStats:
    """All divisor-n sample moments needed by the diagnostic statistics."""
    e = np.asarray(eps_hat, dtype=float)
    n = len(e)
    if n < 2:
        raise ValueError("need at least 2 observations")
    mean = float(e.mean())
    centered = e - mean
    var = float(np.mean(centered**2))
    if var == 0.0:
        raise DegenerateSample("sample variance of the residuals is 0")
    sd = math.sqrt(var)
    mu_hat = tuple(float(np.mean(e**k)) for k in range(1, MAX_MOMENT + 1))
    lambda_hat = tuple(mu_hat[k - 1] / sd**k for k in range(1, MAX_MOMENT + 1))
    skew = float(np.mean(centered**3)) / sd**3
    kurt = float(np.mean(centered**4)) / var**2
    nu2_hat = math.sqrt(float(np.mean((centered**2 - var) ** 2)))
    return SampleStats(mean=mean, var=var, mu_hat=mu_hat, lambda_hat=lambda_hat,
                       nu2_hat=nu2_hat, skew=skew, kurt=kurt)


def self_normalized_psp(eps_hat: np.ndarray, k: int,
                        lambda_k_ref: float) -> StepProcess:
    """Scaled and recentered process (T_n^(k)(i/n) / sd^k - i * lambda_k) / sqrt(n)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    e = np.asarray(eps_hat, dtype=float)
    n = len(e)
    centered = e - e.mean()
    var = float(np.mean(centered**2))
    if var == 0.0:
        raise DegenerateSample("sample variance of the residuals is 0")
    t_vals = np.cumsum(centered**k)
    i = np.arange(1, n + 1)
    values = (t_vals / var ** (k / 2.0) - i * lambda_k_ref) / math.sqrt(n)
    return StepProcess(values=values, n=n, k=k, kind="self-normalized")


def bk_covariance(spec: GaussianCovSpec, u: float, v: float) -> float:
    """Covariance of the order-k limit Gaussian process at times (u, v):

    (lam_{2k} - lam_k^2)(u ^ v)
      + k lam_{k-1} (k lam_{k-1} + k lam_k lam_3 - 2 lam_{k+1}) u v
      + k lam_k ((1 - k/4) lam_k + k lam_k lam_4 / 4 - lam_{k+2}) u v
    """
    if not (0.0 <= u <= 1.0 and 0.0 <= v <= 1.0):
        raise ValueError("u and v must be in [0, 1]")
    k = spec.k
    need = max(2 * k, k + 2, 4)
    lam = list(spec.lambdas) + [0.0] * (need + 1 - len(spec.lambdas))
    term_min = (lam[2 * k] - lam[k] ** 2) * min(u, v)
    term_low = k * lam[k - 1] * (k * lam[k - 1] + k * lam[k] * lam[3]
                                 - 2.0 * lam[k + 1]) * u * v
    term_high = k * lam[k] * ((1.0 - k / 4.0) * lam[k]
                              + k * lam[k] * lam[4] / 4.0 - lam[k + 2]) * u * v
    return term_min + term_low + term_high


def omnibus_variances(lambdas) -> tuple[float, float]:
    """Limit variances of the sample skewness and kurtosis end points.

    Takes lambda_0..lambda_8 and evaluates

      sigma_gamma^2 = (lam6 - lam3^2) + 3 (3 + 3 lam3^2 - 2 lam4)
                      + 3 lam3 (lam3/4 + 3 lam3 lam4 / 4 - lam5)
      sigma_kappa^2 = (lam8 - lam4^2) + 4 lam3 (4 lam3 + 4 lam3 lam4 - 2 lam5)
                      + 4 lam4 (lam4^2 - lam6)
    """
    lam = [float(v) for v in lambdas]
    if len(lam) != MAX_MOMENT + 1:
        raise ValueError("need lambda_0..lambda_8")
    if lam[0] != 1.0 or abs(lam[1]) > 1e-9 or abs(lam[2] - 1.0) > 1e-9:
        raise ValueError("unit-variance innovations require lambda_0 = 1, "
                         "lambda_1 = 0, lambda_2 = 1")
    sigma_gamma2 = ((lam[6] - lam[3] ** 2)
                    + 3.0 * (3.0 + 3.0 * lam[3] ** 2 - 2.0 * lam[4])
                    + 3.0 * lam[3] * (lam[3] / 4.0 + 3.0 * lam[3] * lam[4] / 4.0
                                      - lam[5]))
    sigma_kappa2 = ((lam[8] - lam[4] ** 2)
                    + 4.0 * lam[3] * (4.0 * lam[3] + 4.0 * lam[3] * lam[4]
                                      - 2.0 * lam[5])
                    + 4.0 * lam[4] * (lam[4] ** 2 - lam[6]))
    return sigma_gamma2, sigma_kappa2


NORMAL_LAMBDAS = (1.0, 0.0, 1.0, 0.0, 3.0, 0.0, 15.0, 0.0, 105.0)
