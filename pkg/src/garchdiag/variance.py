"""Moving-average form of the conditional variance, residuals, and the
gradient of the log conditional variance.

For a coefficient vector u = (s_0..s_p, t_1..t_q) with sum(t) < 1 the
conditional variance has the representation

    sigma_t^2(u) = c_0(u) + sum_{i>=1} c_i(u) X_{t-i}^2,

where c_0 = s_0 / (1 - sum(t)) and, for i >= 1,

    c_i = s_i * 1{i <= p} + sum_{j=1}^{min(q, i-1)} t_j c_{i-j}.

With only X_0..X_n observed, the sum is truncated at lag t, which defines
the estimated variance path and the residuals eps_hat_t = X_t / sigma_hat_t.
The c_i decay geometrically, so the path computation additionally drops all
lags beyond the point where they stop mattering at double precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .core import DEFAULT_SPACE, GarchParams, ParameterSpace, validate_params
from .errors import BetaSumAtLeastOne, SeriesTooShort, StepTooLarge

# Lags with c_i below this fraction of c_0 contribute nothing at double
# precision (sigma_hat^2 >= c_0 always).
HORIZON_RTOL = 1e-14


@dataclass(frozen=True)
class CoefficientVector:
    """Coefficients c_0..c_m of the moving-average variance representation."""

    c: np.ndarray
    params_used: GarchParams

    @property
    def m(self) -> int:
        return len(self.c) - 1


@dataclass(frozen=True)
class ResidualSeries:
    """Residuals eps_hat_1..eps_hat_n with the variance path that made them."""

    eps_hat: np.ndarray
    sigma2_hat: np.ndarray
    theta_hat: GarchParams
    x_ref: np.ndarray

    @property
    def n(self) -> int:
        return len(self.eps_hat)


@dataclass(frozen=True)
class PsiEstimate:
    """Ergodic average of the log-variance gradient over a sample path."""

    psi: np.ndarray
    n_used: int


def c_coefficients(params: GarchParams, m: int) -> CoefficientVector:
    """Compute c_0..c_m for the given coefficient vector.

    The orders p and q pick the applicable start-up equations; past
    R = max(p, q) every coefficient satisfies the pure q-lag linear
    recursion, which is what lfilter evaluates here in one pass.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    beta_sum = sum(params.beta)
    if beta_sum >= 1.0:
        raise BetaSumAtLeastOne(f"sum(beta) = {beta_sum:.6g} >= 1")
    c0 = params.alpha0 / (1.0 - beta_sum)
    c = np.empty(m + 1)
    c[0] = c0
    if m > 0:
        b = np.asarray(params.alpha, dtype=float)
        if len(b) == 0:
            b = np.zeros(1)
        a = np.concatenate(([1.0], -np.asarray(params.beta, dtype=float)))
        impulse = np.zeros(m)
        impulse[0] = 1.0
        c[1:] = lfilter(b, a, impulse)
    return CoefficientVector(c=c, params_used=params)


def _horizon(c: np.ndarray, p: int, q: int) -> int:
    """Index of the last lag worth keeping in the truncated variance sum.

    Truncating is safe once a full window of q consecutive coefficients sits
    below the tolerance: every later coefficient is a sub-unit combination of
    that window, hence also below it.
    """
    m = len(c) - 1
    r = max(p, q)
    if m <= r:
        return m
    tol = HORIZON_RTOL * c[0]
    window = max(q, 1)
    below = (c < tol).astype(np.int64)
    below[0] = 0
    counts = np.cumsum(below)
    # all of c[i-window+1 .. i] below tol, for i > r
    start = max(r + 1, window)
    idx = np.arange(start, m + 1)
    full = counts[idx] - counts[idx - window] == window
    hits = np.nonzero(full)[0]
    if len(hits) == 0:
        return m
    return int(idx[hits[0]])


def sigma2_hat_path(theta_hat: GarchParams, x: np.ndarray) -> np.ndarray:
    """Truncated conditional-variance path sigma_hat^2_1..sigma_hat^2_n.

    sigma_hat^2_t = c_0 + sum_{i=1}^{t} c_i X_{t-i}^2 using only the observed
    history X_0..X_{t-1}.
    """
    x = np.asarray(x, dtype=float)
    n = len(x) - 1
    if n < 1:
        raise SeriesTooShort("need X_0 plus at least one observation")
    cv = c_coefficients(theta_hat, n)
    h = _horizon(cv.c, theta_hat.p, theta_hat.q)
    kernel = np.zeros(h + 1)
    kernel[1:] = cv.c[1 : h + 1]
    conv = np.convolve(x * x, kernel)[: n + 1]
    return cv.c[0] + conv[1:]


def residuals(theta_hat: GarchParams, x: np.ndarray) -> ResidualSeries:
    """Residuals eps_hat_t = X_t / sigma_hat_t, t = 1..n."""
    x = np.asarray(x, dtype=float)
    s2 = sigma2_hat_path(theta_hat, x)
    return ResidualSeries(
        eps_hat=x[1:] / np.sqrt(s2), sigma2_hat=s2, theta_hat=theta_hat, x_ref=x
    )


def _perturbed(params: GarchParams, coord: int, delta: float) -> GarchParams:
    values = params.as_array()
    values[coord] += delta
    return GarchParams.from_array(values, params.p, params.q)


def _log_sigma2_grad_matrix(theta: GarchParams, x: np.ndarray, step: float,
                            space: ParameterSpace) -> np.ndarray:
    """Central-difference gradient of log sigma_hat^2_t, all t at once.

    Returns an (n, p+q+1) matrix in the coordinate order
    (alpha0, alpha_1..alpha_p, beta_1..beta_q).  Steps are relative:
    h_i = step * theta_i.
    """
    x = np.asarray(x, dtype=float)
    n = len(x) - 1
    d = 1 + theta.p + theta.q
    grad = np.empty((n, d))
    values = theta.as_array()
    for i in range(d):
        h = step * values[i]
        if h <= 0.0:
            raise StepTooLarge(f"coordinate {i} of theta is not positive")
        try:
            up = validate_params(_perturbed(theta, i, h), space)
            down = validate_params(_perturbed(theta, i, -h), space)
        except Exception as exc:
            raise StepTooLarge(
                f"theta +/- step leaves the parameter space at coordinate {i}: {exc}"
            ) from exc
        grad[:, i] = (
            np.log(sigma2_hat_path(up, x)) - np.log(sigma2_hat_path(down, x))
        ) / (2.0 * h)
    return grad


def grad_log_sigma2(theta: GarchParams, x: np.ndarray, t: int,
                    step: float = 1e-6,
                    space: ParameterSpace = DEFAULT_SPACE) -> np.ndarray:
    """Finite-difference gradient of log sigma_hat^2_t at theta."""
    x = np.asarray(x, dtype=float)
    n = len(x) - 1
    if not 1 <= t <= n:
        raise ValueError(f"t must be in 1..{n}")
    return _log_sigma2_grad_matrix(theta, x, step, space)[t - 1]


def estimate_psi(theta_hat: GarchParams, x: np.ndarray, step: float = 1e-6,
                 warmup: int = 100,
                 space: ParameterSpace = DEFAULT_SPACE) -> PsiEstimate:
    """Average the log-variance gradient over t > warmup.

    The truncated representation differs from the stationary one at small t,
    so an initial stretch is discarded before taking the ergodic average.
    """
    x = np.asarray(x, dtype=float)
    n = len(x) - 1
    if n <= warmup:
        raise SeriesTooShort(f"need more than {warmup} observations, got {n}")
    grad = _log_sigma2_grad_matrix(theta_hat, x, step, space)
    retained = grad[warmup:]
    return PsiEstimate(psi=retained.mean(axis=0), n_used=len(retained))
