"""Gaussian quasi-maximum likelihood fitting of GARCH(p,q) coefficients.

The criterion is the Gaussian log likelihood evaluated on the truncated
conditional-variance path,

    l(u) = -1/2 * sum_{t=1}^{n} [ log sigma_hat_t^2(u) + X_t^2 / sigma_hat_t^2(u) ],

maximized by a Nelder-Mead simplex search on transformed coordinates that
keep every candidate inside the parameter space: log for the alpha block and
a logit reparametrization of the beta block's total (split across lags by a
softmax), so sum(beta) stays below rho0 without penalty terms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit, logit

from .core import DEFAULT_SPACE, GarchParams, ParameterSpace
from .errors import SeriesTooShort
from .variance import sigma2_hat_path

_FRAC_EPS = 1e-12


def quasi_log_likelihood(u: GarchParams, x: np.ndarray) -> float:
    """Gaussian quasi log likelihood of the series under coefficients u."""
    x = np.asarray(x, dtype=float)
    s2 = sigma2_hat_path(u, x)
    obs = x[1:]
    return -0.5 * float(np.sum(np.log(s2) + obs * obs / s2))


@dataclass(frozen=True)
class FitOptions:
    """Optimizer settings; the defaults match the documented search recipe."""

    restarts: int = 3
    max_evals_per_restart: int = 2000
    f_tol: float = 1e-8
    x_tol: float = 1e-8
    restart_seed: int = 0
    perturb_scale: float = 0.5


DEFAULT_FIT_OPTIONS = FitOptions()


@dataclass(frozen=True)
class FitResult:
    theta_hat: GarchParams
    loglik: float
    iterations: int
    converged: bool
    n: int


def default_init(x: np.ndarray, p: int, q: int,
                 space: ParameterSpace = DEFAULT_SPACE) -> GarchParams:
    """Standard starting point: alpha0 at a tenth of the sample variance,
    flat small ARCH weights, and persistence 0.8 spread over the beta lags."""
    x = np.asarray(x, dtype=float)
    var = float(np.var(x))
    lo, hi = space.lower, space.upper
    alpha0 = min(max(0.1 * var, 100.0 * lo), 0.1 * hi)
    alpha = (0.05 / p,) * p if p else ()
    beta_total = min(0.8, 0.9 * space.rho0)
    beta = (beta_total / q,) * q if q else ()
    return GarchParams(alpha0, alpha, beta)


def _to_unconstrained(params: GarchParams, space: ParameterSpace) -> np.ndarray:
    lo, hi = space.lower, space.upper
    z_alpha = np.log(np.clip([params.alpha0, *params.alpha], lo, hi))
    q = params.q
    if q == 0:
        return z_alpha
    span = space.rho0 - q * lo
    total = sum(params.beta)
    frac = np.clip((total - q * lo) / span, _FRAC_EPS, 1.0 - _FRAC_EPS)
    excess = np.maximum(np.asarray(params.beta) - lo, 1e-300)
    z_beta = [logit(frac)] + [float(np.log(excess[j] / excess[0])) for j in range(1, q)]
    return np.concatenate([z_alpha, z_beta])


def _from_unconstrained(z: np.ndarray, p: int, q: int,
                        space: ParameterSpace) -> GarchParams:
    lo, hi = space.lower, space.upper
    a = np.clip(np.exp(z[: 1 + p]), lo, hi)
    if q == 0:
        return GarchParams(a[0], tuple(a[1:]), ())
    span = space.rho0 - q * lo
    total_excess = span * expit(z[1 + p])
    w = np.concatenate([[0.0], z[2 + p :]])
    w = np.exp(w - w.max())
    beta = lo + total_excess * w / w.sum()
    return GarchParams(a[0], tuple(a[1:]), tuple(beta))


def fit(x: np.ndarray, init: GarchParams | None = None, *, p: int = 1, q: int = 1,
        space: ParameterSpace = DEFAULT_SPACE,
        opts: FitOptions = DEFAULT_FIT_OPTIONS) -> FitResult:
    """Maximize the quasi log likelihood over the parameter space.

    Runs a bounded Nelder-Mead search from the initial point plus
    opts.restarts - 1 randomly perturbed copies of it (deterministic given
    opts.restart_seed) and keeps the best end point.  A search that exhausts
    its evaluation budget is reported through converged=False rather than an
    exception, so batch studies can keep the partial fit.
    """
    x = np.asarray(x, dtype=float)
    n = len(x) - 1
    if n < 50:
        raise SeriesTooShort(f"refusing to fit on n = {n} < 50")
    if init is None:
        init = default_init(x, p, q, space)
    else:
        p, q = init.p, init.q

    def objective(z: np.ndarray) -> float:
        value = quasi_log_likelihood(_from_unconstrained(z, p, q, space), x)
        return -value if np.isfinite(value) else np.inf

    rng = np.random.default_rng(opts.restart_seed)
    z0 = _to_unconstrained(init, space)
    starts = [z0]
    for _ in range(opts.restarts - 1):
        starts.append(z0 + opts.perturb_scale * rng.standard_normal(len(z0)))

    best = None
    total_evals = 0
    for z_start in starts:
        res = minimize(
            objective, z_start, method="Nelder-Mead",
            options={
                "maxfev": opts.max_evals_per_restart,
                "fatol": opts.f_tol,
                "xatol": opts.x_tol,
            },
        )
        total_evals += res.nfev
        if best is None or res.fun < best.fun:
            best = res

    theta_hat = _from_unconstrained(best.x, p, q, space)
    return FitResult(
        theta_hat=theta_hat,
        loglik=quasi_log_likelihood(theta_hat, x),
        iterations=total_evals,
        converged=bool(best.success),
        n=n,
    )
