"""GARCH(p,q) parameters, parameter space, and path simulation.

The model is X_t = sigma_t * eps_t with

    sigma_t^2 = alpha0 + sum_i alpha_i X_{t-i}^2 + sum_j beta_j sigma_{t-j}^2,

driven by i.i.d. innovations with mean 0 and variance 1.  Besides the
stationary null model, two single-break alternatives can be simulated: a
level shift in the conditional mean and a switch of the coefficient vector
(conditional-variance change), both at a fractional break point u* of the
sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BetaSumExceedsRho0,
    DofTooSmall,
    NegativeCoefficient,
    NonstationaryParams,
    OutsideBox,
)

NORMAL = "standard-normal"
STUDENT_T = "standardized-student-t"


@dataclass(frozen=True)
class GarchParams:
    """Coefficient vector (alpha0, alpha_1..alpha_p, beta_1..beta_q).

    The container itself is deliberately permissive: admissibility (positive
    alpha0, nonnegative coefficients, box and rho0 constraints) is enforced
    by :func:`validate_params`, so that rejection tests can construct
    inadmissible vectors.
    """

    alpha0: float
    alpha: tuple[float, ...] = ()
    beta: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "alpha0", float(self.alpha0))
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        for v in (self.alpha0, *self.alpha, *self.beta):
            if not math.isfinite(v):
                raise ValueError(f"non-finite coefficient {v!r}")

    @property
    def p(self) -> int:
        return len(self.alpha)

    @property
    def q(self) -> int:
        return len(self.beta)

    @property
    def persistence(self) -> float:
        return sum(self.alpha) + sum(self.beta)

    def as_array(self) -> np.ndarray:
        """Coefficients in the fixed order (alpha0, alpha_1.., beta_1..)."""
        return np.array([self.alpha0, *self.alpha, *self.beta], dtype=float)

    @classmethod
    def from_array(cls, values, p: int, q: int) -> "GarchParams":
        values = [float(v) for v in values]
        if len(values) != 1 + p + q:
            raise ValueError(f"expected {1 + p + q} coefficients, got {len(values)}")
        return cls(values[0], tuple(values[1 : 1 + p]), tuple(values[1 + p :]))

    def unconditional_variance(self) -> float:
        """alpha0 / (1 - sum(alpha) - sum(beta)); requires persistence < 1."""
        if self.persistence >= 1.0:
            raise NonstationaryParams(
                f"sum(alpha) + sum(beta) = {self.persistence:.6g} >= 1"
            )
        return self.alpha0 / (1.0 - self.persistence)

    def coordinate_names(self) -> list[str]:
        return (
            ["alpha0"]
            + [f"alpha[{i}]" for i in range(1, self.p + 1)]
            + [f"beta[{j}]" for j in range(1, self.q + 1)]
        )


@dataclass(frozen=True)
class ParameterSpace:
    """Box constraints for admissible coefficient vectors.

    Every coordinate must lie strictly inside (lower, upper) and the beta
    coefficients must sum to at most rho0 < 1.  The defaults are wide enough
    to admit any coefficient vector a volatility fit on return data plausibly
    produces.
    """

    rho0: float = 0.999
    lower: float = 1e-8
    upper: float = 10.0

    def __post_init__(self):
        if not (0.0 < self.lower < self.upper):
            raise ValueError("need 0 < lower < upper")
        if not (0.0 < self.rho0 < 1.0):
            raise ValueError("need 0 < rho0 < 1")


DEFAULT_SPACE = ParameterSpace()


@dataclass(frozen=True)
class InnovationSpec:
    """Innovation distribution: standard normal or Student-t scaled to unit
    variance (raw t(dof) draws are multiplied by sqrt((dof-2)/dof))."""

    family: str = NORMAL
    dof: float | None = None

    def __post_init__(self):
        if self.family not in (NORMAL, STUDENT_T):
            raise ValueError(f"unknown innovation family {self.family!r}")
        if self.family == STUDENT_T:
            if self.dof is None:
                raise ValueError("Student-t innovations need dof")
            if self.dof <= 2.0:
                raise DofTooSmall(f"dof = {self.dof} <= 2; variance cannot be 1")

    @classmethod
    def normal(cls) -> "InnovationSpec":
        return cls(NORMAL)

    @classmethod
    def student_t(cls, dof: float) -> "InnovationSpec":
        return cls(STUDENT_T, float(dof))


@dataclass(frozen=True)
class NullScenario:
    label = "null"


@dataclass(frozen=True)
class MeanChange:
    """Level shift mu added to X_t for t > [n * u_star]."""

    mu: float
    u_star: float
    label = "mean-change"

    def __post_init__(self):
        if not 0.0 < self.u_star < 1.0:
            raise ValueError("u_star must be in (0, 1)")


@dataclass(frozen=True)
class VarianceChange:
    """Coefficient vector switches to theta_prime for t > [n * u_star]."""

    theta_prime: GarchParams
    u_star: float
    label = "variance-change"

    def __post_init__(self):
        if not 0.0 < self.u_star < 1.0:
            raise ValueError("u_star must be in (0, 1)")


@dataclass(frozen=True)
class SimulatedPath:
    """Aligned arrays X_0..X_n, sigma^2_0..sigma^2_n, eps_0..eps_n."""

    x: np.ndarray
    sigma2: np.ndarray
    eps: np.ndarray
    scenario: NullScenario | MeanChange | VarianceChange
    seed: int

    @property
    def n(self) -> int:
        return len(self.x) - 1


def validate_params(params: GarchParams, space: ParameterSpace = DEFAULT_SPACE) -> GarchParams:
    """Check that params lie strictly inside the space; return them unchanged.

    Raises NegativeCoefficient, OutsideBox, or BetaSumExceedsRho0, each naming
    the offending coordinate.
    """
    if params.q * space.lower >= space.rho0:
        raise ValueError("space too tight: q * lower must be < rho0")
    names = params.coordinate_names()
    values = params.as_array()
    for name, v in zip(names, values):
        if v < 0.0:
            raise NegativeCoefficient(f"{name} = {v:.6g} < 0")
    for name, v in zip(names, values):
        if not (space.lower < v < space.upper):
            raise OutsideBox(
                f"{name} = {v:.6g} outside ({space.lower:.6g}, {space.upper:.6g})"
            )
    beta_sum = sum(params.beta)
    if beta_sum > space.rho0:
        raise BetaSumExceedsRho0(f"sum(beta) = {beta_sum:.6g} > rho0 = {space.rho0:.6g}")
    return params


def sample_innovations(spec: InnovationSpec, n: int, seed: int) -> np.ndarray:
    """Draw n i.i.d. unit-variance innovations, deterministic given seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    if spec.family == NORMAL:
        return rng.standard_normal(n)
    return rng.standard_t(spec.dof, size=n) * math.sqrt((spec.dof - 2.0) / spec.dof)


def break_index(n: int, u_star: float) -> int:
    """Last time index governed by the pre-break regime: [n * u_star]."""
    return int(math.floor(n * u_star))


def _recurse(theta: GarchParams, theta_post: GarchParams | None,
             switch_after: int, eps: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Run the variance recursion over the whole eps array.

    The recursion starts at the unconditional variance of theta, with missing
    X lags treated as 0 and missing sigma^2 lags as that same unconditional
    variance.  From global step switch_after + 1 on, the coefficients of
    theta_post apply (the sigma^2 state carries across the switch).
    """
    v0 = theta.unconditional_variance()
    total = len(eps)
    x = np.empty(total)
    s2 = np.empty(total)
    for t in range(total):
        th = theta if (theta_post is None or t <= switch_after) else theta_post
        if t == 0:
            v = v0
        else:
            v = th.alpha0
            for i, a in enumerate(th.alpha, start=1):
                if t - i >= 0:
                    v += a * x[t - i] * x[t - i]
            for j, b in enumerate(th.beta, start=1):
                v += b * (s2[t - j] if t - j >= 0 else v0)
        s2[t] = v
        x[t] = math.sqrt(v) * eps[t]
    return x, s2


def simulate(params: GarchParams, spec: InnovationSpec, n: int,
             burn_in: int = 1000, seed: int = 0) -> SimulatedPath:
    """Simulate X_0..X_n under the null model.

    burn_in initial steps are generated and discarded so that the retained
    stretch is close to the strictly stationary solution.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    eps = sample_innovations(spec, burn_in + n + 1, seed)
    x, s2 = _recurse(params, None, 0, eps)
    return SimulatedPath(
        x=x[burn_in:], sigma2=s2[burn_in:], eps=eps[burn_in:],
        scenario=NullScenario(), seed=seed,
    )


def simulate_mean_change(params: GarchParams, spec: InnovationSpec, mu: float,
                         u_star: float, n: int, burn_in: int = 1000,
                         seed: int = 0) -> SimulatedPath:
    """Simulate a path with X_t shifted by mu for t > [n * u_star].

    The variance recursion is driven by the centered values, i.e. a lagged
    observation enters as (X_{t-i} - mu)^2 exactly when it is itself
    post-break; pre-break lags enter uncentered.  Equivalently, the null path
    is simulated and mu is added to the post-break observations.
    """
    scenario = MeanChange(mu=float(mu), u_star=float(u_star))
    base = simulate(params, spec, n, burn_in=burn_in, seed=seed)
    k = break_index(n, u_star)
    x = base.x.copy()
    x[k + 1 :] += mu
    return SimulatedPath(x=x, sigma2=base.sigma2, eps=base.eps,
                         scenario=scenario, seed=seed)


def simulate_variance_change(params: GarchParams, params_prime: GarchParams,
                             spec: InnovationSpec, u_star: float, n: int,
                             burn_in: int = 1000, seed: int = 0) -> SimulatedPath:
    """Simulate a path whose coefficients switch to params_prime after
    t = [n * u_star]; the sigma^2 state carries across the break."""
    if n < 1:
        raise ValueError("n must be >= 1")
    scenario = VarianceChange(theta_prime=params_prime, u_star=float(u_star))
    params_prime.unconditional_variance()  # rejects nonstationary regimes
    eps = sample_innovations(spec, burn_in + n + 1, seed)
    k = break_index(n, u_star)
    x, s2 = _recurse(params, params_prime, burn_in + k, eps)
    return SimulatedPath(x=x[burn_in:], sigma2=s2[burn_in:], eps=eps[burn_in:],
                         scenario=scenario, seed=seed)


def innovation_moment(spec: InnovationSpec, k: int) -> float:
    """Population k-th moment of the innovation distribution.

    Odd moments vanish by symmetry; even normal moments are (k-1)!!, and the
    unit-variance Student-t even moments are
    (k-1)!! * (dof-2)^(k/2) / prod_{i=1..k/2} (dof - 2i), finite for dof > k.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        return 1.0
    if spec.family == STUDENT_T and spec.dof <= k:
        raise ValueError(f"moment of order {k} does not exist for t({spec.dof})")
    if k % 2 == 1:
        return 0.0
    half = k // 2
    double_fact = 1.0
    for i in range(1, half + 1):
        double_fact *= 2 * i - 1
    if spec.family == NORMAL:
        return double_fact
    nu = spec.dof
    denom = 1.0
    for i in range(1, half + 1):
        denom *= nu - 2 * i
    return double_fact * (nu - 2.0) ** half / denom
