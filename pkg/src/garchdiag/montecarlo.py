"""Monte Carlo harness for empirical size, power, null quantiles, and the
first-order correction of the raw-moment partial sum process.

Each replicate gets its own seed derived from (master_seed, scenario, n, r)
through a fixed hash, so results do not depend on execution order or on how
many worker processes run the study.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from multiprocessing import get_context

import numpy as np

from .core import (
    DEFAULT_SPACE,
    GarchParams,
    InnovationSpec,
    MeanChange,
    NullScenario,
    ParameterSpace,
    SimulatedPath,
    VarianceChange,
    innovation_moment,
    simulate,
    simulate_mean_change,
    simulate_variance_change,
)
from .diagnostics import (
    cusum_mean_test,
    cusum_var_test_1,
    cusum_var_test_2,
    jarque_bera,
)
from .qmle import fit
from .variance import estimate_psi, residuals

Scenario = NullScenario | MeanChange | VarianceChange

STATISTICS = {
    "cusum1": cusum_mean_test,
    "cusum2_1": cusum_var_test_1,
    "cusum2_2": cusum_var_test_2,
    "jb": jarque_bera,
}

# Fits may land exactly on the search box boundary; the psi finite
# differences need a hair of room around it.
_PSI_SPACE = ParameterSpace(rho0=0.9995, lower=DEFAULT_SPACE.lower / 4.0,
                            upper=DEFAULT_SPACE.upper * 4.0)


@dataclass(frozen=True)
class McExperimentConfig:
    """One simulation study: a data-generating scenario, a statistic, and a
    grid of sample sizes."""

    theta: GarchParams
    scenario: Scenario
    innovation: InnovationSpec
    n_list: tuple[int, ...]
    replicates: int
    statistic: str = "cusum2_2"
    level: float = 0.05
    master_seed: int = 0
    burn_in: int = 1000

    def __post_init__(self):
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if any(n < 100 for n in self.n_list):
            raise ValueError("every n must be >= 100")
        if self.statistic not in STATISTICS:
            raise ValueError(f"unknown statistic {self.statistic!r}; "
                             f"choose from {sorted(STATISTICS)}")
        if not 0.0 < self.level < 1.0:
            raise ValueError("level must be in (0, 1)")


@dataclass(frozen=True)
class McRow:
    scenario: str
    n: int
    rejection_rate: float
    monte_carlo_se: float
    fit_failure_rate: float


@dataclass(frozen=True)
class McTable:
    rows: tuple[McRow, ...]

    def row(self, n: int) -> McRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(f"no row for n = {n}")


@dataclass(frozen=True)
class CorrectionReport:
    """Medians across replicates of the corrected and uncorrected sup gaps
    between the residual and innovation raw-moment partial sum processes."""

    n: int
    k: int
    replicates: int
    median_corrected_gap: float
    median_uncorrected_gap: float
    fit_failure_rate: float


def replicate_seed(master_seed: int, scenario_label: str, n: int, r: int) -> int:
    """Stable per-replicate seed: 8 bytes of blake2b over the identifying tuple."""
    tag = f"{master_seed}|{scenario_label}|{n}|{r}".encode()
    return int.from_bytes(hashlib.blake2b(tag, digest_size=8).digest(), "big")


def _simulate_scenario(config: McExperimentConfig, n: int, seed: int) -> SimulatedPath:
    sc = config.scenario
    if isinstance(sc, NullScenario):
        return simulate(config.theta, config.innovation, n,
                        burn_in=config.burn_in, seed=seed)
    if isinstance(sc, MeanChange):
        return simulate_mean_change(config.theta, config.innovation, sc.mu,
                                    sc.u_star, n, burn_in=config.burn_in, seed=seed)
    return simulate_variance_change(config.theta, sc.theta_prime,
                                    config.innovation, sc.u_star, n,
                                    burn_in=config.burn_in, seed=seed)


def _one_replicate(args: tuple[McExperimentConfig, int, int]) -> tuple[float, bool, bool]:
    """Simulate, fit, and test one replicate; returns (statistic, reject, converged)."""
    config, n, r = args
    seed = replicate_seed(config.master_seed, config.scenario.label, n, r)
    path = _simulate_scenario(config, n, seed)
    result = fit(path.x, p=config.theta.p, q=config.theta.q)
    res = residuals(result.theta_hat, path.x)
    report = STATISTICS[config.statistic](res.eps_hat, level=config.level)
    return report.statistic, report.reject, result.converged


def _map_tasks(tasks: list, worker, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [worker(t) for t in tasks]
    try:
        ctx = get_context("fork")
    except ValueError:  # platforms without fork
        ctx = get_context("spawn")
    with ctx.Pool(processes=workers) as pool:
        return pool.map(worker, tasks, chunksize=max(1, len(tasks) // (8 * workers)))


def _replicate_results(config: McExperimentConfig, n: int,
                       workers: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    tasks = [(config, n, r) for r in range(config.replicates)]
    out = _map_tasks(tasks, _one_replicate, workers)
    stats = np.array([o[0] for o in out])
    rejects = np.array([o[1] for o in out], dtype=bool)
    converged = np.array([o[2] for o in out], dtype=bool)
    return stats, rejects, converged


def run_experiment(config: McExperimentConfig, workers: int = 1) -> McTable:
    """Rejection rate of the configured statistic for every n in the grid.

    Fit failures (optimizer budget exhausted) are counted into
    fit_failure_rate but their replicates still contribute the statistic
    computed from the partial fit; dropping them would bias the rates.
    """
    rows = []
    for n in config.n_list:
        _, rejects, converged = _replicate_results(config, n, workers)
        rate = float(rejects.mean())
        se = math.sqrt(rate * (1.0 - rate) / config.replicates)
        rows.append(McRow(
            scenario=config.scenario.label, n=n, rejection_rate=rate,
            monte_carlo_se=se, fit_failure_rate=float((~converged).mean()),
        ))
    return McTable(rows=tuple(rows))


def null_quantiles(config: McExperimentConfig, probs, workers: int = 1) -> np.ndarray:
    """Empirical quantiles of the statistic under the null scenario.

    The config must target the null scenario and exactly one sample size.
    """
    if not isinstance(config.scenario, NullScenario):
        raise ValueError("null_quantiles requires a null-scenario config")
    if len(config.n_list) != 1:
        raise ValueError("null_quantiles expects exactly one sample size")
    stats, _, _ = _replicate_results(config, config.n_list[0], workers)
    return np.quantile(stats, np.asarray(probs, dtype=float))


def _one_correction_replicate(
    args: tuple[GarchParams, InnovationSpec, int, int, int, float, int]
) -> tuple[float, float, bool]:
    theta, innovation, n, k, burn_in, mu_k, seed = args
    path = simulate(theta, innovation, n, burn_in=burn_in, seed=seed)
    result = fit(path.x, p=theta.p, q=theta.q)
    res = residuals(result.theta_hat, path.x)

    root_n = math.sqrt(n)
    gap = (np.cumsum(res.eps_hat**k) - np.cumsum(path.eps[1:] ** k)) / root_n
    uncorrected = float(np.abs(gap).max())

    psi_hat = estimate_psi(result.theta_hat, path.x, space=_PSI_SPACE)
    delta = root_n * (result.theta_hat.as_array() - theta.as_array())
    inner = float(psi_hat.psi @ delta)
    u = np.arange(1, n + 1) / n
    corrected = float(np.abs(gap + (k * u * mu_k / 2.0) * inner).max())
    return corrected, uncorrected, result.converged


def correction_term_check(theta: GarchParams, innovation: InnovationSpec, n: int,
                          replicates: int, k: int, master_seed: int,
                          burn_in: int = 1000, workers: int = 1) -> CorrectionReport:
    """Measure the sup gap between residual and innovation k-th moment partial
    sums, with and without the first-order estimation correction.

    Per replicate the gap process is sup_u | (S_hat - S)(u)/sqrt(n)
    + (k u mu_k / 2) <psi_hat, sqrt(n)(theta_hat - theta)> |, where psi_hat is
    the ergodic plug-in gradient average and mu_k the population innovation
    moment.  For odd k the correction vanishes and both gaps coincide.
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    mu_k = innovation_moment(innovation, k)
    tasks = [
        (theta, innovation, n, k, burn_in, mu_k,
         replicate_seed(master_seed, f"correction-k{k}", n, r))
        for r in range(replicates)
    ]
    out = _map_tasks(tasks, _one_correction_replicate, workers)
    corrected = np.array([o[0] for o in out])
    uncorrected = np.array([o[1] for o in out])
    converged = np.array([o[2] for o in out], dtype=bool)
    return CorrectionReport(
        n=n, k=k, replicates=replicates,
        median_corrected_gap=float(np.median(corrected)),
        median_uncorrected_gap=float(np.median(uncorrected)),
        fit_failure_rate=float((~converged).mean()),
    )
