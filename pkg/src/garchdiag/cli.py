"""Command-line front end: series ingestion, command dispatch, and report
serialization.

Commands
--------
simulate    generate a GARCH path and write it as a one-column series file
fit         quasi-maximum likelihood fit, written as a key=value report
residuals   variance-path residuals of a series, one per row
test        run one diagnostic statistic and write its report
kde         innovation density estimate as (x, density) rows
mc-table    Monte Carlo size/power study driven by a JSON config

Exit status: 0 on success, 1 on a usage error, 2 on a computation error.
Randomized commands require an explicit seed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Any

import numpy as np

from .core import (
    GarchParams,
    InnovationSpec,
    MeanChange,
    NullScenario,
    VarianceChange,
    simulate,
)
from .diagnostics import TestReport, jarque_bera
from .errors import (
    GarchDiagError,
    NonFiniteValue,
    ParseError,
    TooShort,
    UsageError,
)
from .kde import default_bandwidth, default_grid, kde_evaluate
from .montecarlo import STATISTICS, McExperimentConfig, run_experiment
from .qmle import FitResult, fit
from .variance import residuals

MIN_ROWS = 101  # X_0 plus at least 100 observations


# --- series files -----------------------------------------------------------

def load_series(path: str) -> np.ndarray:
    """Read a one-column series file (optional 'x' header), first row = X_0."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    values = []
    for row, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        if row == 1 and text.lower() == "x":
            continue
        try:
            value = float(text)
        except ValueError:
            raise ParseError(row, f"cannot parse {text!r} as a real number") from None
        if not math.isfinite(value):
            raise NonFiniteValue(row, text)
        values.append(value)
    if len(values) < MIN_ROWS:
        raise TooShort(f"need at least {MIN_ROWS} rows (X_0 plus 100), got {len(values)}")
    return np.array(values)


def write_series(path: str, x: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x\n")
        for v in x:
            fh.write(f"{float(v)!r}\n")


# --- key=value reports --------------------------------------------------------

def _format_value(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def serialize_report(record: dict[str, Any]) -> str:
    """Flat key=value lines; floats carry 6 significant digits."""
    return "".join(f"{k}={_format_value(v)}\n" for k, v in record.items())


def parse_report(text: str) -> dict[str, Any]:
    """Inverse of serialize_report, with type inference per value."""
    record: dict[str, Any] = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, _, raw = line.partition("=")
        if raw in ("true", "false"):
            record[key] = raw == "true"
            continue
        try:
            record[key] = int(raw)
            continue
        except ValueError:
            pass
        try:
            record[key] = float(raw)
            continue
        except ValueError:
            pass
        record[key] = raw
    return record


def _report_record(report: TestReport) -> dict[str, Any]:
    record: dict[str, Any] = {
        "name": report.name,
        "statistic": report.statistic,
        "p_value": report.p_value,
        "critical_value": report.critical_value,
        "level": report.level,
        "reject": report.reject,
        "n": report.n,
    }
    for key, value in report.provenance.items():
        record[f"provenance.{key}"] = value
    return record


def _fit_record(result: FitResult) -> dict[str, Any]:
    theta = result.theta_hat
    record: dict[str, Any] = {"alpha0": theta.alpha0}
    for i, a in enumerate(theta.alpha, start=1):
        record[f"alpha{i}"] = a
    for j, b in enumerate(theta.beta, start=1):
        record[f"beta{j}"] = b
    record.update(loglik=result.loglik, iterations=result.iterations,
                  converged=result.converged, n=result.n)
    return record


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# --- argument handling --------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1, not argparse's default 2
        raise UsageError(message)


def _parse_theta(text: str, p: int, q: int) -> GarchParams:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"--theta {text!r} is not a comma-separated number list") from None
    if len(values) != 1 + p + q:
        raise UsageError(f"--theta needs {1 + p + q} values for p={p}, q={q}, "
                         f"got {len(values)}")
    return GarchParams.from_array(values, p, q)


def _innovation_from_args(args) -> InnovationSpec:
    if args.innovation == "normal":
        return InnovationSpec.normal()
    if args.dof is None:
        raise UsageError("--innovation t requires --dof")
    return InnovationSpec.student_t(args.dof)


def _theta_for_series(args, x: np.ndarray) -> GarchParams:
    """Either fit by QMLE (--fit auto) or take --theta at face value."""
    if args.theta is not None:
        return _parse_theta(args.theta, args.p, args.q)
    if args.fit == "auto":
        return fit(x, p=args.p, q=args.q).theta_hat
    raise UsageError("supply --fit auto or an explicit --theta")


def build_parser() -> _Parser:
    parser = _Parser(prog="garchdiag", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_orders(p_):
        p_.add_argument("--p", type=int, default=1)
        p_.add_argument("--q", type=int, default=1)

    sim = sub.add_parser("simulate", help="simulate a GARCH path")
    add_orders(sim)
    sim.add_argument("--theta", required=True, help="a0,a1,..,b1,.. coefficients")
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--burn-in", type=int, default=1000, dest="burn_in")
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--innovation", choices=["normal", "t"], default="normal")
    sim.add_argument("--dof", type=float)
    sim.add_argument("--out", required=True, dest="out_path")

    fit_p = sub.add_parser("fit", help="quasi-maximum likelihood fit")
    add_orders(fit_p)
    fit_p.add_argument("--in", required=True, dest="in_path")
    fit_p.add_argument("--out", dest="out_path")

    res = sub.add_parser("residuals", help="variance-path residuals")
    add_orders(res)
    res.add_argument("--in", required=True, dest="in_path")
    res.add_argument("--fit", choices=["auto"])
    res.add_argument("--theta")
    res.add_argument("--out", required=True, dest="out_path")

    test = sub.add_parser("test", help="run one diagnostic statistic")
    add_orders(test)
    test.add_argument("--stat", required=True, choices=sorted(STATISTICS))
    test.add_argument("--level", type=float, default=0.05)
    test.add_argument("--in", required=True, dest="in_path")
    test.add_argument("--fit", choices=["auto"])
    test.add_argument("--theta")
    test.add_argument("--correct", action="store_true",
                      help="finite-sample JB critical value (jb only)")
    test.add_argument("--drop-scale", action="store_true", dest="drop_scale",
                      help="drop the scale estimate from cusum1")
    test.add_argument("--out", dest="out_path")

    kde_p = sub.add_parser("kde", help="innovation density estimate")
    add_orders(kde_p)
    kde_p.add_argument("--in", required=True, dest="in_path")
    kde_p.add_argument("--fit", choices=["auto"])
    kde_p.add_argument("--theta")
    kde_p.add_argument("--out", required=True, dest="out_path")

    mc = sub.add_parser("mc-table", help="Monte Carlo size/power table")
    mc.add_argument("--config", required=True)
    mc.add_argument("--reps", type=int, help="override the config replicate count")
    mc.add_argument("--seed", type=int, help="override the config master seed")
    mc.add_argument("--workers", type=int, default=1)
    mc.add_argument("--out", required=True, dest="out_path")

    return parser


# --- config files ---------------------------------------------------------------

_CONFIG_KEYS = {"p", "q", "theta", "scenario", "innovation", "n_list",
                "replicates", "level", "statistic", "master_seed", "burn_in"}
_SCENARIO_KEYS = {
    "null": {"kind"},
    "mean-change": {"kind", "mu", "u_star"},
    "variance-change": {"kind", "theta_prime", "u_star"},
}
_INNOVATION_KEYS = {"family", "dof"}


def _check_keys(mapping: dict, allowed: set[str], where: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise GarchDiagError(f"unknown {where} keys: {sorted(unknown)}")


def load_mc_config(path: str, reps: int | None = None,
                   seed: int | None = None) -> McExperimentConfig:
    """Build an experiment config from a JSON file; unknown keys are errors."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    _check_keys(raw, _CONFIG_KEYS, "config")
    p, q = int(raw.get("p", 1)), int(raw.get("q", 1))
    theta = GarchParams.from_array(raw["theta"], p, q)

    sc_raw = dict(raw.get("scenario", {"kind": "null"}))
    kind = sc_raw.get("kind", "null")
    if kind not in _SCENARIO_KEYS:
        raise GarchDiagError(f"unknown scenario kind {kind!r}")
    _check_keys(sc_raw, _SCENARIO_KEYS[kind], "scenario")
    if kind == "null":
        scenario = NullScenario()
    elif kind == "mean-change":
        scenario = MeanChange(mu=float(sc_raw["mu"]), u_star=float(sc_raw["u_star"]))
    else:
        scenario = VarianceChange(
            theta_prime=GarchParams.from_array(sc_raw["theta_prime"], p, q),
            u_star=float(sc_raw["u_star"]),
        )

    innov_raw = dict(raw.get("innovation", {"family": "standard-normal"}))
    _check_keys(innov_raw, _INNOVATION_KEYS, "innovation")
    family = innov_raw.get("family", "standard-normal")
    if family == "standard-normal":
        innovation = InnovationSpec.normal()
    elif family == "standardized-student-t":
        innovation = InnovationSpec.student_t(float(innov_raw["dof"]))
    else:
        raise GarchDiagError(f"unknown innovation family {family!r}")

    master_seed = seed if seed is not None else raw.get("master_seed")
    if master_seed is None:
        raise UsageError("mc-table needs a master seed (config master_seed or --seed)")
    return McExperimentConfig(
        theta=theta,
        scenario=scenario,
        innovation=innovation,
        n_list=tuple(int(n) for n in raw["n_list"]),
        replicates=int(reps if reps is not None else raw["replicates"]),
        statistic=raw.get("statistic", "cusum2_2"),
        level=float(raw.get("level", 0.05)),
        master_seed=int(master_seed),
        burn_in=int(raw.get("burn_in", 1000)),
    )


# --- commands -------------------------------------------------------------------

def _cmd_simulate(args) -> None:
    theta = _parse_theta(args.theta, args.p, args.q)
    spec = _innovation_from_args(args)
    path = simulate(theta, spec, args.n, burn_in=args.burn_in, seed=args.seed)
    write_series(args.out_path, path.x)


def _cmd_fit(args) -> None:
    x = load_series(args.in_path)
    result = fit(x, p=args.p, q=args.q)
    _write_text(args.out_path, serialize_report(_fit_record(result)))


def _cmd_residuals(args) -> None:
    x = load_series(args.in_path)
    theta = _theta_for_series(args, x)
    res = residuals(theta, x)
    lines = ["eps_hat"] + [f"{float(v)!r}" for v in res.eps_hat]
    _write_text(args.out_path, "\n".join(lines) + "\n")


def _cmd_test(args) -> None:
    x = load_series(args.in_path)
    fitted = None
    if args.theta is None and args.fit == "auto":
        fitted = fit(x, p=args.p, q=args.q)
        theta = fitted.theta_hat
    else:
        theta = _theta_for_series(args, x)
    eps_hat = residuals(theta, x).eps_hat
    if args.stat == "jb":
        report = jarque_bera(eps_hat, level=args.level,
                             finite_sample_correction=args.correct)
    elif args.correct:
        raise UsageError("--correct applies only to --stat jb")
    elif args.stat == "cusum1":
        report = STATISTICS["cusum1"](eps_hat, drop_scale=args.drop_scale,
                                      level=args.level)
    else:
        report = STATISTICS[args.stat](eps_hat, level=args.level)
    record = _report_record(report)
    record["provenance.estimator_converged"] = (
        fitted.converged if fitted is not None else True
    )
    _write_text(args.out_path, serialize_report(record))


def _cmd_kde(args) -> None:
    x = load_series(args.in_path)
    theta = _theta_for_series(args, x)
    eps_hat = residuals(theta, x).eps_hat
    h = default_bandwidth(eps_hat)
    estimate = kde_evaluate(eps_hat, h, default_grid(eps_hat, h))
    lines = ["x,density"] + [
        f"{float(g)!r},{float(d)!r}" for g, d in zip(estimate.grid, estimate.density)
    ]
    _write_text(args.out_path, "\n".join(lines) + "\n")


def _cmd_mc_table(args) -> None:
    config = load_mc_config(args.config, reps=args.reps, seed=args.seed)
    table = run_experiment(config, workers=args.workers)
    lines = ["scenario,n,rejection_rate,mc_se,fit_failure_rate"]
    for row in table.rows:
        lines.append(f"{row.scenario},{row.n},{row.rejection_rate!r},"
                     f"{row.monte_carlo_se!r},{row.fit_failure_rate!r}")
    _write_text(args.out_path, "\n".join(lines) + "\n")


_COMMANDS = {
    "simulate": _cmd_simulate,
    "fit": _cmd_fit,
    "residuals": _cmd_residuals,
    "test": _cmd_test,
    "kde": _cmd_kde,
    "mc-table": _cmd_mc_table,
}


def main(argv: list[str] | None = None) -> int:
    """Parse and run one command; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (GarchDiagError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


def cli_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    cli_main()
