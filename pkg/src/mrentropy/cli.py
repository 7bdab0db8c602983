"""``infer`` command line front end.

Exit codes: 0 success, 2 parse/validation error, 3 infeasible moment,
4 numerical non-convergence, 5 I/O error.
"""

import argparse
from dataclasses import dataclass
import json
import os
import sys

import numpy as np

from mrentropy import __version__
from mrentropy.errors import MreError, ValidationError
from mrentropy.io import dumps_report, emit_plot_data, input_document, parse_input, write_report
from mrentropy.model import CountSample, MomentConstraint
from mrentropy.sanov import compare_estimators, sanov_estimate
from mrentropy.solver import DEFAULT_TOL
from mrentropy.updaters import (
    bayes_update,
    maxent_update,
    moment_check,
    posterior_mean,
    sequential_update,
    simultaneous_update,
)
from mrentropy.zeta import METHODS, evaluate_zeta

RUN_MODES = ("simultaneous", "sequential", "bayes", "maxent", "sanov", "compare")
NEEDS_COUNTS = {"simultaneous", "sequential", "bayes", "sanov", "compare"}
NEEDS_MOMENT = {"simultaneous", "sequential", "maxent", "sanov", "compare"}


@dataclass
class RunConfig:
    input: str
    mode: str = "simultaneous"
    moment: float = None
    tol: float = DEFAULT_TOL
    grid: int = 200
    seed: int = 0
    out: str = None
    plots: str = None
    zeta_method: str = "series"


def _stderr(kind, message):
    color = sys.stderr.isatty() and "NO_COLOR" not in os.environ
    tag = f"\033[33m{kind}\033[0m" if color else kind
    print(f"{tag}: {message}", file=sys.stderr)


def _warn(message):
    _stderr("warning", message)


def _zeta_options(config):
    if config.zeta_method == "monte-carlo":
        return {"seed": config.seed}
    return {}


def _posterior_report(spec, config):
    summary = posterior_mean(spec)
    zeta = evaluate_zeta(spec.model, spec.data_counts, spec.multiplier, config.zeta_method,
                         **_zeta_options(config))
    diagnostics = {
        "zeta_method": zeta.method,
        "zeta_error_estimate": zeta.error_estimate,
        "zeta_terms_or_nodes": zeta.terms_or_nodes,
    }
    if spec.solve is not None:
        diagnostics.update(iterations=spec.solve.iterations, residual=spec.solve.residual)
    return {
        "beta_or_lambda": spec.multiplier,
        "log_zeta": spec.log_normalizer,
        "zeta": float(np.exp(spec.log_normalizer)),
        "means": list(summary.means),
        "achieved_moment": moment_check(spec),
        "diagnostics": diagnostics,
    }


def build_report(config, model, counts, moment):
    """Run the selected mode and return ``(report, posterior spec or None)``."""
    mode = config.mode
    F = None if moment is None else moment.F
    tol = config.tol
    method = config.zeta_method
    spec = None
    if mode in ("simultaneous", "compare"):
        spec = simultaneous_update(model, counts, F, tol, method)
    elif mode == "sequential":
        spec = sequential_update(model, counts, F, tol, method)
    elif mode == "bayes":
        spec = bayes_update(model, counts, method)
    elif mode == "maxent":
        spec = maxent_update(model, F, tol, method)

    report = {"mode": mode, "moment": F}
    if spec is not None:
        report.update(_posterior_report(spec, config))
    if mode == "sanov":
        est = sanov_estimate(model, counts, F, tol)
        report.update(
            beta_or_lambda=est.eta,
            log_zeta=None,
            means=list(est.p_star),
            achieved_moment=est.achieved_moment,
            diagnostics={"iterations": est.iterations, "residual": abs(est.achieved_moment - F),
                         "zeta_method": None},
        )
    if mode == "compare":
        report["comparison"] = compare_estimators(model, counts, F, tol, method).to_dict()
    report["input"] = input_document(model, counts, moment)
    report["settings"] = {"tol": tol, "grid": config.grid, "seed": config.seed,
                          "zeta_method": method}
    return report, spec


def run(config):
    """Execute ``config``; returns the process exit code."""
    try:
        if config.mode not in RUN_MODES:
            raise ValidationError(f"unknown mode {config.mode!r}", "mode")
        if config.zeta_method not in METHODS:
            raise ValidationError(f"unknown zeta method {config.zeta_method!r}", "zeta_method")
        model, counts, moment = parse_input(config.input)
        if config.moment is not None:
            moment = MomentConstraint(config.moment)
        if config.mode in NEEDS_COUNTS and counts is None:
            raise ValidationError(f"mode {config.mode} requires counts", "counts present")
        if config.mode in NEEDS_MOMENT and moment is None:
            raise ValidationError(f"mode {config.mode} requires a moment", "moment present")
        if config.mode == "maxent" and counts is not None:
            _warn("maxent mode ignores the counts")
            counts = None
        if config.mode == "bayes" and moment is not None:
            _warn("bayes mode ignores the moment")
            moment = None

        report, spec = build_report(config, model, counts, moment)
        if config.plots:
            if config.mode in ("maxent", "sequential"):
                curve_counts = CountSample.empty(model.k)
            else:
                curve_counts = counts
            report["plots"] = emit_plot_data(
                config.plots, spec, curve_counts, model, config.grid, config.tol,
                config.zeta_method, _warn,
            )
        if config.out:
            write_report(report, config.out)
        else:
            print(dumps_report(report))
        return 0
    except MreError as exc:
        print(json.dumps({"error": exc.to_dict()}), file=sys.stderr)
        return exc.exit_code


def build_parser():
    p = argparse.ArgumentParser(
        prog="infer",
        description="Maximum relative entropy updating of multinomial models with moment constraints.",
    )
    p.add_argument("--input", required=True, help="input JSON (types, counts, moment)")
    p.add_argument("--mode", choices=RUN_MODES, default="simultaneous")
    p.add_argument("--moment", type=float, help="override the input moment F")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="residual tolerance on the moment")
    p.add_argument("--grid", type=int, default=200, help="points per marginal density grid")
    p.add_argument("--seed", type=int, default=0, help="seed for monte-carlo evaluation")
    p.add_argument("--out", help="report path (default: stdout)")
    p.add_argument("--plots", help="directory for CSV plot data")
    p.add_argument("--zeta-method", choices=METHODS, default="series")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    config = RunConfig(
        input=args.input, mode=args.mode, moment=args.moment, tol=args.tol, grid=args.grid,
        seed=args.seed, out=args.out, plots=args.plots, zeta_method=args.zeta_method,
    )
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
