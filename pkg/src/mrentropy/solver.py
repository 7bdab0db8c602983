"""Scalar Lagrange multipliers for a single moment constraint.

The posterior mean of ``f`` is strictly increasing in the multiplier (its
derivative is the posterior variance of ``f``), so each constraint has a
unique root. Roots are found by Newton steps guarded by a bisection bracket.
"""

from dataclasses import dataclass
import logging
import math

import numpy as np

from mrentropy.errors import ConvergenceError, DivergenceError, InfeasibleMomentError, ValidationError
from mrentropy.model import CountSample, as_counts, as_model
from mrentropy.zeta import _log_zeta, log_zeta_and_means

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
#: Largest multiplier magnitude tried while bracketing.
MULTIPLIER_LIMIT = 1e3
MAX_ITER = 200


@dataclass(frozen=True)
class SolveResult:
    """Outcome of a multiplier solve.

    ``residual`` is ``|achieved_moment - F|``. ``log_zeta`` is the log
    normalizer at the returned multiplier, when the solve computed one.
    """

    multiplier: float
    achieved_moment: float
    iterations: int
    residual: float
    solver: str = "newton"
    log_zeta: float = None


def solve_increasing(moment, target, tol=DEFAULT_TOL, slope=None, x0=0.0,
                     solver="newton", limit=MULTIPLIER_LIMIT, max_iter=MAX_ITER):
    """Root of ``moment(x) = target`` for a strictly increasing ``moment``.

    Parameters
    ----------
    moment : callable
        ``x -> value``.
    target : float
    tol : float
        Required ``|moment(x) - target|``.
    slope : callable, optional
        ``x -> d moment / dx``; required for ``solver="newton"``.
    x0 : float
        Starting point; the bracket grows geometrically around it.
    solver : {"newton", "bisection"}
    limit : float
        Bracket growth beyond ``|x| = limit`` raises :class:`DivergenceError`.

    Returns
    -------
    x, value, iterations
    """
    if solver not in ("newton", "bisection"):
        raise ValidationError(f"unknown solver {solver!r}", "solver")
    if solver == "newton" and slope is None:
        raise ValidationError("newton needs a slope function", "slope")
    if not tol > 0:
        raise ValidationError("tol must be positive", "tol > 0")

    evals = {}

    def g(x):
        if x not in evals:
            evals[x] = moment(x) - target
        return evals[x]

    x = float(x0)
    gx = g(x)
    if abs(gx) <= tol:
        return x, gx + target, 0

    # bracket [lo, hi] with g(lo) < 0 < g(hi)
    direction = 1.0 if gx < 0 else -1.0
    near, step = x, 1.0
    while True:
        far = x0 + direction * step
        if abs(far) > limit:
            far = direction * limit
        if direction * g(far) > 0:
            break
        near = far
        if abs(far) >= limit:
            raise DivergenceError(
                f"multiplier exceeds {limit:g} without bracketing the root "
                f"(moment {target!r} too close to an extremity)"
            )
        step *= 2.0
    lo, hi = (near, far) if direction > 0 else (far, near)

    previous = abs(gx)
    force_bisect = solver == "bisection"
    for iteration in range(1, max_iter + 1):
        step_x = None
        if not force_bisect:
            s = slope(x)
            if s > 0 and math.isfinite(s):
                step_x = x - gx / s
        if step_x is None or not lo < step_x < hi:
            step_x = 0.5 * (lo + hi)
        x = step_x
        gx = g(x)
        if abs(gx) <= tol:
            return x, gx + target, iteration
        if gx < 0:
            lo = x
        else:
            hi = x
        if solver == "newton":
            # a Newton step that fails to shrink the residual is followed by bisection
            force_bisect = abs(gx) >= previous
        previous = abs(gx)
        if hi - lo <= 4 * np.finfo(float).eps * max(1.0, abs(x)):
            break
    raise ConvergenceError(
        f"multiplier solve stalled at x={x!r} with residual {abs(gx)!r} (tol {tol!r})"
    )


def _moment_functions(model, counts, method, options):
    f, m = model.labels, counts.counts
    cache = {}

    def moment(beta):
        log_z, means = log_zeta_and_means(model, counts, beta, method, **options)
        cache[beta] = log_z
        return float(f @ means)

    def log_z(beta):
        if beta not in cache:
            cache[beta] = _log_zeta(f, m, beta, method, **options)
        return cache[beta]

    def slope(beta):
        # second derivative of log zeta is the variance of f
        h = 1e-5 * max(1.0, abs(beta))
        return (log_z(beta + h) - 2.0 * log_z(beta) + log_z(beta - h)) / (h * h)

    return moment, slope, log_z


def solve_beta(model, counts, F, tol=DEFAULT_TOL, method="series", solver="newton",
               beta0=0.0, **options):
    """Multiplier ``beta`` making the posterior mean of ``f(theta)`` equal ``F``.

    The posterior is ``exp(beta * f(theta)) * prod theta_i ** m_i`` on the
    simplex. ``method`` selects the normalizer evaluator (see
    :func:`mrentropy.zeta.evaluate_zeta`).

    Raises
    ------
    InfeasibleMomentError
        ``F`` outside ``(min f, max f)``.
    DivergenceError
        The bracket passes ``|beta| = 1e3``.
    """
    model = as_model(model)
    counts = as_counts(counts).check_against(model)
    F = model.check_moment(F)
    moment, slope, log_z = _moment_functions(model, counts, method, options)
    beta, achieved, iterations = solve_increasing(moment, F, tol, slope, x0=beta0, solver=solver)
    logger.debug("beta=%r after %d iterations", beta, iterations)
    return SolveResult(float(beta), float(achieved), iterations, abs(achieved - F), solver, log_z(beta))


def solve_lambda_maxent(model, F, tol=DEFAULT_TOL, method="series", solver="newton", **options):
    """Multiplier of the data-free maximum entropy distribution ``exp(lambda f(theta)) / Z``."""
    model = as_model(model)
    return solve_beta(model, CountSample.empty(model.k), F, tol, method, solver, **options)


def beta_curve(model, counts, F_grid, tol=DEFAULT_TOL, method="series", **options):
    """``[(F, beta), ...]`` for every ``F`` in ``F_grid``, in grid order.

    Each point is solved independently from ``beta = 0``.
    """
    model = as_model(model)
    counts = as_counts(counts).check_against(model)
    grid = [float(F) for F in F_grid]
    for index, F in enumerate(grid):
        if not model.is_feasible(F):
            raise InfeasibleMomentError(
                f"grid entry {index} (F={F!r}) outside ({min(model.f)!r}, {max(model.f)!r})"
            )
    return [(F, solve_beta(model, counts, F, tol, method, **options).multiplier) for F in grid]
