"""Posterior construction for the four update modes.

All posteriors live on the simplex, start from a flat prior and have the form

    p(theta) = exp(mult * f(theta)) * prod_i theta_i ** m_i / zeta'

They differ in which counts enter and how the multiplier is chosen:

``simultaneous``
    data and moment imposed together; ``mult = beta`` is solved with the
    counts in place, so the posterior mean of ``f`` equals ``F``.
``sequential``
    the moment is imposed first on the flat prior (``mult = lambda`` solved
    with zero counts), then the data update that prior by Bayes' rule.
    ``lambda`` is not re-solved, so the final mean of ``f`` generally
    differs from ``F``: the data supersede the moment.
``bayes``
    no moment; ``mult = 0``.
``maxent``
    no data; ``mult = lambda``.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.special import xlogy

from mrentropy.errors import DimensionError, UseMonteCarloError, ValidationError
from mrentropy.model import (
    CountSample,
    MomentConstraint,
    as_counts,
    as_model,
    as_simplex_point,
)
from mrentropy.solver import DEFAULT_TOL, SolveResult, solve_beta, solve_lambda_maxent
from mrentropy.zeta import (
    DEFAULT_LEVEL,
    MAX_QUADRATURE_K,
    _log_zeta,
    _log_zeta_quadrature,
    log_zeta_and_means,
    nodes_per_axis,
)

MODES = ("simultaneous", "sequential", "bayes", "maxent")


@dataclass(frozen=True)
class PosteriorSpec:
    """A solved posterior. Immutable; every evaluation is a pure function of it."""

    mode: str
    model: object
    counts: object
    multiplier: float
    log_normalizer: float
    moment: object = None
    solve: SolveResult = None
    method: str = "series"

    @property
    def data_counts(self):
        """Counts entering the density (all zero in maxent mode)."""
        if self.counts is None:
            return CountSample.empty(self.model.k)
        return self.counts


@dataclass(frozen=True)
class MarginalSummary:
    means: tuple
    density_grids: tuple = None


def _normalizer(model, counts, mult, method):
    return _log_zeta(model.labels, counts.counts, mult, method)


def simultaneous_update(model, counts, F, tol=DEFAULT_TOL, method="series", solver="newton"):
    """Posterior satisfying both the observed counts and ``<f(theta)> = F``."""
    model = as_model(model)
    counts = as_counts(counts).check_against(model)
    result = solve_beta(model, counts, F, tol, method, solver)
    return PosteriorSpec(
        "simultaneous", model, counts, result.multiplier, result.log_zeta,
        MomentConstraint(F), result, method,
    )


def sequential_update(model, counts, F, tol=DEFAULT_TOL, method="series", solver="newton"):
    """Maximum entropy prior for ``F``, then a Bayes update with the counts.

    The returned posterior does not in general satisfy ``<f(theta)> = F``;
    see :func:`moment_check`.
    """
    model = as_model(model)
    counts = as_counts(counts).check_against(model)
    result = solve_lambda_maxent(model, F, tol, method, solver)
    log_z = _normalizer(model, counts, result.multiplier, method)
    return PosteriorSpec(
        "sequential", model, counts, result.multiplier, log_z,
        MomentConstraint(F), result, method,
    )


def bayes_update(model, counts, method="series"):
    """Flat prior times the multinomial likelihood (a Dirichlet posterior)."""
    model = as_model(model)
    counts = as_counts(counts).check_against(model)
    return PosteriorSpec("bayes", model, counts, 0.0, _normalizer(model, counts, 0.0, method),
                         None, None, method)


def maxent_update(model, F, tol=DEFAULT_TOL, method="series", solver="newton"):
    """Data-free maximum entropy distribution on the simplex with ``<f(theta)> = F``."""
    model = as_model(model)
    result = solve_lambda_maxent(model, F, tol, method, solver)
    return PosteriorSpec("maxent", model, None, result.multiplier, result.log_zeta,
                         MomentConstraint(F), result, method)


def log_posterior_density(spec, theta):
    theta = as_simplex_point(theta)
    if theta.k != spec.model.k:
        raise DimensionError(f"point has {theta.k} coordinates, model has {spec.model.k} types")
    th = np.asarray(theta)
    m = spec.data_counts.counts
    return float(spec.multiplier * (spec.model.labels @ th) + xlogy(m, th).sum() - spec.log_normalizer)


def posterior_density(spec, theta):
    """Normalized density at ``theta`` with respect to ``d theta_1 ... d theta_{k-1}``."""
    return math.exp(log_posterior_density(spec, theta))


def posterior_mean(spec):
    """Means of every ``theta_i`` via normalizer ratios."""
    _, means = log_zeta_and_means(spec.model, spec.data_counts, spec.multiplier, spec.method)
    return MarginalSummary(tuple(float(v) for v in means))


def moment_check(spec):
    """Posterior expectation of ``f(theta)``."""
    means = np.asarray(posterior_mean(spec).means)
    return float(spec.model.labels @ means)


def total_probability(spec, level=None):
    """Quadrature integral of the density over the simplex (should be 1)."""
    k = spec.model.k
    if k > MAX_QUADRATURE_K:
        raise UseMonteCarloError(f"quadrature supports k <= {MAX_QUADRATURE_K}")
    level = level or DEFAULT_LEVEL[k]
    log_z = _log_zeta_quadrature(spec.model.labels, spec.data_counts.counts, spec.multiplier,
                                 nodes_per_axis(level + 1))
    return math.exp(log_z - spec.log_normalizer)


def _grid(grid_points):
    if isinstance(grid_points, (int, np.integer)):
        return np.linspace(0.0, 1.0, int(grid_points))
    grid = np.asarray(grid_points, dtype=float).ravel()
    if np.any((grid < 0) | (grid > 1)):
        raise ValidationError("marginal grid values must lie in [0, 1]", "0 <= theta_i <= 1")
    return grid


def marginal_density_grid(spec, i, grid_points=200, level=None):
    """Density of ``theta_i`` (1-based ``i``) with the other coordinates integrated out.

    Fixing ``theta_i = x`` leaves a simplex of mass ``1 - x``. Rescaling it
    to the unit simplex turns the slice integral into the normalizer of the
    model without type ``i`` at multiplier ``mult * (1 - x)``, which is
    evaluated by the same quadrature as the full normalizer.

    Parameters
    ----------
    grid_points : int or sequence of float
        A count gives an evenly spaced grid on ``[0, 1]`` including both ends.

    Returns
    -------
    list of (theta_i, density) pairs
    """
    model = spec.model
    k = model.k
    if not 1 <= int(i) <= k:
        raise DimensionError(f"type index {i} outside 1..{k}")
    if k > MAX_QUADRATURE_K:
        raise UseMonteCarloError(
            f"marginal grids need quadrature, which supports k <= {MAX_QUADRATURE_K}",
            f"k <= {MAX_QUADRATURE_K}",
        )
    idx = int(i) - 1
    grid = _grid(grid_points)
    f = model.labels
    m = spec.data_counts.counts
    rest = [j for j in range(k) if j != idx]
    f_rest, m_rest = f[rest], m[rest]
    rest_power = int(m.sum() - m[idx]) + k - 2
    if k > 2:
        nodes = nodes_per_axis((level or DEFAULT_LEVEL[k - 1]) + 1)
    mult = spec.multiplier
    out = []
    for x in grid:
        log_d = xlogy(m[idx], x) + xlogy(rest_power, 1.0 - x) + mult * f[idx] * x - spec.log_normalizer
        if np.isfinite(log_d):
            if k == 2:
                log_d += mult * (1.0 - x) * f_rest[0]
            else:
                log_d += _log_zeta_quadrature(f_rest, m_rest, mult * (1.0 - x), nodes)
        out.append((float(x), float(math.exp(log_d))))
    return out


def marginal_summary(spec, grid_points=200):
    """Means plus a density grid for every coordinate."""
    grids = tuple(tuple(marginal_density_grid(spec, i, grid_points)) for i in range(1, spec.model.k + 1))
    return MarginalSummary(posterior_mean(spec).means, grids)
