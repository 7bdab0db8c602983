"""Normalizer of the tilted multinomial posterior on the simplex.

The quantity evaluated everywhere in this module is

    zeta'(beta; m, f) = integral over the simplex of
                        prod_i exp(beta * f_i * theta_i) * theta_i ** m_i

with respect to ``d theta_1 ... d theta_{k-1}``. The multinomial coefficient
is left out; it cancels in every density, mean and moment.

Three interchangeable evaluators are provided:

* :func:`zeta_quadrature` -- tensor Gauss-Legendre on the unit cube mapped
  onto the simplex (the reference result for ``k <= 5``),
* :func:`zeta_nested_series` -- nested confluent hypergeometric series
  obtained by integrating one coordinate at a time,
* :func:`zeta_monte_carlo` -- plain sampling of uniform simplex points.

All values are carried as natural logarithms.
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from scipy.special import gammaln, logsumexp

from mrentropy.errors import DimensionError, SeriesDivergenceError, UseMonteCarloError, ValidationError
from mrentropy.model import as_counts, as_model

METHODS = ("series", "quadrature", "monte-carlo")

#: Largest number of types handled by deterministic quadrature.
MAX_QUADRATURE_K = 5
SERIES_TOL = 1e-14
SERIES_MAX_TERMS = 10**6
MC_MIN_SAMPLES = 1000

# quadrature level -> Gauss-Legendre nodes per axis (the level+1 rule is
# evaluated too, for the error estimate)
DEFAULT_LEVEL = {1: 1, 2: 4, 3: 3, 4: 2, 5: 1}


def nodes_per_axis(level):
    """Number of Gauss-Legendre nodes per axis used at ``level``: ``8 * 2**level``."""
    return 8 * 2 ** int(level)


@dataclass(frozen=True)
class ZetaEvaluation:
    """Result of a normalizer evaluation.

    ``error_estimate`` is an absolute error on ``log_value``;
    ``terms_or_nodes`` counts series terms, quadrature nodes or samples.
    """

    log_value: float
    method: str
    error_estimate: float
    terms_or_nodes: int

    @property
    def value(self):
        return math.exp(self.log_value)


def _check_inputs(model, counts):
    model = as_model(model)
    counts = as_counts(counts).check_against(model)
    return model, counts


# --------------------------------------------------------------------------
# nested series
# --------------------------------------------------------------------------


class _NestedSeries:
    """Evaluator for one ``(f, m, beta)`` triple.

    Integrating out ``theta_{k-1}``, then ``theta_{k-2}``, ... against
    ``(1 - sum of the rest) ** c`` produces at level ``j`` the sum

        S_j(c) = Gamma(c + 1) * sum_q Gamma(a_j + q) t_j**q
                 / (Gamma(a_j + q + c + 1) q!) * S_{j+1}(c + a_j + q)

    with ``S_k = 1``, ``a_j = m_{k-j} + 1``, ``t_j = beta (f_{k-j} - f_k)``
    and ``c_1 = m_k``. ``b_j = a_j + c_j + 1`` so every gamma argument is a
    positive integer. Types are reordered so the last one has the smallest
    ``beta * f``; then all ``t_j >= 0`` and no cancellation occurs.
    """

    def __init__(self, f, m, beta, tol, max_terms):
        f = np.asarray(f, dtype=float)
        m = np.asarray(m, dtype=np.int64)
        k = len(f)
        last = int(np.argmin(beta * f))
        order = [i for i in range(k) if i != last] + [last]
        self.f = f[order]
        self.m = m[order]
        self.k = k
        self.beta = float(beta)
        self.tol = tol
        self.max_terms = max_terms
        self.terms = 0
        self.level_terms = {}
        self.t = {j: max(0.0, self.beta * (self.f[k - 1 - j] - self.f[k - 1])) for j in range(1, k)}
        self.a = {j: int(self.m[k - 1 - j]) + 1 for j in range(1, k)}

    def log_value(self):
        if self.k == 1:
            return float(self.beta * self.f[0])
        c1 = int(self.m[-1])
        return float(self.beta * self.f[-1] + self._level(1, c1, c1)[0])

    def _initial_terms(self, t):
        if t == 0.0:
            return 1
        return int(t + 10.0 * math.sqrt(t) + 30)

    def _level(self, j, lo, hi):
        """log S_j(c) for c = lo..hi."""
        if j == self.k:
            return np.zeros(hi - lo + 1)
        a, t = self.a[j], self.t[j]
        n_terms = min(self._initial_terms(t), self.max_terms)
        c = np.arange(lo, hi + 1, dtype=float)[:, None]
        log_tol = math.log(self.tol)
        while True:
            inner = self._level(j + 1, lo + a, hi + a + n_terms - 1)
            q = np.arange(n_terms, dtype=float)[None, :]
            idx = (c - lo).astype(np.int64) + np.arange(n_terms)[None, :]
            log_terms = (
                gammaln(c + 1)
                + gammaln(a + q)
                - gammaln(a + q + c + 1)
                - gammaln(q + 1)
                + inner[idx]
            )
            if t == 0.0:
                # limit t -> 0: only the q = 0 term survives
                break
            log_terms = log_terms + q * math.log(t)
            running = np.logaddexp.accumulate(log_terms, axis=1)
            small = (log_terms - running) < log_tol
            if n_terms >= 3:
                three = small[:, 2:] & small[:, 1:-1] & small[:, :-2]
                if three.any(axis=1).all():
                    break
            if n_terms >= self.max_terms:
                raise SeriesDivergenceError(
                    f"series level {j} did not converge within {self.max_terms} terms",
                    {"level": j, "t": t, "a": a, "c_range": [lo, hi], "terms": n_terms,
                     "beta": self.beta},
                )
            n_terms = min(2 * n_terms, self.max_terms)
        self.terms += log_terms.size
        self.level_terms[j] = max(self.level_terms.get(j, 0), n_terms)
        return logsumexp(log_terms, axis=1)


def _log_zeta_series(f, m, beta, tol=SERIES_TOL, max_terms=SERIES_MAX_TERMS):
    ev = _NestedSeries(f, m, beta, tol, max_terms)
    return ev.log_value(), ev.terms


def zeta_nested_series(model, counts, beta, tol=SERIES_TOL, max_terms=SERIES_MAX_TERMS):
    """Evaluate the normalizer as a nested hypergeometric series.

    Parameters
    ----------
    model : OutcomeModel
    counts : CountSample
    beta : float
        Moment multiplier.
    tol : float
        A level stops once three consecutive terms each contribute less than
        ``tol`` relative to the running sum.
    max_terms : int
        Term budget per level.

    Returns
    -------
    ZetaEvaluation

    Raises
    ------
    SeriesDivergenceError
        When a level exceeds ``max_terms``.
    """
    model, counts = _check_inputs(model, counts)
    if not tol > 0:
        raise ValidationError("tol must be positive", "tol > 0")
    log_value, terms = _log_zeta_series(model.labels, counts.counts, float(beta), tol, max_terms)
    eps = np.finfo(float).eps
    err = (model.k - 1) * tol + 64 * eps * max(1.0, abs(log_value))
    return ZetaEvaluation(log_value, "series", err, int(terms))


# --------------------------------------------------------------------------
# quadrature
# --------------------------------------------------------------------------


@lru_cache(maxsize=16)
def _gauss_unit(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x, w = 0.5 * (x + 1.0), 0.5 * w
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def _log_zeta_quadrature(f, m, beta, nodes, block=None):
    """Tensor Gauss-Legendre on ``[0, 1]**(k-1)``.

    The cube maps onto the simplex by ``theta_i = u_i * prod_{j<i} (1 - u_j)``
    with Jacobian ``prod_i prod_{j<i} (1 - u_j)``.
    """
    f = np.asarray(f, dtype=float)
    m = np.asarray(m, dtype=float)
    k = len(f)
    if k == 1:
        return float(beta * f[0])
    d = k - 1
    x, w = _gauss_unit(nodes)
    log_x, log_1mx, log_w = np.log(x), np.log1p(-x), np.log(w)
    if block is None:
        block = max(1, int(2_000_000 // nodes ** (d - 1)))
    parts = []
    for start in range(0, nodes, block):
        sl = slice(start, min(nodes, start + block))
        log_rest = 0.0
        exponent = 0.0
        total = 0.0
        for i in range(d):
            shape = [1] * d
            src = sl if i == 0 else slice(None)
            shape[i] = len(log_x[src])
            lu = log_x[src].reshape(shape)
            l1u = log_1mx[src].reshape(shape)
            lw = log_w[src].reshape(shape)
            log_theta = log_rest + lu
            exponent = exponent + beta * f[i] * np.exp(log_theta)
            total = total + lw + log_rest
            if m[i]:
                total = total + m[i] * log_theta
            log_rest = log_rest + l1u
        exponent = exponent + beta * f[d] * np.exp(log_rest)
        if m[d]:
            total = total + m[d] * log_rest
        parts.append(logsumexp(total + exponent))
    return float(logsumexp(parts))


def zeta_quadrature(model, counts, beta, level=None):
    """Evaluate the normalizer by deterministic quadrature over the simplex.

    Uses ``nodes_per_axis(level + 1)`` nodes per axis; the change from the
    ``level`` rule is reported as ``error_estimate``. Defaults to a level
    suited to ``k`` (128 nodes per axis for three types).

    Raises
    ------
    UseMonteCarloError
        For more than five types.
    """
    model, counts = _check_inputs(model, counts)
    if model.k > MAX_QUADRATURE_K:
        raise UseMonteCarloError(
            f"quadrature supports k <= {MAX_QUADRATURE_K}, got k={model.k}; use monte-carlo",
            f"k <= {MAX_QUADRATURE_K}",
        )
    if level is None:
        level = DEFAULT_LEVEL[model.k]
    if int(level) < 1:
        raise ValidationError("level must be >= 1", "level >= 1")
    level = int(level)
    f, m = model.labels, counts.counts
    coarse = _log_zeta_quadrature(f, m, beta, nodes_per_axis(level))
    fine_nodes = nodes_per_axis(level + 1)
    fine = _log_zeta_quadrature(f, m, beta, fine_nodes)
    eps = np.finfo(float).eps
    err = abs(fine - coarse) + 1e3 * eps * max(1.0, abs(fine))
    return ZetaEvaluation(fine, "quadrature", err, fine_nodes ** (model.k - 1))


# --------------------------------------------------------------------------
# Monte Carlo
# --------------------------------------------------------------------------


def _uniform_simplex(rng, size, k, stratified=False):
    if stratified:
        u = np.empty((size, k))
        for j in range(k):
            u[:, j] = (rng.permutation(size) + rng.random(size)) / size
        e = -np.log1p(-u)
    else:
        e = rng.standard_exponential((size, k))
    return e / e.sum(axis=1, keepdims=True)


def _log_mc_weights(f, m, beta, theta):
    return beta * theta @ f + np.log(theta) @ m


def zeta_monte_carlo(model, counts, beta, samples=100_000, seed=0, stratified=False):
    """Estimate the normalizer from uniform simplex samples.

    Points are ``k`` unit exponential variates divided by their sum; the
    sample mean of the integrand times the simplex volume ``1/(k-1)!`` is
    the estimate. ``error_estimate`` is the standard error of that mean,
    transferred to the log scale. Identical ``seed`` gives identical output.

    ``stratified=True`` draws the underlying uniforms from a Latin hypercube
    instead, which gives an independent estimator for cross-checks.
    """
    model, counts = _check_inputs(model, counts)
    samples = int(samples)
    if samples < MC_MIN_SAMPLES:
        raise ValidationError(f"need at least {MC_MIN_SAMPLES} samples", f"samples >= {MC_MIN_SAMPLES}")
    rng = np.random.default_rng(seed)
    theta = _uniform_simplex(rng, samples, model.k, stratified)
    logw = _log_mc_weights(model.labels, counts.counts, float(beta), theta)
    shift = logw.max()
    w = np.exp(logw - shift)
    mean = w.mean()
    se = w.std(ddof=1) / math.sqrt(samples)
    log_value = float(shift + math.log(mean) - gammaln(model.k))
    return ZetaEvaluation(log_value, "monte-carlo", float(se / mean), samples)


# --------------------------------------------------------------------------
# dispatch and means
# --------------------------------------------------------------------------


def evaluate_zeta(model, counts, beta, method="series", **options):
    """Dispatch to one of :data:`METHODS`."""
    if method == "series":
        return zeta_nested_series(model, counts, beta, **options)
    if method == "quadrature":
        return zeta_quadrature(model, counts, beta, **options)
    if method == "monte-carlo":
        return zeta_monte_carlo(model, counts, beta, **options)
    raise ValidationError(f"unknown zeta method {method!r}; choose from {METHODS}", "method")


def _log_zeta(f, m, beta, method="series", **options):
    """Raw log normalizer on arrays, without input validation."""
    if method == "series":
        return _log_zeta_series(f, m, beta, **options)[0]
    if method == "quadrature":
        level = options.get("level") or DEFAULT_LEVEL[len(f)]
        return _log_zeta_quadrature(f, m, beta, nodes_per_axis(level + 1))
    model = as_model(f)
    return zeta_monte_carlo(model, as_counts(m), beta, **options).log_value


def log_zeta_and_means(model, counts, beta, method="series", **options):
    """Log normalizer and the vector of posterior means ``<theta_i>``.

    Each mean is the ratio of the normalizer with ``m_i`` raised by one to
    the plain normalizer; the last mean is one minus the others.
    """
    model, counts = _check_inputs(model, counts)
    f, m = model.labels, counts.counts
    base = _log_zeta(f, m, beta, method, **options)
    means = np.empty(model.k)
    for i in range(model.k - 1):
        bumped = m.copy()
        bumped[i] += 1
        means[i] = math.exp(_log_zeta(f, bumped, beta, method, **options) - base)
    means[-1] = 1.0 - means[:-1].sum()
    return base, means


def posterior_means(model, counts, beta, method="series", **options):
    return log_zeta_and_means(model, counts, beta, method, **options)[1]


def mean_via_ratio(model, counts, beta, i, method="series", **options):
    """Posterior mean of ``theta_i`` (``i`` is 1-based, ``1 <= i <= k``).

    >>> round(mean_via_ratio((1, 2, 3), (11, 2, 7), 0.0, 1), 10) == round(12 / 23, 10)
    True
    """
    model, counts = _check_inputs(model, counts)
    if not 1 <= int(i) <= model.k:
        raise DimensionError(f"type index {i} outside 1..{model.k}")
    i = int(i)
    if i == model.k:
        return float(posterior_means(model, counts, beta, method, **options)[-1])
    f, m = model.labels, counts.counts
    bumped = m.copy()
    bumped[i - 1] += 1
    return math.exp(_log_zeta(f, bumped, beta, method, **options) - _log_zeta(f, m, beta, method, **options))


def mean_of_f(model, counts, beta, method="series", **options):
    """Posterior expectation of ``f(theta)``."""
    model = as_model(model)
    return float(model.labels @ posterior_means(model, counts, beta, method, **options))
