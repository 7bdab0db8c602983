"""Large-deviation (exponential tilting) point estimate and comparison report.

Given empirical frequencies ``Q = m / n`` the estimate is the distribution
closest to ``Q`` in relative entropy among those with ``sum_i p_i f_i = F``:

    p*_i = Q_i exp(eta f_i) / sum_j Q_j exp(eta f_j)

with a single scalar ``eta``. It treats ``F`` as if it were a sample
average and only has a justification as ``n`` grows large.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from mrentropy.errors import InfeasibleMomentError
from mrentropy.model import as_counts, as_model, relative_entropy, sample_average
from mrentropy.solver import DEFAULT_TOL, solve_increasing
from mrentropy.updaters import posterior_mean, simultaneous_update


@dataclass(frozen=True)
class TiltedEstimate:
    p_star: tuple
    eta: float
    achieved_moment: float
    iterations: int = 0


def _tilt(Q, f, eta):
    with np.errstate(divide="ignore"):
        log_w = np.log(Q) + eta * f
    return np.exp(log_w - logsumexp(log_w))


def sanov_estimate(model, counts, F, tol=DEFAULT_TOL):
    """Exponentially tilted empirical distribution matching ``F``.

    Raises
    ------
    InfeasibleMomentError
        Unless ``F`` lies strictly between the smallest and largest label
        among observed types (types with zero count keep zero probability).
    """
    model = as_model(model)
    counts = as_counts(counts).check_against(model)
    # raises EmptySampleError for n == 0
    sample_average(model, counts)
    f = model.labels
    Q = counts.counts / counts.n
    support = f[Q > 0]
    F = float(F)
    if not support.min() < F < support.max():
        raise InfeasibleMomentError(
            f"F={F!r} not reachable by tilting counts supported on labels {sorted(set(support.tolist()))}"
        )

    def moment(eta):
        return float(_tilt(Q, f, eta) @ f)

    def slope(eta):
        p = _tilt(Q, f, eta)
        return float(p @ f**2 - (p @ f) ** 2)

    eta, achieved, iterations = solve_increasing(moment, F, tol, slope)
    p = _tilt(Q, f, eta)
    return TiltedEstimate(tuple(float(v) for v in p), float(eta), float(p @ f), iterations)


@dataclass(frozen=True)
class Comparison:
    """Side by side MrE posterior means and the tilted estimate."""

    mre_means: tuple
    sanov_p: tuple
    abs_diff: tuple
    max_abs_diff: float
    divergence: float
    sample_average: float
    moment: float
    moment_gap: float
    beta: float
    eta: float

    def to_dict(self):
        return {name: getattr(self, name) for name in self.__dataclass_fields__}


def compare_estimators(model, counts, F, tol=DEFAULT_TOL, method="series"):
    """Compare simultaneous-update means with the tilted estimate.

    ``divergence`` is ``D(p* || MrE means)`` and ``moment_gap`` is
    ``F - sample average``; a large gap marks an ill-posed instance.
    """
    model = as_model(model)
    counts = as_counts(counts).check_against(model)
    spec = simultaneous_update(model, counts, F, tol, method)
    means = np.asarray(posterior_mean(spec).means)
    tilted = sanov_estimate(model, counts, F, tol)
    p = np.asarray(tilted.p_star)
    diff = np.abs(means - p)
    s_avg = sample_average(model, counts)
    return Comparison(
        mre_means=tuple(float(v) for v in means),
        sanov_p=tilted.p_star,
        abs_diff=tuple(float(v) for v in diff),
        max_abs_diff=float(diff.max()),
        divergence=relative_entropy(p, means / means.sum()),
        sample_average=s_avg,
        moment=float(F),
        moment_gap=float(F) - s_avg,
        beta=spec.multiplier,
        eta=tilted.eta,
    )
