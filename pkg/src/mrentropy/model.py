"""Domain types for multinomial models on the probability simplex.

The outcome model assigns a numeric label ``f[i]`` to each of ``k`` types.
Observed data are counts over those types and the moment constraint fixes
the expected value of ``f(theta) = sum_i f[i] * theta[i]``.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.special import gammaln, xlogy

from mrentropy.errors import (
    DimensionError,
    EmptySampleError,
    InfeasibleMomentError,
    SupportError,
    ValidationError,
)

#: Tolerance on ``sum(theta) - 1`` for a point to count as on the simplex.
SIMPLEX_TOL = 1e-12


@dataclass(frozen=True)
class OutcomeModel:
    """The ``k`` outcome types and their numeric labels.

    Parameters
    ----------
    f : sequence of float
        Label (score) of each type, e.g. ``(1, 2, 3)``.
    names : sequence of str, optional
        Human readable type names. Defaults to ``"1" ... "k"``.
    """

    f: tuple
    names: tuple = field(default=None, compare=False)

    def __post_init__(self):
        try:
            f = tuple(float(v) for v in self.f)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"labels must be real numbers: {exc}", "f finite") from None
        if len(f) < 2:
            raise ValidationError(f"need at least two types, got {len(f)}", "k >= 2")
        if not all(math.isfinite(v) for v in f):
            raise ValidationError("labels must be finite", "f finite")
        if min(f) == max(f):
            raise ValidationError("at least two labels must differ", "f not constant")
        names = self.names
        if names is None:
            names = tuple(str(i + 1) for i in range(len(f)))
        else:
            names = tuple(str(n) for n in names)
            if len(names) != len(f):
                raise DimensionError("one name per type required")
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "names", names)

    @property
    def k(self):
        return len(self.f)

    @property
    def labels(self):
        return np.asarray(self.f, dtype=float)

    def is_feasible(self, F):
        """True when ``min(f) < F < max(f)``."""
        return min(self.f) < F < max(self.f)

    def check_moment(self, F):
        F = float(F)
        if not self.is_feasible(F):
            raise InfeasibleMomentError(
                f"moment F={F!r} must lie strictly inside "
                f"({min(self.f)!r}, {max(self.f)!r})"
            )
        return F


@dataclass(frozen=True)
class CountSample:
    """Observed counts ``m`` over the outcome types; ``n`` is their total.

    An all-zero sample (``n == 0``) is allowed and represents "no data".
    """

    m: tuple

    def __post_init__(self):
        m = []
        for v in self.m:
            if isinstance(v, bool) or not float(v).is_integer():
                raise ValidationError(f"counts must be integers, got {v!r}", "m integer")
            if v < 0:
                raise ValidationError(f"counts must be non-negative, got {v!r}", "m >= 0")
            m.append(int(v))
        object.__setattr__(self, "m", tuple(m))

    @property
    def n(self):
        return sum(self.m)

    @property
    def k(self):
        return len(self.m)

    @property
    def counts(self):
        return np.asarray(self.m, dtype=np.int64)

    @classmethod
    def empty(cls, k):
        return cls((0,) * k)

    def check_against(self, model):
        if self.k != model.k:
            raise DimensionError(
                f"{self.k} counts given for a model with {model.k} types", "len(m) == k"
            )
        return self


@dataclass(frozen=True)
class MomentConstraint:
    """Target expected value ``F`` of ``f(theta)``."""

    F: float

    def __post_init__(self):
        F = float(self.F)
        if not math.isfinite(F):
            raise ValidationError("moment must be finite", "F finite")
        object.__setattr__(self, "F", F)


@dataclass(frozen=True)
class SimplexPoint:
    """A point ``theta`` of the probability simplex."""

    theta: tuple

    def __post_init__(self):
        theta = tuple(float(v) for v in self.theta)
        if any(not (v >= 0.0) for v in theta):
            raise ValidationError("simplex coordinates must be non-negative", "theta >= 0")
        if abs(math.fsum(theta) - 1.0) > SIMPLEX_TOL:
            raise ValidationError(
                f"coordinates sum to {math.fsum(theta)!r}, not 1", "sum(theta) == 1"
            )
        object.__setattr__(self, "theta", theta)

    @property
    def k(self):
        return len(self.theta)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.theta, dtype=dtype or float)


def as_simplex_point(theta):
    if isinstance(theta, SimplexPoint):
        return theta
    return SimplexPoint(tuple(np.ravel(theta)))


def as_counts(counts):
    if isinstance(counts, CountSample):
        return counts
    return CountSample(tuple(np.ravel(counts)))


def as_model(model):
    if isinstance(model, OutcomeModel):
        return model
    return OutcomeModel(tuple(np.ravel(model)))


def log_multinomial_likelihood(counts, theta):
    """Natural log of the multinomial probability of ``counts`` given ``theta``."""
    counts = as_counts(counts)
    theta = as_simplex_point(theta)
    if counts.k != theta.k:
        raise DimensionError(f"{counts.k} counts but {theta.k} probabilities")
    m = counts.counts
    th = np.asarray(theta)
    log_coef = gammaln(counts.n + 1) - gammaln(m + 1).sum()
    # xlogy gives 0*log(0) = 0 and -inf for m > 0 at theta = 0
    return float(log_coef + xlogy(m, th).sum())


def multinomial_likelihood(counts, theta):
    """``n! / (m_1! ... m_k!) * prod theta_i ** m_i``.

    Evaluated in log space, so large ``n`` does not overflow. Returns 0
    when a type with non-zero count has probability 0.

    >>> multinomial_likelihood(CountSample((1, 1)), SimplexPoint((0.5, 0.5)))
    0.5
    """
    return math.exp(log_multinomial_likelihood(counts, theta))


def sample_average(model, counts):
    """Sample average ``sum_i f_i m_i / n`` of the observed counts."""
    model = as_model(model)
    counts = as_counts(counts).check_against(model)
    if counts.n == 0:
        raise EmptySampleError("sample average of an empty sample", "n > 0")
    return float(math.fsum(fi * mi for fi, mi in zip(model.f, counts.m)) / counts.n)


def relative_entropy(p, q, atol=1e-9):
    """Information divergence ``D(p || q)`` in nats.

    Parameters
    ----------
    p, q : array_like
        Discrete distributions of equal length, each normalized within
        ``atol``.

    Raises
    ------
    SupportError
        If ``q[i] == 0`` while ``p[i] > 0``.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise DimensionError(f"shape mismatch {p.shape} vs {q.shape}")
    for name, v in (("p", p), ("q", q)):
        if np.any(v < 0) or abs(v.sum() - 1.0) > atol:
            raise ValidationError(f"{name} is not a normalized distribution", "normalized")
    if np.any((q == 0) & (p > 0)):
        raise SupportError("q vanishes where p has mass", "supp(p) within supp(q)")
    mask = p > 0
    return float(max(0.0, np.sum(p[mask] * np.log(p[mask] / q[mask]))))
