import time

import numpy as np
import pytest

from conftest import ORACLE_BETA, ORACLE_LAMBDA
from mrentropy import (
    CountSample,
    DivergenceError,
    InfeasibleMomentError,
    OutcomeModel,
    beta_curve,
    solve_beta,
    solve_lambda_maxent,
)
from mrentropy.zeta import mean_of_f

TOL = 1e-10


def test_paper_beta(paper_model, paper_counts):
    start = time.perf_counter()
    r = solve_beta(paper_model, paper_counts, 2.3)
    assert time.perf_counter() - start < 1.0
    assert r.multiplier == pytest.approx(14.1166, abs=1e-3)
    assert r.multiplier == pytest.approx(ORACLE_BETA, abs=1e-8)
    assert r.residual <= TOL


def test_root_at_zero(paper_model, paper_counts):
    F0 = mean_of_f(paper_model, paper_counts, 0.0)
    assert F0 == pytest.approx(42 / 23, rel=1e-13)
    assert solve_beta(paper_model, paper_counts, F0).multiplier == 0.0


@pytest.mark.parametrize("F", [3.0, 1.0, 0.5, 7.0])
def test_infeasible(paper_model, paper_counts, F):
    with pytest.raises(InfeasibleMomentError):
        solve_beta(paper_model, paper_counts, F)


def test_too_close_to_extremity(paper_model, paper_counts):
    with pytest.raises(DivergenceError):
        solve_beta(paper_model, paper_counts, 2.9999)


class TestMaxEnt:
    def test_symmetric_moment(self, paper_model):
        assert solve_lambda_maxent(paper_model, 2.0).multiplier == 0.0

    def test_oracle_lambda(self, paper_model):
        r = solve_lambda_maxent(paper_model, 2.3)
        assert r.multiplier == pytest.approx(ORACLE_LAMBDA, abs=1e-8)

    def test_below_range(self, paper_model):
        with pytest.raises(InfeasibleMomentError):
            solve_lambda_maxent(paper_model, 0.9)


class TestCurve:
    def test_anchored_monotone(self, paper_model, paper_counts):
        pairs = beta_curve(paper_model, paper_counts, [2.0, 2.3, 2.9])
        betas = [b for _, b in pairs]
        assert betas[0] < betas[1] < betas[2]
        assert betas[1] == pytest.approx(14.1166, abs=1e-3)

    def test_single_point_at_bayes_mean(self, paper_model, paper_counts):
        F0 = mean_of_f(paper_model, paper_counts, 0.0)
        assert beta_curve(paper_model, paper_counts, [F0]) == [(F0, 0.0)]

    def test_reversed_grid(self, paper_model, paper_counts):
        grid = [1.5, 2.2, 2.6]
        forward = beta_curve(paper_model, paper_counts, grid)
        backward = beta_curve(paper_model, paper_counts, grid[::-1])
        assert backward == forward[::-1]

    def test_offending_entry_reported(self, paper_model, paper_counts):
        with pytest.raises(InfeasibleMomentError, match="entry 1"):
            beta_curve(paper_model, paper_counts, [2.0, 3.5])

    def test_full_figure_grid_increasing(self, paper_model, paper_counts):
        grid = np.round(np.arange(1.05, 2.951, 0.05), 10)
        betas = [b for _, b in beta_curve(paper_model, paper_counts, grid)]
        assert np.all(np.diff(betas) > 0)


def _random_instances(count, seed):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        f = np.sort(rng.uniform(0, 3, 3))
        if f[2] - f[0] < 0.5:
            continue
        m = rng.integers(0, 11, 3)
        span = f[2] - f[0]
        F = rng.uniform(f[0] + 0.15 * span, f[2] - 0.15 * span)
        out.append((OutcomeModel(tuple(f)), CountSample(tuple(m)), F))
    return out


@pytest.mark.parametrize("model, counts, F", _random_instances(50, 7))
def test_newton_matches_bisection_and_self_consistent(model, counts, F):
    newton = solve_beta(model, counts, F)
    bisect = solve_beta(model, counts, F, solver="bisection")
    # tolerance is on the moment scale
    assert abs(newton.achieved_moment - bisect.achieved_moment) <= 10 * TOL
    assert abs(mean_of_f(model, counts, newton.multiplier) - F) <= 2 * TOL
    assert abs(mean_of_f(model, counts, newton.multiplier, method="quadrature") - F) <= 1e-8


def test_monotone_in_moment():
    rng = np.random.default_rng(3)
    for model, counts, F in _random_instances(10, 3):
        lo, hi = min(model.f), max(model.f)
        F1, F2 = np.sort(rng.uniform(lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo), 2))
        assert solve_beta(model, counts, F1).multiplier < solve_beta(model, counts, F2).multiplier
