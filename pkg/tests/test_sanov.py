import numpy as np
import pytest

from mrentropy import (
    CountSample,
    EmptySampleError,
    InfeasibleMomentError,
    compare_estimators,
    relative_entropy,
    sample_average,
    sanov_estimate,
)


def test_paper_values(paper_model, paper_counts):
    est = sanov_estimate(paper_model, paper_counts, 2.3)
    np.testing.assert_allclose(est.p_star, [0.3015, 0.0971, 0.6015], atol=5e-4)
    assert sum(est.p_star) == pytest.approx(1.0, abs=1e-9)
    assert np.dot(est.p_star, paper_model.f) == pytest.approx(2.3, abs=1e-8)


def test_no_tilt_at_sample_average(paper_model, paper_counts):
    est = sanov_estimate(paper_model, paper_counts, sample_average(paper_model, paper_counts))
    assert est.eta == 0.0
    np.testing.assert_allclose(est.p_star, [0.55, 0.1, 0.35], rtol=1e-15)


@pytest.mark.parametrize("F", [1.2, 2.0, 2.7])
def test_zero_count_stays_zero(paper_model, F):
    est = sanov_estimate(paper_model, CountSample((4, 0, 5)), F)
    assert est.p_star[1] == 0.0


def test_unreachable_moment(paper_model):
    with pytest.raises(InfeasibleMomentError):
        sanov_estimate(paper_model, CountSample((4, 3, 0)), 2.3)
    with pytest.raises(InfeasibleMomentError):
        sanov_estimate(paper_model, CountSample((4, 3, 2)), 3.0)


def test_empty_sample(paper_model):
    with pytest.raises(EmptySampleError):
        sanov_estimate(paper_model, CountSample((0, 0, 0)), 2.0)


def test_scale_free(paper_model, paper_counts):
    a = sanov_estimate(paper_model, paper_counts, 2.3)
    b = sanov_estimate(paper_model, CountSample((22, 4, 14)), 2.3)
    np.testing.assert_allclose(a.p_star, b.p_star, rtol=1e-12)


def test_eta_increasing(paper_model, paper_counts):
    grid = np.round(np.linspace(1.1, 2.9, 19), 12)
    etas = np.array([sanov_estimate(paper_model, paper_counts, F).eta for F in grid])
    assert np.all(np.diff(etas) > 0)
    # zero exactly at the sample average 1.8
    assert list(grid[np.abs(etas) < 1e-12]) == [1.8]


def test_minimizes_divergence_on_constraint_line(paper_model, paper_counts):
    F = 2.3
    est = sanov_estimate(paper_model, paper_counts, F)
    Q = np.array([0.55, 0.1, 0.35])
    # the constraint line is parametrized by p3: p1 = p3 + 2 - F, p2 = 1 - p1 - p3
    p3 = np.linspace(0, 1, 2_000_001)
    p1 = p3 + 2.0 - F
    p2 = 1.0 - p1 - p3
    ok = (p1 >= 0) & (p2 >= 0)
    p = np.stack([p1[ok], p2[ok], p3[ok]], axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.where(p > 0, p * np.log(p / Q), 0.0).sum(axis=1)
    best = d.min()
    ours = relative_entropy(est.p_star, Q)
    assert ours <= best + 1e-12
    assert ours == pytest.approx(best, abs=1e-4)
    np.testing.assert_allclose(p[np.argmin(d)], est.p_star, atol=1e-5)


class TestCompare:
    def test_paper_instance(self, paper_model, paper_counts):
        rec = compare_estimators(paper_model, paper_counts, 2.3)
        assert rec.max_abs_diff < 0.015
        assert rec.sample_average == pytest.approx(1.8)
        assert rec.moment_gap == pytest.approx(0.5)
        assert rec.divergence > 0

    def test_deterministic(self, paper_model, paper_counts):
        assert compare_estimators(paper_model, paper_counts, 2.3) == compare_estimators(paper_model, paper_counts, 2.3)

    def test_asymptotic_agreement(self, paper_model):
        base = np.array([11, 2, 7])
        F = sample_average(paper_model, CountSample(tuple(base)))
        gaps = [compare_estimators(paper_model, CountSample(tuple(base * s)), F).max_abs_diff for s in (1, 10, 100)]
        assert gaps[0] > gaps[1] > gaps[2]

    def test_record_serializable(self, paper_model, paper_counts):
        d = compare_estimators(paper_model, paper_counts, 2.3).to_dict()
        assert set(d) >= {"mre_means", "sanov_p", "abs_diff", "divergence", "moment_gap"}
