import numpy as np
import pytest

from momcs.objectives import PartitionError
from momcs.sensing import Ensemble
from momcs.theory_lab import certificate_holds, estimate_moment_ratio, fit_certificate_constant, mom_mean_1d


def test_mom_mean_small_cases():
    assert mom_mean_1d([1.0, 2.0, 3.0, 4.0], 2) == 1.5
    assert mom_mean_1d([1.0, 2.0, 3.0, 4.0], 1) == 2.5
    assert mom_mean_1d([1.0, 2.0, 3.0, 4.0], 4) == 2.0


@pytest.mark.parametrize("samples, M", [([1.0, 2.0, 3.0], 2), ([], 1), ([1.0], 0)])
def test_mom_mean_partition_errors(samples, M):
    with pytest.raises(PartitionError):
        mom_mean_1d(samples, M)


def test_mom_mean_translation():
    samples = np.random.default_rng(0).standard_normal(100)
    assert mom_mean_1d(samples + 7.0, 10) == pytest.approx(mom_mean_1d(samples, 10) + 7.0, abs=1e-12)


def test_mom_mean_ignores_a_few_outliers():
    rng = np.random.default_rng(1)
    samples = rng.permutation(np.concatenate([rng.standard_normal(990), np.full(10, 1e6)]))
    assert abs(mom_mean_1d(samples, 50)) < 1.0
    assert np.mean(samples) > 1e3


def test_moment_ratio_gaussian():
    ratio = estimate_moment_ratio(Ensemble.gaussian(), 10, 50000, n=8, seed=0)
    assert ratio == pytest.approx(3**0.25, abs=0.05)


def test_moment_ratio_of_signs_along_an_axis():
    assert estimate_moment_ratio(Ensemble.rademacher(), np.array([[1.0, 0.0, 0.0]]), 1000, seed=3) == 1.0


def test_moment_ratio_heavy_tails():
    axis = np.array([[2.0, 0.0, 0.0, 0.0]])
    gaussian = estimate_moment_ratio(Ensemble.gaussian(), axis, 20000, seed=4)
    heavy = estimate_moment_ratio(Ensemble.student_t(4), axis, 20000, seed=4)
    assert heavy > gaussian
    assert np.isfinite(heavy)


@pytest.mark.slow
def test_student_t_moment_ratio_is_bounded_over_random_directions():
    ratio = estimate_moment_ratio(Ensemble.student_t(4), 200, 50000, n=50, seed=0)
    assert np.isfinite(ratio)
    assert ratio <= 4


def test_moment_ratio_arguments():
    with pytest.raises(ValueError):
        estimate_moment_ratio(Ensemble.gaussian(), 3, 100)
    with pytest.raises(ValueError):
        estimate_moment_ratio(Ensemble.gaussian(), np.zeros((1, 3)), 100)


def test_certificate_constant():
    assert fit_certificate_constant([1.0, 2.0], [1.0, 1.0], [0.0, 1.0]) == 1.0
    assert fit_certificate_constant([2.0], [1.0], [-5.0]) == 2.0
    assert fit_certificate_constant([1.0, 2.0, 3.0], [1.0, 1.0, 1.0], [0.0, 0.0, 0.0], quantile=0.5) == 2.0
    assert fit_certificate_constant([0.0], [0.0], [0.0]) == 0.0
    assert fit_certificate_constant([1.0], [0.0], [0.0]) == np.inf


def test_certificate_constant_arguments():
    with pytest.raises(ValueError):
        fit_certificate_constant([], [], [])
    with pytest.raises(ValueError):
        fit_certificate_constant([1.0], [1.0, 2.0], [0.0])
    with pytest.raises(ValueError):
        fit_certificate_constant([1.0], [1.0], [0.0], quantile=2.0)


def test_certificate_holds():
    assert certificate_holds([1.0, 3.0], [1.0, 1.0], [0.0, 0.0], 2.0).tolist() == [True, False]


def test_certificate_constant_is_an_order_statistic_with_infinite_ratios():
    errors, sigmas, taus = [1.0, 1.0, 4.0], [1.0, 0.0, 1.0], [0.0, 0.0, 1.0]
    assert fit_certificate_constant(errors, sigmas, taus) == np.inf
    assert fit_certificate_constant(errors, sigmas, taus, quantile=0.5) == 2.0
    assert fit_certificate_constant(errors, sigmas, taus, quantile=0.0) == 1.0


def test_certificate_holds_with_an_infinite_constant():
    assert certificate_holds([1.0, 0.0, 5.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0], np.inf).tolist() == [True, True, True]
    assert certificate_holds([1.0, 0.0], [0.0, 0.0], [0.0, 0.0], 3.0).tolist() == [False, True]


@pytest.mark.parametrize("c", [float("nan"), -1.0])
def test_certificate_holds_rejects_invalid_constants(c):
    with pytest.raises(ValueError):
        certificate_holds([1.0], [1.0], [0.0], c)
