import numpy as np
import pytest
from scipy import stats

from momcs.sensing import Ensemble, EnsembleKind, NoiseSpec, sample_measurement_matrix


def test_gaussian_entry_variance():
    A = sample_measurement_matrix(2000, 50, Ensemble.gaussian(), seed=0)
    assert A.shape == (2000, 50)
    assert 0.93 <= np.var(A) <= 1.07


def test_student_t_entry_variance_and_kurtosis():
    A = sample_measurement_matrix(2000, 50, Ensemble.student_t(4), seed=0)
    assert 0.9 <= np.var(A) <= 1.1
    assert stats.kurtosis(A.ravel(), fisher=False) > 3


def test_rademacher_entries():
    A = sample_measurement_matrix(100, 10, Ensemble.rademacher(), seed=1)
    assert set(np.unique(A)) == {-1.0, 1.0}


def test_sampling_is_deterministic():
    for ensemble in (Ensemble.gaussian(), Ensemble.student_t(4), Ensemble.rademacher()):
        np.testing.assert_array_equal(
            sample_measurement_matrix(20, 5, ensemble, seed=42), sample_measurement_matrix(20, 5, ensemble, seed=42)
        )


@pytest.mark.parametrize("dof", [2, 1.5, -1])
def test_student_t_needs_finite_variance(dof):
    with pytest.raises(ValueError):
        Ensemble.student_t(dof)


def test_dof_only_for_student_t():
    with pytest.raises(ValueError):
        Ensemble(kind=EnsembleKind.gaussian, dof=4)


def test_bad_dims():
    with pytest.raises(ValueError):
        sample_measurement_matrix(0, 3, Ensemble.gaussian())


@pytest.mark.parametrize(
    "tag, expected",
    [
        ("gaussian", Ensemble.gaussian()),
        ("Rademacher", Ensemble.rademacher()),
        ("student_t(4)", Ensemble.student_t(4)),
        ("studentt(3.5)", Ensemble.student_t(3.5)),
        ({"kind": "student_t", "dof": 3}, Ensemble.student_t(3)),
    ],
)
def test_parse(tag, expected):
    assert Ensemble.parse(tag) == expected


def test_tags():
    assert Ensemble.student_t(4).tag == "student_t(4)"
    assert Ensemble.parse(Ensemble.student_t(4).tag) == Ensemble.student_t(4)
    assert NoiseSpec(distribution="student_t(3)", sigma=0.5).tag == "student_t(3)*0.5"


def test_noise_spec():
    assert np.array_equal(NoiseSpec(sigma=0).sample(5, seed=0), np.zeros(5))
    noise = NoiseSpec(distribution="student_t(3)", sigma=2.0).sample(100_000, seed=3)
    assert abs(np.std(noise) - 2.0) < 0.3
    with pytest.raises(ValueError):
        NoiseSpec(sigma=-1)
