import numpy as np
import pytest

from momcs.generator import GeneratorNet, forward, forward_with_cache, random_generator
from momcs.objectives import (
    LossKind,
    TrimFractionError,
    batch_loss,
    batch_losses,
    erm_value,
    l1_value,
    make_partition,
    mom_direct_value,
    mom_tournament_value,
    objective_gradient,
    select_median,
    trimmed_indices,
    trimmed_value,
)
from momcs.sensing import Ensemble, NoiseSpec, SensingProblem, synthesize
from tests.objectives.helpers import IDENTITY_1D, scalar_problem

NET = random_generator([3, 10, 24], seed=4)
Z_STAR = np.array([0.5, -1.0, 1.5])


def noisy_problem(m=40, sigma=0.5, seed=0):
    return synthesize(NET, Z_STAR, m, Ensemble.gaussian(), NoiseSpec(sigma=sigma), seed=seed)


def loop_loss(problem, z, batch):
    x = forward(NET, z)
    total = 0.0
    for i in batch:
        prediction = sum(float(problem.A[i, j]) * float(x[j]) for j in range(problem.n))
        total += (prediction - float(problem.y[i])) ** 2
    return total / len(batch)


def test_batch_loss_zero_at_truth():
    problem = noisy_problem(sigma=0.0)
    assert batch_loss(problem, NET, Z_STAR, range(10)) == 0.0
    assert erm_value(problem, NET, Z_STAR) == 0.0
    assert l1_value(problem, NET, Z_STAR) == 0.0
    assert mom_direct_value(problem, NET, Z_STAR, make_partition(40, 4)).value == 0.0


def test_single_row_batch():
    net = GeneratorNet(layer_dims=(1, 2), weights=(np.array([[1.0], [0.0]]),), biases=(np.zeros(2),))
    problem = SensingProblem(A=np.array([[1.0, 0.0]]), y=np.array([2.0]), z_star=np.zeros(1))
    assert batch_loss(problem, net, [5.0], [0]) == 9.0


def test_batch_loss_matches_loop():
    problem = noisy_problem()
    z = np.array([0.1, 0.2, -0.3])
    batch = [3, 17, 0, 39, 8]
    assert batch_loss(problem, NET, z, batch) == pytest.approx(loop_loss(problem, z, batch), abs=1e-12)
    assert erm_value(problem, NET, z) == pytest.approx(loop_loss(problem, z, range(40)), abs=1e-12)


def test_batch_losses_vector():
    problem = noisy_problem()
    partition = make_partition(40, 5, seed=1, shuffle=True)
    z = np.array([1.0, 0.0, -1.0])
    expected = [batch_loss(problem, NET, z, batch) for batch in partition.batches]
    np.testing.assert_allclose(batch_losses(problem, forward(NET, z), partition), expected, rtol=1e-14)


def test_tournament_equal_players():
    problem = noisy_problem()
    assert mom_tournament_value(problem, NET, Z_STAR, Z_STAR, make_partition(40, 8)).value == 0.0


def test_tournament_constructed_median():
    # z = 0 and z' = 1 give l_j(z) - l_j(z') = 2 y_j - 1
    problem = scalar_problem([1.0, 3.0, 2.0])
    selection = mom_tournament_value(problem, IDENTITY_1D, [0.0], [1.0], make_partition(3, 3))
    assert (selection.batch_index, selection.value) == (2, 3.0)


def test_tournament_lower_median():
    problem = scalar_problem([1.0, 1.5, 2.0, 2.5])
    selection = mom_tournament_value(problem, IDENTITY_1D, [0.0], [1.0], make_partition(4, 4))
    assert (selection.batch_index, selection.value) == (1, 2.0)


def test_swapping_players_negates_with_upper_median():
    problem = noisy_problem(seed=3)
    partition = make_partition(40, 4)
    z, z_prime = np.array([0.2, 0.1, 0.0]), np.array([-0.5, 1.0, 0.3])
    g = batch_losses(problem, forward(NET, z), partition) - batch_losses(problem, forward(NET, z_prime), partition)
    assert mom_tournament_value(problem, NET, z_prime, z, partition).value == -select_median(g, upper=True).value


def test_permuting_batches_keeps_median():
    problem = noisy_problem()
    partition = make_partition(40, 8, seed=2, shuffle=True)
    z, z_prime = np.zeros(3), np.ones(3)
    expected = mom_tournament_value(problem, NET, z, z_prime, partition).value
    for order in ([7, 6, 5, 4, 3, 2, 1, 0], [3, 0, 7, 1, 6, 2, 5, 4]):
        permuted = partition.permuted(order)
        assert mom_tournament_value(problem, NET, z, z_prime, permuted).value == expected
        assert mom_direct_value(problem, NET, z, permuted).value == mom_direct_value(problem, NET, z, partition).value


def test_one_batch_equals_erm():
    problem = noisy_problem()
    z = np.array([0.3, 0.3, 0.3])
    assert mom_direct_value(problem, NET, z, make_partition(40, 1)).value == pytest.approx(erm_value(problem, NET, z), abs=1e-12)
    assert trimmed_value(problem, NET, z, 1.0)[0] == pytest.approx(erm_value(problem, NET, z), abs=1e-12)


def test_median_survives_a_minority_of_corrupted_batches():
    problem = noisy_problem(m=100, seed=5)
    partition = make_partition(100, 10)
    z = np.array([0.4, -0.8, 1.2])
    clean = batch_losses(problem, forward(NET, z), partition)
    before = mom_direct_value(problem, NET, z, partition).value

    worst = np.argsort(clean)[-4:]
    corrupted = SensingProblem(A=problem.A, y=problem.y.copy(), z_star=problem.z_star)
    corrupted.y[partition.indices[worst]] += 1e6
    after = mom_direct_value(corrupted, NET, z, partition)
    assert after.value == before
    assert after.value <= clean.max()


def test_breakdown_bound_for_any_corrupted_minority():
    rng = np.random.default_rng(8)
    problem = noisy_problem(m=100, seed=6)
    partition = make_partition(100, 10)
    z = np.array([0.0, 0.5, -0.5])
    clean = batch_losses(problem, forward(NET, z), partition)
    for _ in range(20):
        batches = rng.choice(10, size=4, replace=False)
        corrupted = SensingProblem(A=problem.A.copy(), y=problem.y.copy(), z_star=problem.z_star)
        rows = partition.indices[batches].ravel()
        corrupted.y[rows] = rng.choice([-1e8, 1e8], size=rows.size)
        corrupted.A[rows] *= 1e3
        assert mom_direct_value(corrupted, NET, z, partition).value <= np.delete(clean, batches).max()


def test_scaling():
    problem = noisy_problem()
    c = 3.0
    scaled = SensingProblem(A=c * problem.A, y=c * problem.y, z_star=problem.z_star)
    partition = make_partition(40, 4)
    z, z_prime = np.array([0.1, 0.2, 0.3]), np.array([1.0, -1.0, 0.0])
    assert erm_value(scaled, NET, z) == pytest.approx(c**2 * erm_value(problem, NET, z), rel=1e-12)
    assert mom_direct_value(scaled, NET, z, partition).value == pytest.approx(
        c**2 * mom_direct_value(problem, NET, z, partition).value, rel=1e-12
    )
    assert mom_tournament_value(scaled, NET, z, z_prime, partition).value == pytest.approx(
        c**2 * mom_tournament_value(problem, NET, z, z_prime, partition).value, rel=1e-12
    )
    candidates = [np.array(candidate) for candidate in ([0.0, 0.0, 0.0], [0.5, -1.0, 1.5], [1.0, 1.0, 1.0])]
    assert np.argmin([erm_value(scaled, NET, z) for z in candidates]) == np.argmin([erm_value(problem, NET, z) for z in candidates])


def test_l1_single_row():
    problem = scalar_problem([3.0])
    assert l1_value(problem, IDENTITY_1D, [0.0]) == 3.0


def test_l1_matches_loop():
    problem = noisy_problem()
    z = np.array([0.2, -0.2, 0.9])
    x = forward(NET, z)
    expected = sum(abs(float(problem.A[i] @ x) - float(problem.y[i])) for i in range(40)) / 40
    assert l1_value(problem, NET, z) == pytest.approx(expected, abs=1e-12)


def test_trimmed_example():
    assert trimmed_indices(np.array([1.0, 4.0, 9.0, 100.0]), 0.75).tolist() == [0, 1, 2]
    value, kept = trimmed_value(scalar_problem([1.0, 2.0, 3.0, 10.0]), IDENTITY_1D, [0.0], 0.75)
    assert value == pytest.approx(14 / 3)
    assert kept.tolist() == [0, 1, 2]


def test_trimmed_matches_sort():
    problem = noisy_problem()
    z = np.array([1.0, 1.0, -1.0])
    squared = (problem.A @ forward(NET, z) - problem.y) ** 2
    value, kept = trimmed_value(problem, NET, z, 0.5)
    assert len(kept) == 20
    assert value == pytest.approx(np.mean(sorted(squared)[:20]), abs=1e-12)


@pytest.mark.parametrize("t", [0.0, 1.5, 0.01])
def test_trim_fraction_errors(t):
    with pytest.raises(TrimFractionError):
        trimmed_value(noisy_problem(), NET, Z_STAR, t)


def test_gradient_zero_residuals():
    problem = noisy_problem(sigma=0.0)
    np.testing.assert_allclose(objective_gradient(problem, NET, Z_STAR, range(10)), 0.0, atol=1e-12)
    np.testing.assert_allclose(objective_gradient(problem, NET, Z_STAR, None, loss=LossKind.absolute), 0.0, atol=1e-12)


def test_gradient_linear_by_hand():
    problem = scalar_problem([1.0], a=[2.0])
    # r = 2 * 3 - 1 = 5, d/dz (2z - 1)^2 = 4 r
    assert objective_gradient(problem, IDENTITY_1D, [3.0], [0]).tolist() == [20.0]
    assert objective_gradient(problem, IDENTITY_1D, [3.0], [0], sign=-1).tolist() == [-20.0]
    assert objective_gradient(problem, IDENTITY_1D, [3.0], [0], loss=LossKind.absolute).tolist() == [2.0]


@pytest.mark.parametrize("loss", [LossKind.squared, LossKind.absolute])
def test_gradient_matches_finite_differences(loss):
    problem = noisy_problem(seed=2)
    rows = [1, 4, 9, 16, 25, 36]
    rng = np.random.default_rng(0)

    def objective(z):
        r = problem.A[rows] @ forward(NET, z) - problem.y[rows]
        return np.mean(r**2) if loss == LossKind.squared else np.mean(np.abs(r))

    checked = 0
    while checked < 10:
        z = rng.standard_normal(3)
        _, cache = forward_with_cache(NET, z)
        near_kink = np.min(np.abs(cache.pre_activations[0])) < 1e-3
        if near_kink or np.min(np.abs(problem.A[rows] @ cache.output - problem.y[rows])) < 1e-3:
            continue
        analytic = objective_gradient(problem, NET, z, rows, loss=loss, cache=cache)
        numeric = np.array([(objective(z + step) - objective(z - step)) / 2e-5 for step in 1e-5 * np.eye(3)])
        assert np.linalg.norm(analytic - numeric) <= 1e-6 * max(np.linalg.norm(analytic), 1e-8)
        checked += 1


def test_gradient_index_errors():
    problem = noisy_problem()
    with pytest.raises(ValueError):
        objective_gradient(problem, NET, Z_STAR, [])
    with pytest.raises(IndexError):
        objective_gradient(problem, NET, Z_STAR, [40])
    with pytest.raises(ValueError):
        objective_gradient(problem, NET, Z_STAR, [0], sign=2)
