import numpy as np
import pytest

from momcs.recovery import (
    Adam,
    GradientDescent,
    Momentum,
    OptimizerKind,
    OptimizerSettings,
    StepSchedule,
    build_optimizer,
    scheduled_step_size,
)


def test_gradient_descent_step():
    optimizer = GradientDescent(0.1)
    np.testing.assert_allclose(optimizer.update(np.array([1.0, 2.0]), np.array([10.0, -10.0])), [0.0, 3.0])


def test_ascent_flips_direction():
    optimizer = GradientDescent(0.5)
    np.testing.assert_allclose(optimizer.update(np.zeros(2), np.array([1.0, -2.0]), maximize=True), [0.5, -1.0])


def test_momentum_accumulates():
    optimizer = Momentum(1.0, beta=0.5)
    params = optimizer.update(np.zeros(1), np.ones(1))
    params = optimizer.update(params, np.ones(1))
    # steps of 1 and 1.5
    np.testing.assert_allclose(params, [-2.5])


def test_adam_first_step_is_the_learning_rate():
    optimizer = Adam(0.01)
    params = optimizer.update(np.zeros(3), np.array([1e-3, -5.0, 200.0]))
    np.testing.assert_allclose(params, [-0.01, 0.01, -0.01], rtol=1e-4)
    assert optimizer.t == 1


def test_adam_bias_correction():
    optimizer = Adam(1.0, beta1=0.9, beta2=0.999, eps=0.0)
    params = np.zeros(1)
    for _ in range(5):
        params = optimizer.update(params, np.array([2.0]))
    # a constant gradient gives m_hat = g and v_hat = g^2 at every step
    np.testing.assert_allclose(params, [-5.0])


def test_zero_gradient_keeps_parameters():
    optimizer = Adam(0.1)
    np.testing.assert_array_equal(optimizer.update(np.array([1.0, -1.0]), np.zeros(2)), [1.0, -1.0])


@pytest.mark.parametrize(
    "kind, cls",
    [(OptimizerKind.plain_gd, GradientDescent), (OptimizerKind.momentum, Momentum), (OptimizerKind.adam, Adam)],
)
def test_build_optimizer(kind, cls):
    optimizer = build_optimizer(OptimizerSettings(kind=kind), 0.3)
    assert isinstance(optimizer, cls)
    assert optimizer.step_size == 0.3


def test_players_do_not_share_state():
    settings = OptimizerSettings(kind="adam")
    first, second = build_optimizer(settings, 0.1), build_optimizer(settings, 0.1)
    first.update(np.zeros(1), np.ones(1))
    assert second.t == 0


@pytest.mark.parametrize("schedule", list(StepSchedule))
def test_schedules_start_at_the_step_size(schedule):
    assert scheduled_step_size(0.2, schedule, 0.01, 0, 100) == pytest.approx(0.2)
    assert scheduled_step_size(0.2, schedule, 0.01, 0, 1) == 0.2


def test_constant_schedule():
    assert [scheduled_step_size(0.2, StepSchedule.constant, 0.01, t, 3) for t in range(3)] == [0.2, 0.2, 0.2]


def test_geometric_schedule():
    steps = [scheduled_step_size(0.2, StepSchedule.geometric, 0.01, t, 3) for t in range(3)]
    assert steps == pytest.approx([0.2, 0.02, 0.002])


def test_cosine_schedule():
    steps = [scheduled_step_size(0.2, StepSchedule.cosine, 0.01, t, 3) for t in range(3)]
    assert steps == pytest.approx([0.2, 0.101, 0.002])


@pytest.mark.parametrize("schedule", [StepSchedule.geometric, StepSchedule.cosine])
def test_decaying_schedules_never_increase(schedule):
    steps = [scheduled_step_size(0.05, schedule, 0.001, t, 500) for t in range(600)]
    assert all(later <= earlier for earlier, later in zip(steps, steps[1:]))
    assert steps[-1] == pytest.approx(0.05 * 0.001)
