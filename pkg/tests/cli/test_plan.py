import dataclasses
import math

import pytest
from pydantic import ValidationError

from momcs.cli import ExperimentPlan, PlanError, Scenario, run_plan, summarize
from momcs.sensing import EnsembleKind

ALGORITHMS = [
    {"algorithm": "erm", "iterations": 20, "restarts": 1},
    {"algorithm": "mom_tournament", "batches": 4, "iterations": 20, "restarts": 1},
]


def small_plan(**updates):
    settings = dict(
        scenario="corrupted",
        generator={"dims": [2, 8, 16], "seed": 1},
        m_grid=[20],
        algorithms=ALGORITHMS,
        trials=1,
        sigma=0.1,
        epsilon=0.1,
        master_seed=7,
    )
    settings.update(updates)
    return ExperimentPlan(**settings)


def without_timing(rows):
    return [dataclasses.replace(row, wall_ms=0.0) for row in rows]


def test_one_cell_one_trial():
    rows = run_plan(small_plan(algorithms=ALGORITHMS[:1]))
    assert len(rows) == 1
    row = rows[0]
    assert (row.scenario, row.m, row.algorithm, row.M, row.trial) == ("corrupted", 20, "erm", 1, 0)
    assert row.iterations == 20
    assert not row.diverged


def test_rows_are_sorted_and_complete():
    rows = run_plan(small_plan(m_grid=[40, 20], trials=2))
    assert [(row.m, row.algorithm_index, row.trial) for row in rows] == sorted(
        (m, a, t) for m in (20, 40) for a in (0, 1) for t in (0, 1)
    )
    assert {row.algorithm for row in rows} == {"erm", "mom_tournament(M=4)"}


def test_runs_are_reproducible_across_thread_counts():
    plan = small_plan(m_grid=[20, 40], trials=2)
    first = without_timing(run_plan(plan, threads=1))
    assert first == without_timing(run_plan(plan, threads=3))


def test_algorithms_of_a_cell_share_the_problem():
    plan = small_plan()
    net = plan.generator.build()
    first, second = plan.draw_problem(net, 20, 0), plan.draw_problem(net, 20, 0)
    assert (first.A == second.A).all() and (first.y == second.y).all()
    assert len(first.corrupted_rows) == 2
    assert not (plan.draw_problem(net, 20, 1).A == first.A).all()


def test_scenarios():
    assert Scenario.clean_gaussian.ensemble().kind == EnsembleKind.gaussian
    assert Scenario.heavy_tailed.ensemble().dof == 4
    assert Scenario.heavy_tailed.noise(0.5).distribution.dof == 3
    assert small_plan(scenario="heavy_tailed").cell_epsilon == 0.0
    assert small_plan().cell_epsilon == 0.1


@pytest.mark.parametrize(
    "updates",
    [
        {"m_grid": []},
        {"algorithms": []},
        {"m_grid": [30]},
        {"bogus": 1},
    ],
)
def test_invalid_plans(updates):
    with pytest.raises(ValidationError):
        small_plan(**updates)


def test_threads_must_be_positive():
    with pytest.raises(PlanError):
        run_plan(small_plan(), threads=0)


def test_summary():
    rows = run_plan(small_plan(trials=3))
    summary = summarize(rows)
    assert [(row.m, row.algorithm, row.trials, row.diverged) for row in summary] == [
        (20, "erm", 3, 0),
        (20, "mom_tournament(M=4)", 3, 0),
    ]
    erm_errors = [row.recon_error_per_pixel for row in rows if row.algorithm == "erm"]
    assert summary[0].mean_recon_error == pytest.approx(sum(erm_errors) / 3)
    assert summary[0].ci95 > 0


def test_summary_of_a_single_trial_has_no_interval():
    assert math.isnan(summarize(run_plan(small_plan(algorithms=ALGORITHMS[:1])))[0].ci95)


def test_diverged_cells_are_reported():
    algorithms = [{"algorithm": "erm", "iterations": 5, "restarts": 1, "divergence_limit": 1e-6}]
    rows = run_plan(small_plan(algorithms=algorithms))
    assert rows[0].diverged
    assert math.isnan(rows[0].recon_error_per_pixel)
    summary = summarize(rows)[0]
    assert summary.diverged == 1
    assert math.isnan(summary.mean_recon_error)
