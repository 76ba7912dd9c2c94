"""
The benchmark harness: every (m, trial) cell draws one problem and runs every algorithm of the plan on it.

Seeds are counter based. The problem of a cell uses derive_seed(master_seed, scenario, m, trial), so every
algorithm of a cell sees the same measurements; the recovery of algorithm a uses
derive_seed(master_seed, scenario, m, a, trial). Any cell can be re-run on its own.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from time import perf_counter
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Extra, Field, root_validator, validator
from rich.progress import Progress
from scipy import stats

from momcs.core.errors import MomcsError
from momcs.core.seeds import derive_seed
from momcs.generator import GeneratorNet
from momcs.recovery import Algorithm, RecoveryConfig, RecoveryFailedError, recover
from momcs.sensing import CorruptionSpec, Ensemble, NoiseSpec, SensingProblem

from .settings import GeneratorSource, draw_problem

logger = logging.getLogger(__name__)


class PlanError(MomcsError):
    """Raised when a plan cannot be run."""

    pass


class Scenario(str, Enum):
    """
    Attributes:
        clean_gaussian: Gaussian A and Gaussian noise
        heavy_tailed: Student-t(4) A and Student-t(3) noise
        corrupted: heavy_tailed, then a fraction epsilon of rows replaced by outliers
    """

    clean_gaussian: str = "clean_gaussian"
    heavy_tailed: str = "heavy_tailed"
    corrupted: str = "corrupted"

    @property
    def id(self) -> int:
        return list(Scenario).index(self)

    def ensemble(self) -> Ensemble:
        if self == Scenario.clean_gaussian:
            return Ensemble.gaussian()
        return Ensemble.student_t(4)

    def noise(self, sigma: float) -> NoiseSpec:
        if self == Scenario.clean_gaussian:
            return NoiseSpec(distribution=Ensemble.gaussian(), sigma=sigma)
        return NoiseSpec(distribution=Ensemble.student_t(3), sigma=sigma)


def _default_algorithms() -> List[RecoveryConfig]:
    return [RecoveryConfig(algorithm=Algorithm.erm), RecoveryConfig(algorithm=Algorithm.mom_tournament, batches=20)]


class ExperimentPlan(BaseModel):
    """
    A grid of measurement counts and algorithms, repeated over trials.

    Attributes:
        scenario: measurement and corruption model
        generator: the generator shared by every cell
        m_grid: measurement counts
        algorithms: recovery configurations; their seeds are replaced per cell
        trials: trials per cell
        sigma: noise level
        epsilon: corruption fraction of the `corrupted` scenario
        master_seed: seed every cell seed is derived from
        output: output directory
    """

    scenario: Scenario = Scenario.heavy_tailed
    generator: GeneratorSource = Field(default_factory=GeneratorSource)
    m_grid: List[int] = Field(default_factory=lambda: [100, 200, 300, 400])
    algorithms: List[RecoveryConfig] = Field(default_factory=_default_algorithms)
    trials: int = Field(5, ge=1)
    sigma: float = Field(1.0, ge=0)
    epsilon: float = Field(0.02, ge=0, lt=1)
    master_seed: int = Field(0, ge=0)
    output: Path = Path("results")

    class Config:
        extra = Extra.forbid

    @validator("m_grid")
    def _nonempty_grid(cls, value):
        if not value or any(m < 1 for m in value):
            raise ValueError(f"m_grid must be a non-empty list of positive counts, got {value}")
        return value

    @validator("algorithms")
    def _some_algorithms(cls, value):
        if not value:
            raise ValueError("at least one algorithm is required")
        return value

    @root_validator(skip_on_failure=True)
    def _batches_divide_grid(cls, values):
        offending = [
            f"{config.label} with m={m}"
            for config in values["algorithms"]
            if config.algorithm.uses_batches
            for m in values["m_grid"]
            if m % config.batches
        ]
        if offending:
            raise ValueError(f"batch counts must divide every m: {', '.join(offending)}")
        return values

    @property
    def cell_epsilon(self) -> float:
        return self.epsilon if self.scenario == Scenario.corrupted else 0.0

    def draw_problem(self, net: GeneratorNet, m: int, trial: int) -> SensingProblem:
        seed = derive_seed(self.master_seed, self.scenario.id, m, trial)
        return draw_problem(
            net, m, self.scenario.ensemble(), self.scenario.noise(self.sigma), self.cell_epsilon, CorruptionSpec(), seed
        )


@dataclass(frozen=True)
class BenchRow:
    scenario: str
    m: int
    algorithm: str
    M: int
    trial: int
    recon_error_per_pixel: float
    final_objective: float
    iterations: int
    wall_ms: float
    diverged: bool
    algorithm_index: int = 0

    @property
    def sort_key(self) -> Tuple[int, int, int]:
        return self.m, self.algorithm_index, self.trial


@dataclass(frozen=True)
class SummaryRow:
    """
    Aggregate of one (m, algorithm) cell over its non-diverged trials.

    Attributes:
        ci95: half width of the 95% Student-t confidence interval of the mean error
    """

    scenario: str
    m: int
    algorithm: str
    M: int
    trials: int
    diverged: int
    mean_recon_error: float
    ci95: float
    mean_final_objective: float


def _run_cell(plan: ExperimentPlan, net: GeneratorNet, m: int, trial: int) -> List[BenchRow]:
    problem = plan.draw_problem(net, m, trial)
    rows = []
    for index, template in enumerate(plan.algorithms):
        config = template.with_updates(seed=derive_seed(plan.master_seed, plan.scenario.id, m, index, trial))
        batches = config.batches if config.algorithm.uses_batches else 1
        start = perf_counter()
        try:
            report = recover(problem, net, config)
        except RecoveryFailedError as error:
            logger.warning("m=%d trial=%d %s: %s", m, trial, config.label, error)
            wall_ms = (perf_counter() - start) * 1000
            rows.append(BenchRow(plan.scenario.value, m, config.label, batches, trial, math.nan, math.nan, 0, wall_ms, True, index))
            continue
        rows.append(
            BenchRow(
                scenario=plan.scenario.value,
                m=m,
                algorithm=config.label,
                M=batches,
                trial=trial,
                recon_error_per_pixel=report.recon_error_per_pixel,
                final_objective=report.final_objective,
                iterations=report.iterations,
                wall_ms=report.wall_time * 1000,
                diverged=False,
                algorithm_index=index,
            )
        )
    return rows


def run_plan(plan: ExperimentPlan, threads: int = 1, show_progress: bool = False) -> List[BenchRow]:
    """
    Run every cell of the plan.
    Args:
        plan: the experiment plan
        threads: worker count
        show_progress: render a progress bar

    Returns:
        One row per (m, algorithm, trial), sorted by m, algorithm position and trial.
    """
    if threads < 1:
        raise PlanError(f"threads must be >= 1, got {threads}")
    net = plan.generator.build()
    cells = [(m, trial) for m in plan.m_grid for trial in range(plan.trials)]
    rows: List[BenchRow] = []
    with Progress(disable=not show_progress) as progress:
        bar = progress.add_task(f"[red]{plan.scenario.value}...", total=len(cells))
        with ThreadPoolExecutor(max_workers=threads) as executor:
            futures = [executor.submit(_run_cell, plan, net, m, trial) for m, trial in cells]
            for future in as_completed(futures):
                rows.extend(future.result())
                progress.update(bar, advance=1)
    return sorted(rows, key=lambda row: row.sort_key)


def _confidence_half_width(values: np.ndarray) -> float:
    if values.size < 2:
        return math.nan
    return float(stats.t.ppf(0.975, values.size - 1) * np.std(values, ddof=1) / math.sqrt(values.size))


def summarize(rows: Sequence[BenchRow]) -> List[SummaryRow]:
    """Mean error with a 95% confidence interval per (m, algorithm) cell."""
    cells: Dict[Tuple[int, int], List[BenchRow]] = {}
    for row in rows:
        cells.setdefault((row.m, row.algorithm_index), []).append(row)
    summary = []
    for key in sorted(cells):
        cell = cells[key]
        finished = [row for row in cell if not row.diverged]
        errors = np.array([row.recon_error_per_pixel for row in finished])
        objectives = np.array([row.final_objective for row in finished])
        first = cell[0]
        summary.append(
            SummaryRow(
                scenario=first.scenario,
                m=first.m,
                algorithm=first.algorithm,
                M=first.M,
                trials=len(cell),
                diverged=len(cell) - len(finished),
                mean_recon_error=float(np.mean(errors)) if finished else math.nan,
                ci95=_confidence_half_width(errors),
                mean_final_objective=float(np.mean(objectives)) if finished else math.nan,
            )
        )
    return summary
