"""
Hyperparameter selection on held-out measurements.

Every grid point runs a full recovery on the training measurements; the reconstructions are compared by
their median-of-means loss on the validation measurements, which are never used in optimisation.
"""
import logging
from typing import Any, Dict, Iterable, Optional, Tuple

from momcs.generator import GeneratorNet
from momcs.objectives import PartitionError
from momcs.sensing import SensingProblem

from .config import DEFAULT_LEARNING_RATES, RecoveryConfig
from .run import RecoveryFailedError, RecoveryReport, SelectionError, recover, validation_loss

logger = logging.getLogger(__name__)


def _grid_search(
    problem: SensingProblem,
    net: GeneratorNet,
    config: RecoveryConfig,
    field: str,
    grid: Iterable[Any],
    validation: SensingProblem,
) -> Tuple[Any, Dict[Any, RecoveryReport]]:
    reports: Dict[Any, RecoveryReport] = {}
    for value in grid:
        candidate = config.with_updates(**{field: value})
        try:
            report = recover(problem, net, candidate)
        except RecoveryFailedError as error:
            logger.warning("Skipping %s=%s: %s", field, value, error)
            continue
        report.validation_score = validation_loss(validation, report.reconstruction, config.validation_batches)
        logger.debug("%s=%s scored %g on validation", field, value, report.validation_score)
        reports[value] = report
    if not reports:
        raise SelectionError(f"Every {field} in the grid diverged")
    # dicts keep grid order, so ties go to the earliest grid point
    best = min(reports, key=lambda value: reports[value].validation_score)
    logger.info("Selected %s=%s for %s", field, best, config.algorithm.value)
    return best, reports


def select_batch_count(
    problem: SensingProblem,
    net: GeneratorNet,
    config: RecoveryConfig,
    grid: Iterable[int],
    validation: SensingProblem,
) -> Tuple[int, Dict[int, RecoveryReport]]:
    """
    Run the configured algorithm for every batch count in the grid and pick the one whose reconstruction has
    the lowest median-of-means validation loss.
    Args:
        problem: training measurements
        net: the generator
        config: template configuration; its `batches` is replaced by every grid value
        grid: candidate batch counts, each dividing the number of training measurements
        validation: held-out measurements

    Returns:
        The selected batch count and the report of every grid point that did not fail, keyed by batch count.

    Raises:
        SelectionError: when the grid is empty, or every grid point diverged
        PartitionError: when a grid value does not divide the number of measurements
    """
    grid = list(grid)
    if not grid:
        raise SelectionError("The batch-count grid is empty")
    unfit = [M for M in grid if M < 1 or problem.m % M]
    if unfit:
        raise PartitionError(f"Batch counts {unfit} do not divide m={problem.m}")
    return _grid_search(problem, net, config, "batches", grid, validation)


def select_learning_rate(
    problem: SensingProblem,
    net: GeneratorNet,
    config: RecoveryConfig,
    validation: SensingProblem,
    grid: Optional[Iterable[float]] = None,
) -> Tuple[float, Dict[float, RecoveryReport]]:
    """
    Same as `select_batch_count` for the step size, over `DEFAULT_LEARNING_RATES` unless a grid is given.
    """
    grid = list(DEFAULT_LEARNING_RATES if grid is None else grid)
    if not grid:
        raise SelectionError("The learning-rate grid is empty")
    return _grid_search(problem, net, config, "step_size", grid, validation)
