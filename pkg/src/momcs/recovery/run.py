"""Recovery

Provides the recovery loops: the median-of-means tournament, direct median-of-means minimisation and the
ERM, l1 and trimmed-loss baselines.

Each restart draws its latents from N(0, init_scale^2 I). Every iteration the current objective selects
the samples the gradient is taken on (the median batch for the MOM algorithms, the kept set for the trimmed
loss, every sample otherwise), the minimising player z descends and, for the tournament, the maximising
player z' ascends on the same batch. A restart whose latents leave the divergence limit or whose objective
turns non-finite is abandoned and the next restart runs. The step size follows the configured schedule
over the iterations of a restart. The report carries the restart chosen by `select_best`.
"""
import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Type

import numpy as np

from momcs.core.errors import MomcsError
from momcs.core.seeds import spawn_generators
from momcs.generator import ForwardCache, GeneratorNet, as_latent, forward, forward_with_cache
from momcs.middleware.base import RecoveryMiddleware
from momcs.objectives import (
    BatchPartition,
    LossKind,
    batch_losses,
    make_partition,
    objective_gradient,
    residuals,
    select_median,
    trimmed_indices,
)
from momcs.sensing import SensingProblem

from .config import Algorithm, RecoveryConfig, RestartSelection
from .optimizers import Optimizer, build_optimizer, scheduled_step_size

logger = logging.getLogger(__name__)


class RecoveryFailedError(MomcsError):
    """Raised when every restart of a recovery run diverged."""

    pass


class SelectionError(MomcsError, ValueError):
    """Raised when there is nothing to select from."""

    pass


@dataclass
class Evaluation:
    """
    The objective at the current iterate and the samples its gradient is taken on.

    Attributes:
        objective: objective value
        rows: selected sample indices, None for every sample
        loss: per-sample loss of the gradient
        cache: forward cache at z
        cache_prime: forward cache at z' (tournament only)
    """

    objective: float
    rows: Optional[np.ndarray]
    loss: LossKind
    cache: ForwardCache
    cache_prime: Optional[ForwardCache] = None


@dataclass
class RestartResult:
    """
    Outcome of a single restart.

    Attributes:
        training_score: overrides the final objective as the score of `select_best` without validation data;
            set for the tournament under challenger restart selection
    """

    restart_index: int
    z_hat: np.ndarray
    reconstruction: np.ndarray
    final_objective: float
    diverged: bool
    iterations: int
    objective_trace: np.ndarray
    recon_error_trace: np.ndarray
    elapsed_trace: np.ndarray
    z_prime: Optional[np.ndarray] = None
    partition: Optional[BatchPartition] = None
    training_score: Optional[float] = None


@dataclass(frozen=True)
class RestartSummary:
    restart_index: int
    final_objective: float
    diverged: bool
    iterations: int
    score: Optional[float]


@dataclass
class RecoveryReport:
    """
    Result of a recovery run.

    Attributes:
        algorithm: label of the configuration
        z_hat: recovered latent
        z_prime: final maximising player (tournament only)
        reconstruction: G(z_hat)
        objective_trace: objective after every iteration of the chosen restart
        recon_error_trace: ||G(z) - G(z*)||^2 / n after every iteration
        elapsed_trace: seconds since the start of the chosen restart after every iteration
        final_objective: the objective at the final iterate; the last entry of `objective_trace`
        recon_error_per_pixel: ||G(z_hat) - G(z*)||^2 / n
        wall_time: seconds spent on the whole run
        restart_index_chosen: index of the chosen restart
        iterations: iterations run by the chosen restart
        seed: master seed of the run
        partition: batches of the chosen restart (MOM algorithms)
        restarts: summary of every restart
        validation_score: median-of-means loss on validation data when it was scored
    """

    algorithm: str
    z_hat: np.ndarray
    reconstruction: np.ndarray
    objective_trace: np.ndarray
    recon_error_trace: np.ndarray
    elapsed_trace: np.ndarray
    final_objective: float
    recon_error_per_pixel: float
    wall_time: float
    restart_index_chosen: int
    iterations: int
    seed: int
    z_prime: Optional[np.ndarray] = None
    partition: Optional[BatchPartition] = None
    restarts: List[RestartSummary] = field(default_factory=list)
    validation_score: Optional[float] = None

    @property
    def optimization_gap(self) -> float:
        """The achieved accuracy tau: the final objective minus its lower bound 0."""
        return self.final_objective


def evaluate_objective(
    problem: SensingProblem,
    net: GeneratorNet,
    config: RecoveryConfig,
    partition: Optional[BatchPartition],
    z: np.ndarray,
    z_prime: Optional[np.ndarray] = None,
) -> Evaluation:
    """
    Evaluate the configured objective at z (and z') and select the samples of the next gradient step.
    """
    x, cache = forward_with_cache(net, z)
    r = residuals(problem, x)
    algorithm = config.algorithm
    if algorithm == Algorithm.erm:
        return Evaluation(float(np.mean(r**2)), None, LossKind.squared, cache)
    if algorithm == Algorithm.l1:
        return Evaluation(float(np.mean(np.abs(r))), None, LossKind.absolute, cache)
    if algorithm == Algorithm.trimmed:
        squared = r**2
        kept = trimmed_indices(squared, config.trim_fraction)
        return Evaluation(float(np.mean(squared[kept])), kept, LossKind.squared, cache)
    losses = np.mean(r[partition.indices] ** 2, axis=1)
    if algorithm == Algorithm.mom_direct:
        selection = select_median(losses)
        return Evaluation(selection.value, partition.indices[selection.batch_index], LossKind.squared, cache)
    x_prime, cache_prime = forward_with_cache(net, z_prime)
    selection = select_median(losses - batch_losses(problem, x_prime, partition))
    return Evaluation(selection.value, partition.indices[selection.batch_index], LossKind.squared, cache, cache_prime)


def validation_loss(validation: SensingProblem, reconstruction: np.ndarray, batches: int) -> float:
    """
    Median-of-means loss of a reconstruction on held-out measurements, over contiguous batches.
    """
    partition = make_partition(validation.m, batches)
    return select_median(batch_losses(validation, reconstruction, partition)).value


def restart_scores(
    results: Sequence[RestartResult], validation: Optional[SensingProblem] = None, validation_batches: int = 1
) -> List[Optional[float]]:
    """
    The selection score of every restart, None for diverged ones.
    """
    scores = []
    for result in results:
        if result.diverged:
            scores.append(None)
        elif validation is not None:
            scores.append(validation_loss(validation, result.reconstruction, validation_batches))
        else:
            scores.append(result.final_objective if result.training_score is None else result.training_score)
    return scores


def select_best(
    results: Sequence[RestartResult], validation: Optional[SensingProblem] = None, validation_batches: int = 1
) -> RestartResult:
    """
    Choose a restart: the lowest median-of-means validation loss when validation data is given, the lowest
    final training objective otherwise (its `training_score` when one was set). Ties go to the lowest restart
    index; diverged restarts are never chosen.
    Args:
        results: one result per restart, in restart order
        validation: held-out measurements
        validation_batches: number of batches of the validation loss

    Returns:
        The chosen restart.

    Raises:
        SelectionError: when no restart is available
    """
    if not results:
        raise SelectionError("Cannot select from an empty list of restarts")
    scores = restart_scores(results, validation, validation_batches)
    candidates = [(score, position) for position, score in enumerate(scores) if score is not None]
    if not candidates:
        raise SelectionError("Every restart diverged")
    _, position = min(candidates)
    return results[position]


class RecoveryRun:
    """
    A configured recovery procedure, called on a problem and a generator.
    Args:
        config: the run configuration
        middlewares: middleware classes wrapping every call

    Attributes:
        config: the run configuration
        report (RecoveryReport): the report of the last call
        _kwargs: the keyword arguments of the last call, shared with the middlewares
    """

    report: RecoveryReport
    _kwargs: Dict[str, Any]

    def __init__(self, config: RecoveryConfig, middlewares: List[Type[RecoveryMiddleware]] = None):
        self.config = config
        self.middlewares = middlewares

    def __call__(
        self,
        problem: SensingProblem,
        net: GeneratorNet,
        validation: Optional[SensingProblem] = None,
        initial_latent: Optional[Sequence[float]] = None,
    ) -> RecoveryReport:
        """
        Run the recovery.
        Args:
            problem: measurements used for optimisation
            net: the generator
            validation: held-out measurements used to choose the restart
            initial_latent: start every restart (both players) from this latent instead of a random draw

        Returns:
            The report of the chosen restart.
        """
        self._kwargs = {"problem": problem, "net": net, "validation": validation, "initial_latent": initial_latent}
        return self._exec_middlewares(self._kwargs)

    def _exec_middlewares(self, kwargs: Dict[str, Any]) -> RecoveryReport:
        call = lambda: self._exec(kwargs)  # noqa: E731
        for middleware in reversed(self.middlewares or []):
            call = middleware(self, kwargs, call)
        return call()

    def _exec(self, kwargs: Dict[str, Any]) -> RecoveryReport:
        self.report = self._recover(**kwargs)
        return self.report

    def _recover(
        self,
        problem: SensingProblem,
        net: GeneratorNet,
        validation: Optional[SensingProblem],
        initial_latent: Optional[Sequence[float]],
    ) -> RecoveryReport:
        config = self.config
        start = time.perf_counter()
        if initial_latent is not None:
            initial_latent = as_latent(net, initial_latent)
        streams = spawn_generators(config.seed, config.restarts + 1)
        partition = None
        if config.algorithm.uses_batches:
            partition = make_partition(problem.m, config.batches, streams[0], shuffle=config.shuffle_partition)
        if validation is not None:
            # fail before any restart when the validation set does not split into batches
            make_partition(validation.m, config.validation_batches)
        target = forward(net, problem.z_star)

        results = [
            self._run_restart(index, problem, net, partition, rng, initial_latent, target)
            for index, rng in enumerate(streams[1:])
        ]
        if all(result.diverged for result in results):
            raise RecoveryFailedError(f"All {config.restarts} restarts of {config.label} diverged")
        if config.algorithm == Algorithm.mom_tournament and config.restart_selection == RestartSelection.challenger:
            _score_against_challengers(problem, net, results)

        chosen = select_best(results, validation, config.validation_batches)
        scores = restart_scores(results, validation, config.validation_batches)
        summaries = [
            RestartSummary(result.restart_index, result.final_objective, result.diverged, result.iterations, score)
            for result, score in zip(results, scores)
        ]
        return RecoveryReport(
            algorithm=config.label,
            z_hat=chosen.z_hat,
            z_prime=chosen.z_prime,
            reconstruction=chosen.reconstruction,
            objective_trace=chosen.objective_trace,
            recon_error_trace=chosen.recon_error_trace,
            elapsed_trace=chosen.elapsed_trace,
            final_objective=chosen.final_objective,
            recon_error_per_pixel=float(np.sum((chosen.reconstruction - target) ** 2) / net.output_dim),
            wall_time=time.perf_counter() - start,
            restart_index_chosen=chosen.restart_index,
            iterations=chosen.iterations,
            seed=config.seed,
            partition=chosen.partition,
            restarts=summaries,
            validation_score=scores[chosen.restart_index] if validation is not None else None,
        )

    def _run_restart(
        self,
        index: int,
        problem: SensingProblem,
        net: GeneratorNet,
        partition: Optional[BatchPartition],
        rng: np.random.Generator,
        initial_latent: Optional[np.ndarray],
        target: np.ndarray,
    ) -> RestartResult:
        config = self.config
        start = time.perf_counter()
        tournament = config.algorithm == Algorithm.mom_tournament
        if initial_latent is not None:
            z = initial_latent.copy()
            z_prime = initial_latent.copy() if tournament else None
        else:
            z = rng.normal(0.0, config.init_scale, net.input_dim)
            z_prime = rng.normal(0.0, config.init_scale, net.input_dim) if tournament else None
        optimizer = build_optimizer(config.optimizer, config.step_size)
        optimizer_prime = build_optimizer(config.optimizer, config.step_size)

        state = evaluate_objective(problem, net, config, partition, z, z_prime)
        objectives: List[float] = []
        errors: List[float] = []
        elapsed: List[float] = []
        diverged = not np.isfinite(state.objective)
        for iteration in range(config.iterations):
            if diverged:
                break
            step_size = scheduled_step_size(
                config.step_size, config.schedule, config.final_step_ratio, iteration, config.iterations
            )
            optimizer.step_size = optimizer_prime.step_size = step_size
            if config.reshuffle_each_iter and partition is not None:
                partition = make_partition(problem.m, config.batches, rng, shuffle=True)
                state = evaluate_objective(problem, net, config, partition, z, z_prime)
            z, z_prime = self._step(problem, net, partition, state, z, z_prime, optimizer, optimizer_prime)
            if self._out_of_bounds(z) or (z_prime is not None and self._out_of_bounds(z_prime)):
                diverged = True
                break
            state = evaluate_objective(problem, net, config, partition, z, z_prime)
            if not np.isfinite(state.objective):
                diverged = True
                break
            objectives.append(state.objective)
            errors.append(float(np.sum((state.cache.output - target) ** 2) / net.output_dim))
            elapsed.append(time.perf_counter() - start)
            if config.stop_tol > 0 and abs(state.objective) <= config.stop_tol:
                break
        if diverged:
            logger.warning("Restart %d of %s diverged after %d iterations", index, config.label, len(objectives))
        return RestartResult(
            restart_index=index,
            z_hat=z,
            z_prime=z_prime,
            reconstruction=state.cache.output,
            final_objective=float("nan") if diverged else state.objective,
            diverged=diverged,
            iterations=len(objectives),
            objective_trace=np.asarray(objectives),
            recon_error_trace=np.asarray(errors),
            elapsed_trace=np.asarray(elapsed),
            partition=partition,
        )

    def _step(
        self,
        problem: SensingProblem,
        net: GeneratorNet,
        partition: Optional[BatchPartition],
        state: Evaluation,
        z: np.ndarray,
        z_prime: Optional[np.ndarray],
        optimizer: Optimizer,
        optimizer_prime: Optimizer,
    ) -> Tuple[np.ndarray, Optional[np.ndarray]]:
        config = self.config
        grad = objective_gradient(problem, net, z, state.rows, 1, state.loss, state.cache)
        if z_prime is None:
            return optimizer.update(z, grad), None
        if config.inner_steps == 1:
            grad_prime = objective_gradient(problem, net, z_prime, state.rows, -1, state.loss, state.cache_prime)
            return optimizer.update(z, grad), optimizer_prime.update(z_prime, grad_prime, maximize=True)
        z = optimizer.update(z, grad)
        for _ in range(config.inner_steps):
            inner = evaluate_objective(problem, net, config, partition, z, z_prime)
            grad_prime = objective_gradient(problem, net, z_prime, inner.rows, -1, inner.loss, inner.cache_prime)
            z_prime = optimizer_prime.update(z_prime, grad_prime, maximize=True)
        return z, z_prime

    def _out_of_bounds(self, z: np.ndarray) -> bool:
        return not np.all(np.isfinite(z)) or float(np.max(np.abs(z))) > self.config.divergence_limit


def _score_against_challengers(problem: SensingProblem, net: GeneratorNet, results: List[RestartResult]) -> None:
    """
    Score every finished tournament restart by its objective against the strongest challenger among all
    latents found by any restart (both players).
    """
    finished = [result for result in results if not result.diverged]
    challengers = [forward(net, latent) for result in finished for latent in (result.z_hat, result.z_prime)]
    for result in finished:
        own = batch_losses(problem, result.reconstruction, result.partition)
        result.training_score = max(
            select_median(own - batch_losses(problem, challenger, result.partition)).value for challenger in challengers
        )


def recover(
    problem: SensingProblem,
    net: GeneratorNet,
    config: RecoveryConfig,
    validation: Optional[SensingProblem] = None,
    initial_latent: Optional[Sequence[float]] = None,
    middlewares: List[Type[RecoveryMiddleware]] = None,
) -> RecoveryReport:
    """
    Recover G(z*) from a sensing problem.
    Args:
        problem: measurements used for optimisation
        net: the generator
        config: the run configuration
        validation: held-out measurements used to choose the restart
        initial_latent: start every restart from this latent
        middlewares: middleware classes wrapping the run

    Returns:
        The recovery report.

    Raises:
        RecoveryFailedError: when every restart diverged
    """
    return RecoveryRun(config, middlewares)(problem, net, validation=validation, initial_latent=initial_latent)
