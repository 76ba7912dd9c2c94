"""
Monte-Carlo checks of the batchwise properties behind median-of-means recovery.

Each check draws `trials` independent problems from per-trial generator streams spawned from the config
seed, so a report is reproducible bit for bit. Batches are contiguous blocks of rows; the rows are i.i.d.,
so this is as good as a random partition.
"""
import logging
import math
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from momcs.core.errors import MomcsError
from momcs.core.seeds import spawn_generators
from momcs.generator import GeneratorNet, forward, random_generator
from momcs.objectives import batch_losses, make_partition, select_median
from momcs.sensing import sample_measurement_matrix, synthesize

from .config import CheckName, DirectionSource, LemmaCheckConfig, LemmaCheckReport, TrialOutcome
from .estimators import estimate_moment_ratio

logger = logging.getLogger(__name__)

DirectionArg = Union[GeneratorNet, DirectionSource, str, None]


class CalibrationError(MomcsError):
    """Raised when no value of a sweep meets the pass target."""

    pass


def batch_srec_fractions(A: np.ndarray, batches: int, directions: np.ndarray, gamma: float) -> np.ndarray:
    """
    For every direction v (a column of `directions`), the fraction of batches B with
    (1/b) ||A_B v||^2 >= gamma^2 ||v||^2.
    Args:
        A: m x n measurement matrix, split into `batches` contiguous blocks of rows
        batches: number of batches
        directions: n x D matrix of non-zero directions
        gamma: restricted eigenvalue constant

    Returns:
        D fractions.
    """
    projections = (A @ directions).reshape(batches, -1, directions.shape[1])
    energy = np.mean(projections**2, axis=1)
    return np.mean(energy >= gamma**2 * np.sum(directions**2, axis=0), axis=0)


def multiplier_fractions(
    A: np.ndarray, noise: np.ndarray, batches: int, directions: np.ndarray, sigma: float
) -> np.ndarray:
    """
    For every direction v, the fraction of batches B with (1/b) |eta_B^T A_B v| <= sigma ||v||.
    """
    products = (noise[:, None] * (A @ directions)).reshape(batches, -1, directions.shape[1])
    cross = np.abs(np.mean(products, axis=1))
    return np.mean(cross <= sigma * np.linalg.norm(directions, axis=0), axis=0)


def _trial_net(config: LemmaCheckConfig, source: DirectionArg, rng: np.random.Generator) -> GeneratorNet:
    if isinstance(source, GeneratorNet):
        return source
    return random_generator(config.layer_dims, seed=rng)


def _sample_directions(config: LemmaCheckConfig, source: DirectionArg, rng: np.random.Generator) -> np.ndarray:
    if not isinstance(source, GeneratorNet) and DirectionSource(source or config.direction_source) == DirectionSource.subspace:
        rank = min(2 * config.k, config.n)
        basis, _ = np.linalg.qr(rng.standard_normal((config.n, rank)))
        return basis @ rng.standard_normal((rank, config.direction_samples))
    net = _trial_net(config, source, rng)
    return np.column_stack(
        [
            forward(net, rng.standard_normal(net.input_dim)) - forward(net, rng.standard_normal(net.input_dim))
            for _ in range(config.direction_samples)
        ]
    )


def _nonzero(directions: np.ndarray) -> np.ndarray:
    keep = np.linalg.norm(directions, axis=0) > 0
    if not np.all(keep):
        logger.debug("Skipping %d zero-norm directions", int(np.sum(~keep)))
    return directions[:, keep]


def _fraction_outcome(index: int, fractions: np.ndarray, directions: np.ndarray, fraction: float) -> TrialOutcome:
    if fractions.size == 0:
        return TrialOutcome(trial=index, passed=True, statistic=1.0)
    worst = int(np.argmin(fractions))
    return TrialOutcome(
        trial=index,
        passed=bool(fractions[worst] >= fraction),
        statistic=float(fractions[worst]),
        worst_direction=directions[:, worst].tolist(),
    )


def _report(check: CheckName, config: LemmaCheckConfig, outcomes: List[TrialOutcome], **constants) -> LemmaCheckReport:
    report = LemmaCheckReport(
        check=check,
        pass_rate=sum(outcome.passed for outcome in outcomes) / len(outcomes),
        target=config.pass_target,
        seed=config.seed,
        dims={"m": config.m, "n": config.n, "k": config.k, "M": config.batches, "b": config.batch_size},
        constants={"fraction": config.fraction, **constants},
        trials=outcomes,
    )
    logger.info("%s: pass rate %.3f (target %.3f)", check.value, report.pass_rate, report.target)
    return report


def check_objective_bound(config: LemmaCheckConfig, net: Optional[GeneratorNet] = None) -> LemmaCheckReport:
    """
    Per trial, synthesize an uncorrupted problem and check that the median over batches of the batch loss at
    the true latent is at most 4 sigma^2. This median bounds the min-max tournament objective from above.
    Args:
        config: check configuration
        net: a fixed generator; a random one from `config.layer_dims` is drawn per trial otherwise

    Returns:
        The check report. A trial's statistic is its median batch loss.
    """
    bound = 4 * config.noise.sigma**2
    partition = make_partition(config.m, config.batches)
    outcomes = []
    for index, rng in enumerate(spawn_generators(config.seed, config.trials)):
        trial_net = _trial_net(config, net, rng)
        z_star = rng.standard_normal(trial_net.input_dim)
        problem = synthesize(trial_net, z_star, config.m, config.ensemble, config.noise, seed=rng)
        median = select_median(batch_losses(problem, forward(trial_net, z_star), partition)).value
        outcomes.append(TrialOutcome(trial=index, passed=median <= bound, statistic=median))
    return _report(CheckName.objective_bound, config, outcomes, sigma=config.noise.sigma, bound=bound)


def check_batch_srec(config: LemmaCheckConfig, source: DirectionArg = None) -> LemmaCheckReport:
    """
    Per trial, draw a measurement matrix and `direction_samples` directions, and check that for every direction
    the restricted eigenvalue bound (1/b) ||A_B v||^2 >= gamma^2 ||v||^2 holds on at least `fraction` of the
    batches. With one batch this is the whole-sample restricted eigenvalue condition.
    Args:
        config: check configuration
        source: a generator whose range differences are the directions, or a `DirectionSource`; defaults to
            `config.direction_source` with a random generator per trial

    Returns:
        The check report. A trial's statistic is its smallest passing-batch fraction.
    """
    outcomes = []
    for index, rng in enumerate(spawn_generators(config.seed, config.trials)):
        A = sample_measurement_matrix(config.m, config.n, config.ensemble, rng)
        directions = _nonzero(_sample_directions(config, source, rng))
        fractions = batch_srec_fractions(A, config.batches, directions, config.gamma)
        outcomes.append(_fraction_outcome(index, fractions, directions, config.fraction))
    return _report(CheckName.batch_srec, config, outcomes, gamma=config.gamma)


def check_multiplier_bound(config: LemmaCheckConfig, net: Optional[GeneratorNet] = None) -> LemmaCheckReport:
    """
    Per trial, draw a true latent, a measurement matrix, noise and `direction_samples` latents z, and check that
    (1/b) |eta_B^T A_B (G(z) - G(z*))| <= sigma ||G(z) - G(z*)|| holds on at least `fraction` of the batches
    for every z. Latents with G(z) = G(z*) are skipped.
    """
    outcomes = []
    for index, rng in enumerate(spawn_generators(config.seed, config.trials)):
        trial_net = _trial_net(config, net, rng)
        target = forward(trial_net, rng.standard_normal(trial_net.input_dim))
        A = sample_measurement_matrix(config.m, config.n, config.ensemble, rng)
        noise = config.noise.sample(config.m, rng)
        directions = np.column_stack(
            [forward(trial_net, rng.standard_normal(trial_net.input_dim)) - target for _ in range(config.direction_samples)]
        )
        directions = _nonzero(directions)
        fractions = multiplier_fractions(A, noise, config.batches, directions, config.noise.sigma)
        outcomes.append(_fraction_outcome(index, fractions, directions, config.fraction))
    return _report(CheckName.multiplier_bound, config, outcomes, sigma=config.noise.sigma)


CHECKS = {
    CheckName.objective_bound: check_objective_bound,
    CheckName.batch_srec: check_batch_srec,
    CheckName.multiplier_bound: check_multiplier_bound,
}
"Every lemma check by name."


def calibrate_gamma(config: LemmaCheckConfig, gammas: Iterable[float], source: DirectionArg = None) -> LemmaCheckReport:
    """
    Sweep candidate restricted eigenvalue constants from the largest down and return the report of the first
    that meets the pass target, with the calibrated gamma and the ensemble's estimated moment ratio.
    Args:
        config: check configuration, its `gamma` is replaced by every candidate
        gammas: candidate constants
        source: direction source, see `check_batch_srec`

    Returns:
        The passing report, `calibrated` holding `gamma` and `moment_ratio`.

    Raises:
        CalibrationError: when no candidate passes
    """
    for gamma in sorted(gammas, reverse=True):
        report = check_batch_srec(config.with_updates(gamma=gamma), source)
        if report.passed:
            ratio = estimate_moment_ratio(
                config.ensemble, config.direction_samples, config.moment_samples, n=config.n, seed=config.seed
            )
            report.calibrated = {"gamma": gamma, "moment_ratio": ratio}
            return report
        logger.debug("gamma=%g failed with pass rate %.3f", gamma, report.pass_rate)
    raise CalibrationError(f"No gamma in the sweep reached pass rate {config.pass_target}")


def sweep_batch_size(
    config: LemmaCheckConfig,
    batch_sizes: Iterable[int],
    check: Union[CheckName, str, Callable[[LemmaCheckConfig], LemmaCheckReport]] = CheckName.batch_srec,
) -> Tuple[int, LemmaCheckReport]:
    """
    The smallest batch size at which a check meets its pass target.
    Args:
        config: check configuration, its `batch_size` is replaced by every candidate
        batch_sizes: candidate batch sizes
        check: the check, by name or as a callable

    Returns:
        The batch size and its report, `calibrated` holding `batch_size`.

    Raises:
        CalibrationError: when no batch size passes
    """
    run_check = check if callable(check) else CHECKS[CheckName(check)]
    for batch_size in sorted(batch_sizes):
        report = run_check(config.with_updates(batch_size=batch_size))
        if report.passed:
            report.calibrated = {**report.calibrated, "batch_size": batch_size}
            return batch_size, report
    raise CalibrationError(f"No batch size in the sweep reached pass rate {config.pass_target}")


def required_trials(true_rate: float = 0.99, target: float = 0.95, alpha: float = 1e-3, max_trials: int = 100_000) -> int:
    """
    The smallest trial count N for which a property holding with probability `true_rate` shows a pass rate below
    `target` with probability less than `alpha`.
    """
    if not 0 < target < true_rate <= 1:
        raise ValueError(f"Need 0 < target < true_rate <= 1, got target={target}, true_rate={true_rate}")
    for trials in range(1, max_trials + 1):
        failing = math.ceil(round(target * trials, 9)) - 1
        if stats.binom.cdf(failing, trials, true_rate) < alpha:
            return trials
    raise ValueError(f"No trial count up to {max_trials} reaches alpha={alpha}")
