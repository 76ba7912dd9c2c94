"""
Recovery objectives over a sensing problem.

The per-batch loss is l_j(z) = (1/b) ||A_{B_j} G(z) - y_{B_j}||^2. From it:
    MOM tournament:  median_j (l_j(z) - l_j(z'))
    MOM direct:      median_j l_j(z)
and the baselines ERM (mean squared residual), l1 (mean absolute residual) and the trimmed loss (mean of
the smallest t-fraction of squared residuals).
"""
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from momcs.core.errors import MomcsError
from momcs.generator import ForwardCache, GeneratorNet, forward, forward_with_cache, latent_gradient
from momcs.sensing import SensingProblem

from .median import MedianSelection, select_median
from .partition import BatchPartition


class TrimFractionError(MomcsError, ValueError):
    """Raised when a trim fraction keeps no sample or lies outside (0, 1]."""

    pass


class LossKind(str, Enum):
    """
    Per-sample loss used by `objective_gradient`.

    Attributes:
        squared: (<a_i, G(z)> - y_i)^2
        absolute: |<a_i, G(z)> - y_i|
    """

    squared: str = "squared"
    absolute: str = "absolute"


def residuals(problem: SensingProblem, x: np.ndarray) -> np.ndarray:
    """A x - y for a signal x of length n."""
    return problem.A @ x - problem.y


def batch_losses(problem: SensingProblem, x: np.ndarray, partition: BatchPartition) -> np.ndarray:
    """
    Every l_j at the signal x, as a vector of length M.
    """
    return np.mean(residuals(problem, x)[partition.indices] ** 2, axis=1)


def batch_loss(problem: SensingProblem, net: GeneratorNet, z: Sequence[float], batch: Sequence[int]) -> float:
    """
    (1/b) sum_{i in batch} (<a_i, G(z)> - y_i)^2.
    """
    batch = _as_index_set(problem, batch)
    return float(np.mean(residuals(problem, forward(net, z))[batch] ** 2))


def mom_tournament_value(
    problem: SensingProblem,
    net: GeneratorNet,
    z: Sequence[float],
    z_prime: Sequence[float],
    partition: BatchPartition,
) -> MedianSelection:
    """
    The median over batches of l_j(z) - l_j(z'), both players sharing the same partition.
    """
    differences = batch_losses(problem, forward(net, z), partition) - batch_losses(problem, forward(net, z_prime), partition)
    return select_median(differences)


def mom_direct_value(
    problem: SensingProblem, net: GeneratorNet, z: Sequence[float], partition: BatchPartition
) -> MedianSelection:
    """
    The median over batches of l_j(z).
    """
    return select_median(batch_losses(problem, forward(net, z), partition))


def erm_value(problem: SensingProblem, net: GeneratorNet, z: Sequence[float]) -> float:
    """(1/m) ||A G(z) - y||^2, equal to `batch_loss` on one batch holding every sample."""
    return float(np.mean(residuals(problem, forward(net, z)) ** 2))


def l1_value(problem: SensingProblem, net: GeneratorNet, z: Sequence[float]) -> float:
    """(1/m) ||A G(z) - y||_1."""
    return float(np.mean(np.abs(residuals(problem, forward(net, z)))))


def trimmed_indices(squared_residuals: np.ndarray, trim_fraction: float) -> np.ndarray:
    """
    Indices of the floor(t * m) smallest squared residuals, ties broken by index, returned sorted.
    """
    if not 0 < trim_fraction <= 1:
        raise TrimFractionError(f"The trim fraction must lie in (0, 1], got {trim_fraction}")
    keep = int(np.floor(trim_fraction * squared_residuals.size))
    if keep == 0:
        raise TrimFractionError(f"Trim fraction {trim_fraction} keeps no sample out of {squared_residuals.size}")
    return np.sort(np.argsort(squared_residuals, kind="stable")[:keep])


def trimmed_value(
    problem: SensingProblem, net: GeneratorNet, z: Sequence[float], trim_fraction: float
) -> Tuple[float, np.ndarray]:
    """
    Mean of the floor(t * m) smallest squared residuals.
    Returns:
        The value and the kept indices, used to mask the gradient.
    """
    squared = residuals(problem, forward(net, z)) ** 2
    kept = trimmed_indices(squared, trim_fraction)
    return float(np.mean(squared[kept])), kept


def objective_gradient(
    problem: SensingProblem,
    net: GeneratorNet,
    z: Sequence[float],
    index_set: Optional[Sequence[int]],
    sign: int = 1,
    loss: LossKind = LossKind.squared,
    cache: Optional[ForwardCache] = None,
) -> np.ndarray:
    """
    Gradient with respect to z of (1/|S|) sum_{i in S} loss(<a_i, G(z)> - y_i), multiplied by `sign`.
    For the squared loss the upstream vector is (2/|S|) A_S^T r_S; for the absolute loss it is
    (1/|S|) A_S^T sign(r_S) with sign(0) = 0.
    Args:
        problem: the sensing problem
        net: the generator
        z: latent vector
        index_set: the samples S; None stands for every sample
        sign: +1, or -1 to obtain the ascent direction of a maximising player
        loss: squared or absolute
        cache: forward cache at z, reused when given

    Returns:
        A vector of length k.
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    rows = slice(None) if index_set is None else _as_index_set(problem, index_set)
    size = problem.m if index_set is None else rows.size
    if cache is None:
        _, cache = forward_with_cache(net, z)
    A_set = problem.A[rows]
    r = A_set @ cache.output - problem.y[rows]
    if LossKind(loss) == LossKind.squared:
        upstream = (2.0 / size) * (A_set.T @ r)
    else:
        upstream = (1.0 / size) * (A_set.T @ np.sign(r))
    return sign * latent_gradient(net, z, upstream, cache)


def _as_index_set(problem: SensingProblem, index_set: Sequence[int]) -> np.ndarray:
    index_set = np.asarray(index_set, dtype=np.int64).ravel()
    if index_set.size == 0:
        raise ValueError("The index set must not be empty")
    if index_set.min() < 0 or index_set.max() >= problem.m:
        raise IndexError(f"Sample indices must lie in [0, {problem.m})")
    return index_set
