"""
One-dimensional median-of-means and moment ratio estimates.
"""
from typing import Optional, Sequence, Union

import numpy as np

from momcs.core.seeds import SeedLike, as_generator
from momcs.objectives import PartitionError, select_median
from momcs.sensing import Ensemble


def mom_mean_1d(samples: Sequence[float], M: int) -> float:
    """
    Median-of-means estimate of a mean: split the samples into M contiguous batches, average each batch and
    take the lower median of the batch means.
    Args:
        samples: real samples, their count divisible by M
        M: number of batches

    Returns:
        The estimate.
    """
    samples = np.asarray(samples, dtype=np.float64).ravel()
    if M < 1 or samples.size == 0 or samples.size % M:
        raise PartitionError(f"{M} batches do not divide {samples.size} samples")
    return select_median(samples.reshape(M, -1).mean(axis=1)).value


def estimate_moment_ratio(
    ensemble: Ensemble,
    directions: Union[int, np.ndarray],
    samples: int,
    n: Optional[int] = None,
    seed: SeedLike = 0,
) -> float:
    """
    Largest L4-L2 ratio E[<a, u>^4]^(1/4) / E[<a, u>^2]^(1/2) over unit directions u, from sample moments of
    `samples` rows a drawn from the ensemble.
    Args:
        ensemble: row entry distribution
        directions: a count of uniformly random unit directions in R^n, or a D x n array of directions
            (normalised here)
        samples: number of sampled rows
        n: dimension, required with a direction count
        seed: seed or generator

    Returns:
        The maximum ratio over the directions.
    """
    rng = as_generator(seed)
    if isinstance(directions, (int, np.integer)):
        if n is None:
            raise ValueError("n is required when directions is a count")
        directions = rng.standard_normal((int(directions), n))
    directions = np.atleast_2d(np.asarray(directions, dtype=np.float64))
    norms = np.linalg.norm(directions, axis=1)
    if np.any(norms == 0):
        raise ValueError("Directions must be non-zero")
    directions = directions / norms[:, None]
    projections = ensemble.sample((samples, directions.shape[1]), rng) @ directions.T
    fourth = np.mean(projections**4, axis=0) ** 0.25
    second = np.mean(projections**2, axis=0) ** 0.5
    return float(np.max(fourth / second))
