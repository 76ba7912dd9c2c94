"""
Median selection over batches.

For an even number of batches the lower median is used: the value of rank floor((M + 1) / 2) in ascending
order. The selection therefore always lands on an actual batch, whose gradient can be back-propagated.
When several batches share the median value, the lowest batch index wins.
"""
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class MedianSelection:
    """
    Attributes:
        batch_index: the selected batch
        value: the objective value of that batch
    """

    batch_index: int
    value: float


def select_median(values: Sequence[float], upper: bool = False) -> MedianSelection:
    """
    Select the median batch.
    Args:
        values: one objective value per batch
        upper: take the upper median (rank floor(M / 2) + 1) instead of the lower one

    Returns:
        The selected batch and its value.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise ValueError(f"Median selection needs a non-empty vector, got shape {values.shape}")
    rank = values.size // 2 if upper else (values.size + 1) // 2 - 1
    median = np.sort(values)[rank]
    # NaN never compares equal, fall back to the sorted position
    ties = np.flatnonzero(values == median)
    batch_index = int(ties[0]) if ties.size else int(np.argsort(values, kind="stable")[rank])
    return MedianSelection(batch_index=batch_index, value=float(values[batch_index]))
