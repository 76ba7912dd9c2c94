"""
Partition of the sample indices [m] into M disjoint batches of equal size b = m / M.
"""
from dataclasses import dataclass
from typing import List

import numpy as np

from momcs.core.errors import MomcsError
from momcs.core.seeds import SeedLike, as_generator


class PartitionError(MomcsError, ValueError):
    """Raised when M is not a positive divisor of m."""

    pass


@dataclass(frozen=True, eq=False)
class BatchPartition:
    """
    M disjoint batches of b indices each.

    Attributes:
        indices: (M, b) integer array, row j holds batch j
    """

    indices: np.ndarray

    def __post_init__(self):
        indices = np.array(self.indices, dtype=np.int64)
        if indices.ndim != 2 or indices.shape[0] < 1 or indices.shape[1] < 1:
            raise PartitionError(f"Batch indices must form a non-empty (M, b) array, got shape {indices.shape}")
        if np.unique(indices).size != indices.size:
            raise PartitionError("Batches must be disjoint")
        indices.setflags(write=False)
        object.__setattr__(self, "indices", indices)

    @property
    def M(self) -> int:
        return self.indices.shape[0]

    @property
    def b(self) -> int:
        return self.indices.shape[1]

    @property
    def batches(self) -> List[List[int]]:
        return self.indices.tolist()

    def permuted(self, order) -> "BatchPartition":
        """The same batches listed in another order."""
        return BatchPartition(self.indices[np.asarray(order)])


def make_partition(m: int, M: int, seed: SeedLike = None, shuffle: bool = False) -> BatchPartition:
    """
    Split [m] into M batches of size m / M.
    Args:
        m: number of samples
        M: number of batches, must divide m
        seed: seed or generator of the shuffle
        shuffle: permute the indices before slicing them into contiguous blocks

    Returns:
        The partition.

    Raises:
        PartitionError: when M < 1 or M does not divide m
    """
    if M < 1:
        raise PartitionError(f"The number of batches must be >= 1, got {M}")
    if m < 1 or m % M:
        raise PartitionError(f"The number of batches M={M} must divide the number of samples m={m}")
    order = as_generator(seed).permutation(m) if shuffle else np.arange(m)
    return BatchPartition(order.reshape(M, m // M))
