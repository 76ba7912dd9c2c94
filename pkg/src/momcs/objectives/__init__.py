from .losses import (
    LossKind,
    TrimFractionError,
    batch_loss,
    batch_losses,
    erm_value,
    l1_value,
    mom_direct_value,
    mom_tournament_value,
    objective_gradient,
    residuals,
    trimmed_indices,
    trimmed_value,
)
from .median import MedianSelection, select_median
from .partition import BatchPartition, PartitionError, make_partition
