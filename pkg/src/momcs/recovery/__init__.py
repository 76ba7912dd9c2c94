from .config import (
    DEFAULT_LEARNING_RATES,
    Algorithm,
    OptimizerKind,
    OptimizerSettings,
    RecoveryConfig,
    RestartSelection,
    StepSchedule,
)
from .optimizers import Adam, GradientDescent, Momentum, Optimizer, build_optimizer, scheduled_step_size
from .run import (
    Evaluation,
    RecoveryFailedError,
    RecoveryReport,
    RecoveryRun,
    RestartResult,
    RestartSummary,
    SelectionError,
    evaluate_objective,
    recover,
    restart_scores,
    select_best,
    validation_loss,
)
from .selection import select_batch_count, select_learning_rate
