"""
Configuration of a recovery run.
"""
import math
from enum import Enum

from pydantic import BaseModel, Extra, Field, validator

from momcs.core.core_settings import DIVERGENCE_LIMIT

DEFAULT_LEARNING_RATES = (0.1, 0.05, 0.01, 0.005)
"Learning-rate grid searched when tuning the adaptive-moment optimizer."


class Algorithm(str, Enum):
    """
    Recovery algorithm.

    Attributes:
        erm: least squares over every sample
        l1: least absolute deviations over every sample
        trimmed: least squares over the t-fraction of samples with the smallest residuals
        mom_direct: minimise the median batch loss
        mom_tournament: min-max of the median batch loss difference between two players
    """

    erm: str = "erm"
    l1: str = "l1"
    trimmed: str = "trimmed"
    mom_direct: str = "mom_direct"
    mom_tournament: str = "mom_tournament"

    @property
    def uses_batches(self) -> bool:
        return self in (Algorithm.mom_direct, Algorithm.mom_tournament)


class OptimizerKind(str, Enum):
    """
    Attributes:
        plain_gd: z <- z - lr * g
        momentum: heavy-ball momentum with coefficient `beta`
        adam: adaptive moment estimation with `beta1`, `beta2`, `eps`
    """

    plain_gd: str = "plain_gd"
    momentum: str = "momentum"
    adam: str = "adam"


class OptimizerSettings(BaseModel):
    """
    First-order optimizer used by both players.
    """

    kind: OptimizerKind = OptimizerKind.adam
    beta: float = Field(0.9, ge=0, lt=1)
    beta1: float = Field(0.9, ge=0, lt=1)
    beta2: float = Field(0.999, ge=0, lt=1)
    eps: float = Field(1e-8, gt=0)

    class Config:
        extra = Extra.forbid


class StepSchedule(str, Enum):
    """
    Step size of iteration t out of T, starting from `step_size` and ending at `step_size * final_step_ratio`.

    Attributes:
        constant: every iteration uses `step_size`
        geometric: step_size * final_step_ratio ** (t / (T - 1))
        cosine: step_size * (r + (1 - r) * (1 + cos(pi * t / (T - 1))) / 2) with r = final_step_ratio
    """

    constant: str = "constant"
    geometric: str = "geometric"
    cosine: str = "cosine"


class RestartSelection(str, Enum):
    """
    How restarts are ranked when no validation measurements are given.

    Attributes:
        objective: the final training objective of every restart
        challenger: tournament only; the objective of every restart against the strongest maximising
            player found by any restart
    """

    objective: str = "objective"
    challenger: str = "challenger"


class RecoveryConfig(BaseModel):
    """
    Everything that defines a recovery run besides the problem and the generator.

    Attributes:
        algorithm: which objective is optimised
        batches: number of batches M, used by the MOM algorithms only
        trim_fraction: kept fraction t of the trimmed loss
        step_size: learning rate of the first iteration
        schedule: how the step size decays over the iterations of a restart
        final_step_ratio: step size of the last iteration relative to `step_size`, for decaying schedules
        optimizer: optimizer settings, or just its kind as a string
        iterations: iterations T per restart
        restarts: number of random restarts R
        init_scale: latents start from N(0, init_scale^2 I)
        seed: master seed of the run
        stop_tol: 0 runs every iteration; a positive value stops once |objective| <= stop_tol
        reshuffle_each_iter: draw a new partition at every iteration instead of fixing it for the run
        shuffle_partition: permute the samples before slicing them into batches
        inner_steps: ascent steps of z' per descent step of z; 1 is the simultaneous update
        validation_batches: number of batches of the median-of-means validation loss
        divergence_limit: a restart diverges once a latent coordinate exceeds this magnitude
        restart_selection: ranking of the restarts when no validation measurements are given
    """

    algorithm: Algorithm = Algorithm.mom_tournament
    batches: int = Field(1, ge=1)
    trim_fraction: float = Field(0.9, gt=0, le=1)
    step_size: float = Field(0.05, gt=0)
    schedule: StepSchedule = StepSchedule.constant
    final_step_ratio: float = Field(0.01, gt=0, le=1)
    optimizer: OptimizerSettings = Field(default_factory=OptimizerSettings)
    iterations: int = Field(2000, ge=1)
    restarts: int = Field(5, ge=1)
    init_scale: float = Field(1.0, ge=0)
    seed: int = Field(0, ge=0)
    stop_tol: float = Field(0.0, ge=0)
    reshuffle_each_iter: bool = False
    shuffle_partition: bool = True
    inner_steps: int = Field(1, ge=1)
    validation_batches: int = Field(5, ge=1)
    divergence_limit: float = Field(DIVERGENCE_LIMIT, gt=0)
    restart_selection: RestartSelection = RestartSelection.objective

    class Config:
        extra = Extra.forbid

    @validator("optimizer", pre=True)
    def _optimizer_from_kind(cls, value):
        if isinstance(value, (str, OptimizerKind)):
            return OptimizerSettings(kind=value)
        return value

    @validator("step_size")
    def _finite_step(cls, value):
        if not math.isfinite(value):
            raise ValueError("step_size must be finite")
        return value

    @property
    def label(self) -> str:
        if self.algorithm.uses_batches:
            return f"{self.algorithm.value}(M={self.batches})"
        if self.algorithm == Algorithm.trimmed:
            return f"{self.algorithm.value}(t={self.trim_fraction:g})"
        return self.algorithm.value

    def with_updates(self, **updates) -> "RecoveryConfig":
        """A validated copy with some fields replaced."""
        return RecoveryConfig(**{**self.dict(), **updates})
