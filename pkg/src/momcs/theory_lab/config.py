"""
Configuration and reports of the lemma checks.
"""
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Extra, Field, root_validator, validator

from momcs.sensing import Ensemble, NoiseSpec, coerce_ensemble


class CheckName(str, Enum):
    """
    Attributes:
        objective_bound: the median batch loss at the true latent is at most 4 sigma^2
        batch_srec: the restricted eigenvalue bound holds on most batches
        multiplier_bound: the noise cross term is at most sigma ||v|| on most batches
    """

    objective_bound: str = "objective_bound"
    batch_srec: str = "batch_srec"
    multiplier_bound: str = "multiplier_bound"


class DirectionSource(str, Enum):
    """
    Attributes:
        generator: differences G(z1) - G(z2) of random latents
        subspace: random vectors of a random 2k-dimensional subspace
    """

    generator: str = "generator"
    subspace: str = "subspace"


class LemmaCheckConfig(BaseModel):
    """
    Dimensions and constants of a Monte-Carlo lemma check. The number of measurements is always
    `batches * batch_size`.

    Attributes:
        trials: independent problems drawn
        n: signal dimension
        k: latent dimension
        hidden_dims: hidden widths of the random generator drawn per trial
        batches: number of batches M
        batch_size: batch size b
        ensemble: entry distribution of the measurement matrix
        noise: measurement noise
        direction_samples: directions (or latents) sampled per trial
        direction_source: how restricted eigenvalue directions are sampled
        gamma: candidate restricted eigenvalue constant
        fraction: fraction of batches on which a property must hold
        pass_target: pass rate a check must reach
        moment_samples: sample rows used to estimate the moment ratio of the ensemble
        seed: master seed; trial t uses the t-th spawned stream
    """

    trials: int = Field(100, ge=1)
    n: int = Field(100, ge=1)
    k: int = Field(5, ge=1)
    hidden_dims: List[int] = Field(default_factory=lambda: [50])
    batches: int = Field(100, ge=1)
    batch_size: int = Field(8, ge=1)
    ensemble: Ensemble = Field(default_factory=Ensemble.gaussian)
    noise: NoiseSpec = Field(default_factory=NoiseSpec)
    direction_samples: int = Field(100, ge=1)
    direction_source: DirectionSource = DirectionSource.generator
    gamma: float = Field(0.5, gt=0)
    fraction: float = Field(0.9, gt=0, le=1)
    pass_target: float = Field(0.95, gt=0, le=1)
    moment_samples: int = Field(20000, ge=1)
    seed: int = Field(0, ge=0)

    class Config:
        extra = Extra.forbid

    _coerce_ensemble = validator("ensemble", pre=True, allow_reuse=True)(coerce_ensemble)

    @validator("hidden_dims", each_item=True)
    def _positive_width(cls, value):
        if value < 1:
            raise ValueError(f"hidden widths must be >= 1, got {value}")
        return value

    @property
    def m(self) -> int:
        return self.batches * self.batch_size

    @property
    def layer_dims(self) -> List[int]:
        return [self.k, *self.hidden_dims, self.n]

    def with_updates(self, **updates) -> "LemmaCheckConfig":
        return LemmaCheckConfig(**{**self.dict(), **updates})


class TrialOutcome(BaseModel):
    """
    Attributes:
        trial: trial index
        passed: whether the property held
        statistic: the smallest passing-batch fraction over the sampled directions, or for the objective
            bound the median batch loss at the true latent
        worst_direction: the direction attaining the smallest fraction
    """

    trial: int
    passed: bool
    statistic: float
    worst_direction: Optional[List[float]] = None


class LemmaCheckReport(BaseModel):
    """
    Outcome of a lemma check over all trials.
    """

    check: CheckName
    pass_rate: float = Field(..., ge=0, le=1)
    target: float
    seed: int
    dims: Dict[str, int]
    constants: Dict[str, float] = Field(default_factory=dict)
    calibrated: Dict[str, float] = Field(default_factory=dict)
    trials: List[TrialOutcome] = Field(default_factory=list)

    @root_validator(skip_on_failure=True)
    def _consistent_pass_rate(cls, values):
        trials = values["trials"]
        if trials:
            recorded = sum(outcome.passed for outcome in trials) / len(trials)
            if abs(recorded - values["pass_rate"]) > 1e-12:
                raise ValueError(f"pass_rate {values['pass_rate']} does not match the trials ({recorded})")
        return values

    @property
    def passed(self) -> bool:
        return self.pass_rate >= self.target

    def row(self) -> Dict[str, Any]:
        """One flat record: check name, dims, constants, pass rate and seed."""
        return {
            "check": self.check.value,
            **self.dims,
            **self.constants,
            **{f"calibrated_{key}": value for key, value in self.calibrated.items()},
            "pass_rate": self.pass_rate,
            "target": self.target,
            "seed": self.seed,
        }
