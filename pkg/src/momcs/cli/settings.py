"""
Configuration sections shared by the commands: where the generator comes from and how a problem is drawn.
"""
import logging
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Extra, Field, validator

from momcs.core.seeds import derive_seed
from momcs.generator import GeneratorNet, load_weights, random_generator
from momcs.sensing import CorruptionSpec, Ensemble, NoiseSpec, SensingProblem, coerce_ensemble, split_validation, synthesize

logger = logging.getLogger(__name__)


class GeneratorSource(BaseModel):
    """
    A random-weight generator, or one loaded from a weight file when `weights` is set.

    Attributes:
        dims: layer dims [k, h1, ..., n] of the random generator
        seed: seed of the weight draw
        scale: weight scale of the random generator
        final_relu: whether the last layer of the random generator is rectified
        weights: path of a weight file
    """

    dims: List[int] = Field(default_factory=lambda: [5, 50, 100])
    seed: int = Field(0, ge=0)
    scale: float = Field(1.0, gt=0)
    final_relu: bool = False
    weights: Optional[Path] = None

    class Config:
        extra = Extra.forbid

    @validator("dims")
    def _enough_layers(cls, value):
        if len(value) < 2 or any(d < 1 for d in value):
            raise ValueError(f"need at least two dims, all >= 1, got {value}")
        return value

    def build(self) -> GeneratorNet:
        if self.weights is not None:
            logger.info("Loading generator weights from %s", self.weights)
            return load_weights(self.weights)
        return random_generator(self.dims, seed=self.seed, scale=self.scale, final_relu=self.final_relu)


def draw_problem(
    net: GeneratorNet,
    m: int,
    ensemble: Ensemble,
    noise: NoiseSpec,
    epsilon: float,
    corruption: CorruptionSpec,
    seed: int,
) -> SensingProblem:
    """
    Draw z* ~ N(0, I) from a stream derived from `seed`, then synthesize the problem with `seed` itself.
    """
    z_star = np.random.default_rng(derive_seed(seed, 1)).standard_normal(net.input_dim)
    return synthesize(net, z_star, m, ensemble, noise, epsilon=epsilon, corruption=corruption, seed=seed)


class ProblemSettings(BaseModel):
    """
    A single synthesized problem.

    Attributes:
        m: number of measurements, validation measurements included
        ensemble: entry distribution of A, as a tag such as `student_t(4)` or a mapping
        noise: measurement noise
        epsilon: corruption fraction
        corruption: how corrupted rows are overwritten
        validation_size: measurements held out for restart and hyperparameter selection, 0 for none
        seed: synthesis seed
    """

    m: int = Field(200, ge=1)
    ensemble: Ensemble = Field(default_factory=Ensemble.gaussian)
    noise: NoiseSpec = Field(default_factory=NoiseSpec)
    epsilon: float = Field(0.0, ge=0, lt=1)
    corruption: CorruptionSpec = Field(default_factory=CorruptionSpec)
    validation_size: int = Field(0, ge=0)
    seed: int = Field(0, ge=0)

    class Config:
        extra = Extra.forbid

    _coerce_ensemble = validator("ensemble", pre=True, allow_reuse=True)(coerce_ensemble)

    @validator("validation_size")
    def _leaves_training_rows(cls, value, values):
        if "m" in values and value >= values["m"]:
            raise ValueError(f"validation_size must be smaller than m={values['m']}")
        return value

    def build(self, net: GeneratorNet) -> Tuple[SensingProblem, Optional[SensingProblem]]:
        """
        Returns:
            The training problem and the held-out validation problem (None without validation).
        """
        problem = draw_problem(net, self.m, self.ensemble, self.noise, self.epsilon, self.corruption, self.seed)
        if not self.validation_size:
            return problem, None
        return split_validation(problem, self.validation_size, derive_seed(self.seed, 2))
