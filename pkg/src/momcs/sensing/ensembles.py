"""
Random ensembles for measurement matrices and measurement noise.

Every ensemble is normalised to unit variance per entry, so i.i.d. rows are isotropic (E[a a^T] = I).
Student-t variates are drawn as Gaussian / sqrt(ChiSquare(dof) / dof) and scaled by sqrt((dof - 2) / dof).
"""
import re
from enum import Enum
from typing import Any, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Extra, Field, root_validator, validator

from momcs.core.seeds import SeedLike, as_generator

_STUDENT_T_TAG = re.compile(r"^student_?t\(\s*([0-9.eE+-]+)\s*\)$")


class EnsembleKind(str, Enum):
    """
    Entry distribution of an ensemble.

    Attributes:
        gaussian: standard normal entries
        student_t: Student-t entries with `dof` degrees of freedom, variance normalised
        rademacher: uniform random signs
    """

    gaussian: str = "gaussian"
    student_t: str = "student_t"
    rademacher: str = "rademacher"


class Ensemble(BaseModel):
    """
    An i.i.d. unit-variance entry distribution.

    Attributes:
        kind: the entry distribution
        dof: degrees of freedom, required (and > 2) for Student-t so the variance exists
    """

    kind: EnsembleKind = EnsembleKind.gaussian
    dof: Optional[float] = None

    class Config:
        extra = Extra.forbid
        frozen = True

    @root_validator(skip_on_failure=True)
    def _check_dof(cls, values):
        kind, dof = values.get("kind"), values.get("dof")
        if kind == EnsembleKind.student_t:
            if dof is None or not dof > 2:
                raise ValueError(f"Student-t ensembles need dof > 2 for a finite variance, got {dof}")
        elif dof is not None:
            raise ValueError(f"dof only applies to Student-t ensembles, got dof={dof} for {kind.value}")
        return values

    @classmethod
    def gaussian(cls) -> "Ensemble":
        return cls(kind=EnsembleKind.gaussian)

    @classmethod
    def student_t(cls, dof: float) -> "Ensemble":
        return cls(kind=EnsembleKind.student_t, dof=dof)

    @classmethod
    def rademacher(cls) -> "Ensemble":
        return cls(kind=EnsembleKind.rademacher)

    @classmethod
    def parse(cls, value: Union[str, dict, "Ensemble"]) -> "Ensemble":
        """
        Build an ensemble from its textual tag (`gaussian`, `rademacher`, `student_t(4)`), a mapping or an
        ensemble.
        """
        if isinstance(value, Ensemble):
            return value
        if isinstance(value, dict):
            return cls(**value)
        tag = str(value).strip().lower()
        match = _STUDENT_T_TAG.match(tag)
        if match:
            return cls.student_t(float(match.group(1)))
        return cls(kind=tag)

    @property
    def tag(self) -> str:
        if self.kind == EnsembleKind.student_t:
            return f"student_t({self.dof:g})"
        return self.kind.value

    def sample(self, shape: Union[int, Tuple[int, ...]], seed: SeedLike = None) -> np.ndarray:
        """
        Draw i.i.d. unit-variance entries.
        Args:
            shape: output shape
            seed: seed or generator

        Returns:
            A float64 array of the requested shape.
        """
        rng = as_generator(seed)
        if self.kind == EnsembleKind.gaussian:
            return rng.standard_normal(shape)
        if self.kind == EnsembleKind.rademacher:
            return rng.choice(np.array([-1.0, 1.0]), size=shape)
        return rng.standard_t(self.dof, size=shape) * np.sqrt((self.dof - 2.0) / self.dof)


def coerce_ensemble(value: Any) -> Any:
    """Pydantic pre-validator helper accepting ensemble tags in configuration files."""
    if isinstance(value, (str, Ensemble)):
        return Ensemble.parse(value)
    return value


class NoiseSpec(BaseModel):
    """
    Additive measurement noise eta = sigma * xi with xi drawn from a unit-variance ensemble.

    Attributes:
        distribution: the unit-variance distribution of xi
        sigma: the noise standard deviation
    """

    distribution: Ensemble = Field(default_factory=Ensemble.gaussian)
    sigma: float = Field(1.0, ge=0)

    class Config:
        extra = Extra.forbid
        frozen = True

    _coerce_distribution = validator("distribution", pre=True, allow_reuse=True)(coerce_ensemble)

    @property
    def tag(self) -> str:
        return f"{self.distribution.tag}*{self.sigma:g}"

    def sample(self, m: int, seed: SeedLike = None) -> np.ndarray:
        if self.sigma == 0:
            return np.zeros(m)
        return self.sigma * self.distribution.sample(m, seed)


def sample_measurement_matrix(m: int, n: int, ensemble: Ensemble, seed: SeedLike = None) -> np.ndarray:
    """
    Draw an m x n matrix of i.i.d. unit-variance entries.
    Args:
        m: number of measurements
        n: signal dimension
        ensemble: entry distribution
        seed: seed or generator

    Returns:
        The measurement matrix.
    """
    if m < 1 or n < 1:
        raise ValueError(f"Measurement matrix dims must be >= 1, got {m} x {n}")
    return ensemble.sample((m, n), seed)
