"""
Synthesis of robust compressed sensing problems.

Clean measurements follow y_i = <a_i, G(z*)> + eta_i with i.i.d. isotropic rows a_i. The contamination
model then overwrites exactly floor(epsilon * m) uniformly chosen rows. The default outliers are
random-sign rows of A paired with y_i = -1; no targeted attack is simulated, but a user callback can
replace the overwrite.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Extra

from momcs.core.errors import MomcsError
from momcs.core.seeds import SeedLike, as_generator
from momcs.generator import GeneratorNet, LatentVector, as_latent, forward

from .ensembles import Ensemble, NoiseSpec, sample_measurement_matrix

logger = logging.getLogger(__name__)

CorruptionCallback = Callable[[np.ndarray, np.ndarray, np.ndarray, np.random.Generator], None]
"""callback(A, y, rows, rng) overwrites the selected rows of A and y in place."""


class SensingError(MomcsError, ValueError):
    """Raised when a sensing problem cannot be synthesised or modified as requested."""

    pass


class CorruptionIndexError(SensingError):
    """Raised when a corruption targets a row outside [0, m)."""

    pass


class NonFiniteSignalError(SensingError):
    """Raised when G(z*) holds non-finite values."""

    pass


class CorruptionTarget(str, Enum):
    """
    Which part of a measurement pair the outliers overwrite.

    Attributes:
        both: the row of A and the entry of y
        y_only: only the entry of y
        a_only: only the row of A
    """

    both: str = "both"
    y_only: str = "y_only"
    a_only: str = "a_only"


class CorruptionSpec(BaseModel):
    """
    How selected rows are corrupted.

    Attributes:
        target: which part of the (a_i, y_i) pair is overwritten
        y_value: the value written into corrupted entries of y
        callback: optional replacement for the built-in overwrite, called as callback(A, y, rows, rng)
    """

    target: CorruptionTarget = CorruptionTarget.both
    y_value: float = -1.0
    callback: Optional[CorruptionCallback] = None

    class Config:
        extra = Extra.forbid
        arbitrary_types_allowed = True


@dataclass
class SensingProblem:
    """
    A linear measurement problem y ~ A G(z*).

    Attributes:
        A: m x n measurement matrix
        y: observations of length m
        z_star: ground-truth latent, kept for evaluation only
        sigma: noise standard deviation
        epsilon: corruption fraction
        corrupted_rows: sorted indices of the rows that were overwritten
        ensemble_tag: textual tag of the ensemble of A
        noise_tag: textual tag of the noise distribution
        seed: the synthesis seed when it was an integer
    """

    A: np.ndarray
    y: np.ndarray
    z_star: LatentVector
    sigma: float = 0.0
    epsilon: float = 0.0
    corrupted_rows: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    ensemble_tag: str = "gaussian"
    noise_tag: str = "gaussian*0"
    seed: Optional[int] = None

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.float64)
        self.z_star = np.asarray(self.z_star, dtype=np.float64)
        self.corrupted_rows = np.unique(np.asarray(self.corrupted_rows, dtype=np.int64))
        if self.A.ndim != 2 or self.y.shape != (self.A.shape[0],):
            raise SensingError(f"A of shape {self.A.shape} does not match y of shape {self.y.shape}")
        if not np.all(np.isfinite(self.A)):
            raise SensingError("The measurement matrix holds non-finite entries")
        if not 0 <= self.epsilon < 1:
            raise SensingError(f"epsilon must lie in [0, 1), got {self.epsilon}")
        self._check_rows(self.corrupted_rows)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def clean_rows(self) -> np.ndarray:
        return np.setdiff1d(np.arange(self.m), self.corrupted_rows)

    def subset(self, rows: Sequence[int]) -> "SensingProblem":
        """
        The problem restricted to `rows`, with the corruption bookkeeping remapped to the new positions.
        """
        rows = np.asarray(rows, dtype=np.int64)
        self._check_rows(rows)
        corrupted = np.flatnonzero(np.isin(rows, self.corrupted_rows))
        return SensingProblem(
            A=self.A[rows].copy(),
            y=self.y[rows].copy(),
            z_star=self.z_star.copy(),
            sigma=self.sigma,
            epsilon=len(corrupted) / len(rows),
            corrupted_rows=corrupted,
            ensemble_tag=self.ensemble_tag,
            noise_tag=self.noise_tag,
            seed=self.seed,
        )

    def _check_rows(self, rows: np.ndarray) -> None:
        if rows.size and (rows.min() < 0 or rows.max() >= self.m):
            raise CorruptionIndexError(f"Row indices must lie in [0, {self.m}), got range [{rows.min()}, {rows.max()}]")


def corruption_count(epsilon: float, m: int) -> int:
    """floor(epsilon * m), robust to the representation error of decimal fractions such as 0.29 * 100."""
    return int(math.floor(round(epsilon * m, 9)))


def apply_corruption(
    problem: SensingProblem,
    rows: Sequence[int],
    seed: SeedLike = None,
    corruption: Optional[CorruptionSpec] = None,
) -> np.ndarray:
    """
    Overwrite the selected rows in place: rows of A become i.i.d. uniform +-1 and entries of y become -1.
    Args:
        problem: the problem to corrupt
        rows: row indices to corrupt
        seed: seed or generator for the random signs
        corruption: target, value and optional callback; the default reproduces the outliers above

    Returns:
        The sorted corrupted row indices that were written.

    Raises:
        CorruptionIndexError: when a row lies outside [0, m)
    """
    corruption = corruption or CorruptionSpec()
    rows = np.unique(np.asarray(rows, dtype=np.int64))
    problem._check_rows(rows)
    if rows.size == 0:
        return rows
    rng = as_generator(seed)
    if corruption.callback is not None:
        corruption.callback(problem.A, problem.y, rows, rng)
    else:
        if corruption.target in (CorruptionTarget.both, CorruptionTarget.a_only):
            problem.A[rows] = Ensemble.rademacher().sample((rows.size, problem.n), rng)
        if corruption.target in (CorruptionTarget.both, CorruptionTarget.y_only):
            problem.y[rows] = corruption.y_value
    if not np.all(np.isfinite(problem.A)):
        raise SensingError("Corruption left non-finite entries in the measurement matrix")
    problem.corrupted_rows = np.union1d(problem.corrupted_rows, rows)
    return rows


def synthesize(
    net: GeneratorNet,
    z_star: Sequence[float],
    m: int,
    ensemble: Ensemble,
    noise: NoiseSpec,
    epsilon: float = 0.0,
    corruption: Optional[CorruptionSpec] = None,
    seed: SeedLike = None,
) -> SensingProblem:
    """
    Draw A, build y = A G(z*) + eta, then corrupt exactly floor(epsilon * m) rows chosen uniformly
    without replacement.
    Args:
        net: the generator
        z_star: ground-truth latent
        m: number of measurements
        ensemble: distribution of the entries of A
        noise: measurement noise
        epsilon: corruption fraction in [0, 1)
        corruption: how corrupted rows are overwritten
        seed: seed or generator; integer seeds are recorded on the problem

    Returns:
        A new SensingProblem.
    """
    if not 0 <= epsilon < 1:
        raise SensingError(f"epsilon must lie in [0, 1), got {epsilon}")
    z_star = as_latent(net, z_star)
    signal = forward(net, z_star)
    if not np.all(np.isfinite(signal)):
        raise NonFiniteSignalError("G(z*) holds non-finite entries")
    rng = as_generator(seed)
    A = sample_measurement_matrix(m, net.output_dim, ensemble, rng)
    y = A @ signal + noise.sample(m, rng)
    problem = SensingProblem(
        A=A,
        y=y,
        z_star=z_star,
        sigma=noise.sigma,
        epsilon=epsilon,
        ensemble_tag=ensemble.tag,
        noise_tag=noise.tag,
        seed=int(seed) if isinstance(seed, (int, np.integer)) else None,
    )
    count = corruption_count(epsilon, m)
    if count:
        rows = rng.choice(m, size=count, replace=False)
        apply_corruption(problem, rows, rng, corruption)
    logger.debug("Synthesised problem m=%d n=%d ensemble=%s corrupted=%d", m, net.output_dim, ensemble.tag, count)
    return problem


def split_validation(
    problem: SensingProblem, validation_size: int, seed: SeedLike = None
) -> Tuple[SensingProblem, SensingProblem]:
    """
    Hold out `validation_size` uniformly chosen measurements that are not used during optimisation.
    Returns:
        (train, validation) problems; the corrupted rows are remapped into each part.
    """
    if not 0 < validation_size < problem.m:
        raise SensingError(f"validation_size must lie in (0, {problem.m}), got {validation_size}")
    permutation = as_generator(seed).permutation(problem.m)
    validation_rows = np.sort(permutation[:validation_size])
    train_rows = np.sort(permutation[validation_size:])
    return problem.subset(train_rows), problem.subset(validation_rows)
