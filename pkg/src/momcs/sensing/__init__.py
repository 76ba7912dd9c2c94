from .ensembles import Ensemble, EnsembleKind, NoiseSpec, coerce_ensemble, sample_measurement_matrix
from .problem import (
    CorruptionIndexError,
    CorruptionSpec,
    CorruptionTarget,
    NonFiniteSignalError,
    SensingError,
    SensingProblem,
    apply_corruption,
    corruption_count,
    split_validation,
    synthesize,
)
from .storage import ProblemFileError, load_problem, save_problem
