"""
This module stores sensing problems in a local directory.

The directory holds `A.bin`, `y.bin` and `z_star.bin` in the binary array format of `momcs.core.binary`
and a `metadata.json` sidecar.
"""
import json
import logging
from pathlib import Path
from typing import Union

from momcs.core.binary import ArrayFileError, read_array, write_array
from momcs.core.errors import MomcsError

from .problem import SensingProblem

logger = logging.getLogger(__name__)

METADATA_FILE = "metadata.json"
METADATA_KEYS = ("m", "n", "sigma", "epsilon", "ensemble", "noise", "seed", "corrupted_rows")


class ProblemFileError(MomcsError):
    """Raised when a stored problem directory is missing files or is inconsistent."""

    pass


def save_problem(problem: SensingProblem, directory: Union[str, Path]) -> Path:
    """
    Write a problem into `directory`, creating it if needed.
    Returns:
        The directory path.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_array(directory / "A.bin", problem.A)
    write_array(directory / "y.bin", problem.y)
    write_array(directory / "z_star.bin", problem.z_star)
    metadata = {
        "m": problem.m,
        "n": problem.n,
        "sigma": problem.sigma,
        "epsilon": problem.epsilon,
        "ensemble": problem.ensemble_tag,
        "noise": problem.noise_tag,
        "seed": problem.seed,
        "corrupted_rows": [int(row) for row in problem.corrupted_rows],
    }
    (directory / METADATA_FILE).write_text(json.dumps(metadata, indent=2))
    logger.debug("Saved problem m=%d n=%d to %s", problem.m, problem.n, directory)
    return directory


def load_problem(directory: Union[str, Path]) -> SensingProblem:
    """
    Read a problem written by `save_problem`.
    Raises:
        ProblemFileError: on missing files, missing metadata keys, dims that disagree with the arrays or a
            stored problem that is inconsistent (y length, corrupted rows out of range).
    """
    directory = Path(directory)
    try:
        metadata = json.loads((directory / METADATA_FILE).read_text())
        A = read_array(directory / "A.bin")
        y = read_array(directory / "y.bin")
        z_star = read_array(directory / "z_star.bin")
    except (OSError, ValueError, ArrayFileError) as e:
        raise ProblemFileError(f"Cannot read problem directory {directory}: {e}") from e
    missing = [key for key in METADATA_KEYS if key not in metadata]
    if missing:
        raise ProblemFileError(f"Metadata in {directory} lacks keys {missing}")
    if A.shape != (metadata["m"], metadata["n"]):
        raise ProblemFileError(f"Metadata announces {metadata['m']} x {metadata['n']} but A has shape {A.shape}")
    try:
        return SensingProblem(
            A=A,
            y=y,
            z_star=z_star,
            sigma=metadata["sigma"],
            epsilon=metadata["epsilon"],
            corrupted_rows=metadata["corrupted_rows"],
            ensemble_tag=metadata["ensemble"],
            noise_tag=metadata["noise"],
            seed=metadata["seed"],
        )
    except (TypeError, ValueError) as e:
        raise ProblemFileError(f"Problem directory {directory} is inconsistent: {e}") from e
