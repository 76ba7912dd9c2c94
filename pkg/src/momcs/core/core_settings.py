"""
This module contains the core settings for the momcs project.
In order to create proper separation from existing code on the client's environment,
we require all environment variables used by `momcs` be prefixed with `MOMCS_`.
This way we do not interfere with any existing environment variables.
"""
import os

MOMCS_PREFIX = "MOMCS"

LOG_LEVEL: str = os.getenv(f"{MOMCS_PREFIX}_LOG_LEVEL", "WARNING")
"Log level installed by the command line interface."
THREADS: int = int(os.getenv(f"{MOMCS_PREFIX}_THREADS", "1"))
"Default number of workers used by the benchmark harness."
DIVERGENCE_LIMIT: float = float(os.getenv(f"{MOMCS_PREFIX}_DIVERGENCE_LIMIT", "1e6"))
"A recovery restart is treated as diverged once any latent coordinate exceeds this magnitude."
