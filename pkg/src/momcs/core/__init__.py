from .core_settings import DIVERGENCE_LIMIT, LOG_LEVEL, MOMCS_PREFIX, THREADS
from .errors import MomcsError
from .seeds import SeedLike, as_generator, derive_seed, spawn_generators
