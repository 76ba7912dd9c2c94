"""
momcs: robust compressed sensing with generative priors.

Recovers the latent code of a fixed ReLU generator from heavy-tailed or corrupted linear measurements with
a median-of-means tournament, next to the ERM, l1, trimmed-loss and direct median-of-means baselines, and
checks the batchwise properties the recovery relies on by simulation.
"""
__version__ = "0.1.0"

from .generator import GeneratorNet, forward, latent_gradient, load_weights, random_generator, save_weights
from .objectives import make_partition
from .recovery import Algorithm, RecoveryConfig, RecoveryReport, RecoveryRun, recover
from .sensing import Ensemble, NoiseSpec, SensingProblem, synthesize
