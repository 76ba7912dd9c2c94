import numpy as np

from momcs.generator import GeneratorNet
from momcs.recovery import RecoveryConfig
from momcs.sensing import Ensemble, NoiseSpec, synthesize

# G(z) = W z with W four stacked 2 x 2 identities, so every batch loss is a convex quadratic in z
LINEAR_NET = GeneratorNet(layer_dims=(2, 8), weights=(np.vstack([np.eye(2)] * 4),), biases=(np.zeros(8),))
Z_STAR = np.array([0.7, -1.3])


def linear_problem(m=32, sigma=0.0, epsilon=0.0, seed=0):
    return synthesize(LINEAR_NET, Z_STAR, m, Ensemble.gaussian(), NoiseSpec(sigma=sigma), epsilon=epsilon, seed=seed)


def plain_config(**updates):
    settings = dict(optimizer="plain_gd", step_size=0.02, iterations=2000, restarts=2, init_scale=1.0, seed=3)
    settings.update(updates)
    return RecoveryConfig(**settings)
