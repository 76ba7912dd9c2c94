import numpy as np

from momcs.generator import GeneratorNet
from momcs.sensing import SensingProblem

IDENTITY_1D = GeneratorNet(layer_dims=(1, 1), weights=(np.array([[1.0]]),), biases=(np.zeros(1),))


def scalar_problem(y, a=None):
    """Problem on G(z) = z with one measurement column; l_i(z) = (a_i z - y_i)^2."""
    y = np.asarray(y, dtype=np.float64)
    a = np.ones(len(y)) if a is None else np.asarray(a, dtype=np.float64)
    return SensingProblem(A=a[:, None], y=y, z_star=np.zeros(1))
