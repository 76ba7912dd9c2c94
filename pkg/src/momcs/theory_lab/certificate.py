"""
The reconstruction error certificate ||G(z_hat) - G(z*)||^2 <= c (sigma^2 + tau).

tau is the optimisation accuracy a run reports (its final objective); negative values are clamped to 0.
"""
from typing import Sequence

import numpy as np


def _scale(sigmas: Sequence[float], taus: Sequence[float]) -> np.ndarray:
    return np.asarray(sigmas, dtype=np.float64) ** 2 + np.maximum(np.asarray(taus, dtype=np.float64), 0.0)


def fit_certificate_constant(
    errors: Sequence[float], sigmas: Sequence[float], taus: Sequence[float], quantile: float = 1.0
) -> float:
    """
    Fit the constant c on calibration runs as a quantile (by default the maximum) of
    error / (sigma^2 + max(tau, 0)). The quantile is an order statistic of the ratios, never an interpolation.
    Args:
        errors: squared reconstruction errors
        sigmas: noise levels
        taus: reported optimisation accuracies
        quantile: quantile of the ratios in [0, 1]

    Returns:
        The fitted constant; infinite when a run with zero scale has a non-zero error.
    """
    errors = np.asarray(errors, dtype=np.float64)
    scale = _scale(sigmas, taus)
    if errors.size == 0 or errors.shape != scale.shape:
        raise ValueError("errors, sigmas and taus must be non-empty and of equal length")
    if not 0 <= quantile <= 1:
        raise ValueError(f"quantile must lie in [0, 1], got {quantile}")
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(scale > 0, errors / scale, np.where(errors > 0, np.inf, 0.0))
    return float(np.quantile(ratios, quantile, method="inverted_cdf"))


def certificate_holds(errors: Sequence[float], sigmas: Sequence[float], taus: Sequence[float], c: float) -> np.ndarray:
    """
    Per run, whether error <= c (sigma^2 + max(tau, 0)). An infinite c admits every run, zero scales included.
    Raises:
        ValueError: when c is NaN or negative
    """
    if np.isnan(c) or c < 0:
        raise ValueError(f"The certificate constant must be a non-negative number, got {c}")
    scale = _scale(sigmas, taus)
    bound = np.full(scale.shape, np.inf) if np.isinf(c) else c * scale
    return np.asarray(errors, dtype=np.float64) <= bound
