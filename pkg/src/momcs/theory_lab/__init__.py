from .certificate import certificate_holds, fit_certificate_constant
from .checks import (
    CHECKS,
    CalibrationError,
    batch_srec_fractions,
    calibrate_gamma,
    check_batch_srec,
    check_multiplier_bound,
    check_objective_bound,
    multiplier_fractions,
    required_trials,
    sweep_batch_size,
)
from .config import CheckName, DirectionSource, LemmaCheckConfig, LemmaCheckReport, TrialOutcome
from .estimators import estimate_moment_ratio, mom_mean_1d
