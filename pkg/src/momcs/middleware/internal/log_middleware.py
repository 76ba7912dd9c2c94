"""
Logger Middleware
"""
import logging
from time import time

from momcs.middleware.base import RecoveryMiddleware

logger = logging.getLogger("RecoveryLogger")


class LoggingMiddleware(RecoveryMiddleware):
    """
    Logs one record per recovery run.
    Example:
        ```py
        run = RecoveryRun(RecoveryConfig(algorithm="mom_tournament", batches=4), middlewares=[LoggingMiddleware])
        report = run(problem, net)
        ```
    """

    start_time: float = None

    def before(self, _):
        """
        Before execution of the run, set the start time.
        """
        self.start_time = time()

    def after(self, run):
        """
        After execution of the run, log the run details: algorithm, batches, restarts, chosen restart,
        final objective, reconstruction error and time.
        """
        report = run.report
        log_record = {
            "algorithm": run.config.label,
            "m": self._kwargs["problem"].m,
            "restarts": run.config.restarts,
            "diverged_restarts": sum(summary.diverged for summary in report.restarts),
            "restart_chosen": report.restart_index_chosen,
            "final_objective": report.final_objective,
            "recon_error_per_pixel": report.recon_error_per_pixel,
            "time": time() - self.start_time,
        }
        logger.info(log_record)
