"""
Base class for recovery middlewares.
"""
from abc import abstractmethod  # pylint: disable=E0611
from typing import Any, Callable, Dict


class RecoveryMiddleware:
    """
    Base class for recovery middlewares. Middlewares wrap a recovery run and perform some actions before and
    after it is executed.
    Is mainly used for logging, but can be used for other purposes as well.
    Please see `LoggingMiddleware` for an example of a middleware.
    Args:
        run: The recovery run to wrap
        kwargs: The keyword arguments passed to the run
        inner: The next callable of the chain; defaults to the run itself
    Attributes:
        _run: The recovery run to wrap
        _kwargs: The keyword arguments passed to the run
    """

    def __init__(self, run, kwargs: Dict[str, Any], inner: Callable[[], Any] = None):
        self._run = run
        self._kwargs = kwargs
        self._inner = inner or (lambda: run._exec(kwargs))

    def __call__(self) -> Any:
        """
        Calls `before`, executes the wrapped run, calls `after` and returns the result of the run.
        """
        self.before(self._run)
        res = self._inner()
        self.after(self._run)
        return res

    @abstractmethod
    def before(self, run) -> None:
        """
        Executed before the run.
        Args:
            run: the recovery run
        """

    @abstractmethod
    def after(self, run) -> None:
        """
        Executed after the run. The report is available as `run.report`.
        Args:
            run: the recovery run
        """
