from .base import RecoveryMiddleware
from .internal import LoggingMiddleware
