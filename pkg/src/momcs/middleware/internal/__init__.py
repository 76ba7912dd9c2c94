from .log_middleware import LoggingMiddleware
