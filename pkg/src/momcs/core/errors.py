"""
Base exception for every error raised by momcs.
Each sub-package defines its own specific errors next to the code that raises them.
"""


class MomcsError(Exception):
    """Generic error class for momcs."""

    pass
