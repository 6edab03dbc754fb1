"""Shared exception types.

ValidationError covers everything a user can fix by correcting inputs or
configuration; the CLI maps it to exit code 1. Anything else escaping a
command is a runtime error (exit code 2).
"""


class ValidationError(ValueError):
    """Invalid input data, configuration, or argument values."""
