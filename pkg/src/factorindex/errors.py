"""Exception types shared across the package.

Two broad families matter to callers: bad inputs or configuration
(:class:`ValidationError`) and numerical breakdowns such as singular
matrices or failed iterations (:class:`NumericalError`). The CLI maps
them to exit codes 2 and 3 respectively.
"""


class ValidationError(ValueError):
    """Invalid data, names, or configuration supplied by the caller."""


class NumericalError(ArithmeticError):
    """A numerical procedure could not produce a usable result.

    ``stage`` is filled by the pipeline so operators can tell which step
    of a multi-step run blew up.
    """

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage


class DegenerateDataError(NumericalError):
    """A statistic is undefined for this data (e.g. zero spread everywhere)."""


def with_stage(stage, fn, *args, **kwargs):
    """Run ``fn``, tagging any escaping :class:`NumericalError` with ``stage``."""
    try:
        return fn(*args, **kwargs)
    except NumericalError as exc:
        if exc.stage is None:
            exc.stage = stage
        raise
