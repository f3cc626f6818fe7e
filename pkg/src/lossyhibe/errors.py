"""Exception hierarchy shared by every module.

The CLI maps any :class:`LossyHibeError` to exit status 1.
"""


class LossyHibeError(Exception):
    pass


class ParameterError(LossyHibeError, ValueError):
    pass


class DimensionError(LossyHibeError, ValueError):
    pass


class IdentityError(LossyHibeError, ValueError):
    pass


class InvalidAdversary(LossyHibeError):
    """An adversary broke the query restrictions of an experiment."""
