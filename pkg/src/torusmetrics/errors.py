"""Exceptions shared across the package."""


class InvalidPointError(ValueError):
    """A point violates the defining constraints of its model space."""


class OutOfChartError(InvalidPointError):
    """Chart parameters admit no real point of the model space."""
