"""Shared exception types."""


class FormatError(ValueError):
    """A set file is malformed or violates its structural rules."""


class BudgetError(RuntimeError):
    """A construction would exceed its configured resource budget."""
