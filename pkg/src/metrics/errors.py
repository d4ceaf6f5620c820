"""Errors raised by the statistics helpers."""


class StatisticsError(ValueError):
    """Raised when a statistic is asked for outside its input domain."""
