"""Shared exception types for capacity guards and configuration limits."""


class CapacityError(RuntimeError):
    """Projected work or memory exceeds a configured cap."""


class UnsupportedConfigError(ValueError):
    """Operation requested on a configuration kind it does not support."""


class MismatchError(RuntimeError):
    """Two independent pipelines disagreed on a value that must coincide."""
