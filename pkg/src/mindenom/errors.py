"""Exception types."""


class CapExceededError(RuntimeError):
    """A bounded search hit its safety cap before finding a witness."""
