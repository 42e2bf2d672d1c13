class ValidationError(ValueError):
    """Raised when an input violates a domain invariant (bad lottery, malformed row, unknown rule)."""
