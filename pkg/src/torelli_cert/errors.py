"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Raised when an operation receives out-of-range or inconsistent input."""


class UsageError(ValueError):
    """Raised for malformed CLI requests (unknown proposition ids and the like)."""


class CertificateFormatError(ValueError):
    """Raised when a certificate file does not match the schema."""
