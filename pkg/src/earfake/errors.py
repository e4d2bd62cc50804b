"""Exception types shared across the toolkit."""


class EarfakeError(Exception):
    """Base class for all toolkit errors."""

    category = "internal"


class DomainError(EarfakeError, ValueError):
    """An argument violates an operation's precondition."""

    category = "domain"


class ConfigError(EarfakeError, ValueError):
    """A run configuration is inconsistent or out of range."""

    category = "config"


class FitError(EarfakeError, ValueError):
    """A model fit failed (degenerate or insufficient data)."""

    category = "fit"
