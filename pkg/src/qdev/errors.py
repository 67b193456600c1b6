"""Exception types shared across the package."""


class QdevError(Exception):
    """Base class for all package errors."""


class ParameterError(QdevError, ValueError):
    """A distribution or configuration parameter is outside its legal range."""


class DomainError(QdevError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DegenerateDensityError(DomainError):
    """The population density vanishes at the target quantile."""


class InfiniteTiltError(DomainError):
    """The exponential tilt diverges because the shifted threshold has CDF 0 or 1."""


class ExpansionDomainError(DomainError):
    """The sharp large-deviation expansion is undefined (zero tilt divides the prefactor)."""


class BracketError(QdevError):
    """A one-dimensional search bracket does not contain the optimum."""


class InsufficientDataError(QdevError):
    """Too few finite rows to fit the requested summary."""


class BackendError(QdevError):
    """The requested computational backend is unavailable."""
