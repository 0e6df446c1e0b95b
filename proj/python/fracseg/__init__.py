"""Change points in the scaling exponent of Gaussian time series."""

from ._core import (
    DomainError,
    IoError,
    NumericError,
    analyze,
    chi2_quantile,
    chi2_sf,
    default_ell,
    gamma,
    log_variances,
    montecarlo,
    simulate,
)

__all__ = [
    "DomainError",
    "IoError",
    "NumericError",
    "analyze",
    "chi2_quantile",
    "chi2_sf",
    "default_ell",
    "gamma",
    "log_variances",
    "montecarlo",
    "simulate",
]
__version__ = "0.1.0"
