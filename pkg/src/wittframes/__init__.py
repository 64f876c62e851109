"""Exact frame/window calculus over truncated p-adic power-series rings."""

from .series import (
    ConfigError,
    ExactnessError,
    IdealElem,
    NotAUnitError,
    QuotientRing,
    RingDesc,
    SeriesRing,
    SigmaSpec,
    TruncSeries,
    divide_by_p,
    monomials_below,
)
from .linalg import Mat, NotInvertibleError, solve_prime_power
from .witt import LogVector, WittPolyTable, WittRing, WittVector, get_table

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "ExactnessError", "IdealElem", "NotAUnitError",
    "QuotientRing", "RingDesc", "SeriesRing", "SigmaSpec", "TruncSeries",
    "divide_by_p", "monomials_below", "Mat", "NotInvertibleError",
    "solve_prime_power", "LogVector", "WittPolyTable", "WittRing",
    "WittVector", "get_table", "__version__",
]
