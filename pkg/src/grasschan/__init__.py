"""Grassmann quantum channels: construction, capacities, verification."""

from . import capacity, channels, fock, verify
from .errors import ConsistencyError, ConvergenceError, DomainError, PreconditionError

__version__ = "0.1.0"

__all__ = [
    "capacity",
    "channels",
    "fock",
    "verify",
    "ConsistencyError",
    "ConvergenceError",
    "DomainError",
    "PreconditionError",
]
