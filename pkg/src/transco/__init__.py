"""Field states for exact and optimal atomic rotations in Jaynes-Cummings and Tavis-Cummings models."""

from transco.errors import DomainError, ResourceCapError
from transco.fockcore import FieldState, GaussianSpec, PulseSpec, QubitAngles

__version__ = "0.1.0"

__all__ = ["DomainError", "ResourceCapError", "FieldState", "GaussianSpec", "PulseSpec", "QubitAngles"]
