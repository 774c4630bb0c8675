"""Spectral toolkit for the Montgomery operator ``-d^2/dt^2 + (t^2/2 - alpha)^2``."""
from .model import BCMode, ModelParams, potential_value, turning_points

__version__ = "0.1.0"

__all__ = ["BCMode", "ModelParams", "potential_value", "turning_points", "__version__"]
