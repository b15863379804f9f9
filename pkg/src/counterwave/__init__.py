"""Charged scalar particle dynamics in two counter-propagating circularly
polarised plane waves: classical orbits, Klein-Gordon states and their
Mathieu reductions, approximation schemes and the harmonic emission spectrum.
"""
from . import classical, emission, quantum, relkin, specfun
from .errors import ConfigError, CounterwaveError, ForbiddenRegimeError, NonConvergenceError
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["classical", "emission", "quantum", "relkin", "specfun", "BACKEND", "ConfigError",
           "CounterwaveError", "ForbiddenRegimeError", "NonConvergenceError", "__version__"]
