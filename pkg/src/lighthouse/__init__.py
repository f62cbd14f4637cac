"""Simulation and analysis of Haken's Lighthouse spiking network model."""
__version__ = "0.1.0"

from . import errors, kernels, network, synchrony, msf, field, simulator, waves, turing, bumps  # noqa: F401,E402
