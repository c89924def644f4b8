"""TCAM-based in-memory hyperdimensional computing simulator and explorer."""

__version__ = "0.1.0"

from . import am, core, encoders, errors, explorer, hwmodel  # noqa: F401
