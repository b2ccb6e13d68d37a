"""Render figures from ringswarm telemetry CSV files.

This package is deliberately decoupled from the simulator: it reads only
the documented CSV schema, so the simulator and its test suite run without
it (and vice versa, given any conforming CSV).
"""

__version__ = "0.1.0"

from .reader import SchemaError, Telemetry, read_telemetry
from .render import PLOT_KINDS, render

__all__ = ["SchemaError", "Telemetry", "read_telemetry", "PLOT_KINDS", "render"]
