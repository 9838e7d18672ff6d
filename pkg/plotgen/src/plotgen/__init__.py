"""Figure rendering for embedbounds sweep CSVs."""

__version__ = "0.1.0"

from .csvio import SchemaError, SweepData, read_sweep
from .render import KINDS, FigureSpec, render

__all__ = ["FigureSpec", "KINDS", "SchemaError", "SweepData", "read_sweep", "render"]
