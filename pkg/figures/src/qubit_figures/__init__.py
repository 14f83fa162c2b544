"""Render the standard driven-qubit figures from emitted CSV/JSON data.

This package never recomputes physics: every figure is a pure function
of the data files produced by the simulation CLI.
"""

from .data import DataError, Table, read_schedule, read_table
from .render import FigureManifest, render

__all__ = ["DataError", "FigureManifest", "Table", "read_schedule",
           "read_table", "render"]

__version__ = "0.1.0"
