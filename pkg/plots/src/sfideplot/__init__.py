"""Render log-log convergence figures from solver error-table CSVs.

This package only reads the CSV artifacts of the experiment CLI; it never
imports the solver, performs no numerics beyond drawing a reference line,
and takes fitted rates verbatim from the CSV metadata.
"""

__version__ = "0.1.0"

from .cli import ErrorTableData, PlotJob, SchemaError, main, read_error_table, render

__all__ = [
    "__version__",
    "ErrorTableData",
    "PlotJob",
    "SchemaError",
    "main",
    "read_error_table",
    "render",
]
