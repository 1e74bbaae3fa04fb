"""Figure rendering for qeclie sweep CSVs."""

__version__ = "0.1.0"

from .render import MissingColumnError, PlotSpec, read_sweep_csv, render

__all__ = ["MissingColumnError", "PlotSpec", "read_sweep_csv", "render",
           "__version__"]
