"""Figure rendering for triscatter CSV artifacts."""

from .loader import DumpSet, MissingDumpError, discrepancy_support_stats, load_dumps
from .render import FIGURES, render

__all__ = [
    "DumpSet",
    "MissingDumpError",
    "discrepancy_support_stats",
    "load_dumps",
    "FIGURES",
    "render",
]
