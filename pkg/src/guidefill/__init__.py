"""Guidefill: shell-based geometric image inpainting with guide fields."""

from .engine import FillParams, FillReport, inpaint
from .grid import (
    READABLE,
    BYSTANDER,
    INPAINT,
    inner_boundary,
    outer_boundary,
    active_boundary,
    sample_bilinear,
    rotated_ball,
    axis_ball,
)
from .guide import build_guide_field, detect_splines
from .splines import Spline, dumps, loads
from .tracker import WorkMetrics, run_tracked

__all__ = [
    "READABLE",
    "BYSTANDER",
    "INPAINT",
    "inner_boundary",
    "outer_boundary",
    "active_boundary",
    "sample_bilinear",
    "rotated_ball",
    "axis_ball",
    "FillParams",
    "FillReport",
    "inpaint",
    "build_guide_field",
    "detect_splines",
    "Spline",
    "dumps",
    "loads",
    "WorkMetrics",
    "run_tracked",
]

__version__ = "0.1.0"
