"""Figure rendering for the bandit simulator's aggregate CSV output."""

from .model import (AGGREGATE_COLUMNS, Curve, FigureSpec, Panel, SchemaError,
                    build_panels, load_aggregate, smooth_present)
from .render import render

__version__ = "0.1.0"
