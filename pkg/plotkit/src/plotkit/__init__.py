"""Static figure rendering for experiment bundles produced by lqlab.

Consumes only the published CSV contract (header
``scenario,seed,t,cumulative_cost,regret,epoch,aborted``); one curve per
scenario showing seed-mean regret with an inter-quartile band.
"""

from .bundle import (
    EXPECTED_COLUMNS,
    ScenarioCurve,
    SchemaError,
    bundle_files,
    load_curves,
    read_scenarios,
)
from .figure import GUIDE_SLOPES, PlotSpec, build_figure, guide_anchor, render

__version__ = "0.1.0"

__all__ = [
    "EXPECTED_COLUMNS",
    "GUIDE_SLOPES",
    "PlotSpec",
    "ScenarioCurve",
    "SchemaError",
    "build_figure",
    "bundle_files",
    "guide_anchor",
    "load_curves",
    "read_scenarios",
    "render",
]
