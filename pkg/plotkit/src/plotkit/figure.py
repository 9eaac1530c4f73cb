"""Figure assembly: one regret curve per scenario with an inter-quartile band.

Regret spans orders of magnitude on every bundle, so the regret axis is
always logarithmic; `scale` only decides whether the horizon axis joins it.
Logged t values are plotted as-is — no resampling or interpolation between
the points the runner chose to record.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .bundle import ScenarioCurve, load_curves

SCALES = ("linear", "loglog")
GUIDE_SLOPES = (0.5, 1.0)


@dataclass(frozen=True)
class PlotSpec:
    """What to draw and where to write it.

    Curves are grouped by the scenario column of the inputs. `scale` picks
    the horizon axis ("linear" or "loglog"); `slope_guides=None` means
    guides follow the scale (drawn only in log-log mode). `scenarios=None`
    plots everything found, in input order; naming scenarios instead selects
    and orders them, and each named one must exist in the inputs.
    """

    inputs: tuple[Path, ...]
    out_path: Path
    scale: str = "linear"
    slope_guides: bool | None = None
    scenarios: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.scale not in SCALES:
            raise ValueError(f"scale must be one of {SCALES}, got {self.scale!r}")
        if not self.inputs:
            raise ValueError("PlotSpec needs at least one input CSV")

    @property
    def draw_guides(self) -> bool:
        if self.slope_guides is None:
            return self.scale == "loglog"
        return self.slope_guides


def _select(curves: list[ScenarioCurve], wanted) -> list[ScenarioCurve]:
    if wanted is None:
        return curves
    by_name = {c.name: c for c in curves}
    missing = [name for name in wanted if name not in by_name]
    if missing:
        raise ValueError(f"scenarios not present in the inputs: {', '.join(missing)}")
    return [by_name[name] for name in wanted]


def guide_anchor(curves: list[ScenarioCurve]) -> tuple[float, float]:
    """Anchor point for reference slopes: the first logged T across all
    curves, with the geometric mean of the curve means recorded there."""
    t0 = min(float(c.ts[0]) for c in curves)
    at_t0 = [float(c.mean[0]) for c in curves if float(c.ts[0]) == t0 and c.mean[0] > 0]
    y0 = float(np.exp(np.mean(np.log(at_t0)))) if at_t0 else 1.0
    return t0, y0


def build_figure(spec: PlotSpec):
    """Assemble the matplotlib figure for `spec` without writing it."""
    curves = _select(load_curves(spec.inputs), spec.scenarios)
    if not curves:
        raise ValueError("no scenario data in the inputs; nothing to plot")
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for curve in curves:
        (line,) = ax.plot(curve.ts, curve.mean, label=curve.name, linewidth=1.6)
        lo, hi = curve.band
        ax.fill_between(curve.ts, lo, hi, color=line.get_color(), alpha=0.2, linewidth=0)
    if spec.draw_guides:
        t0, y0 = guide_anchor(curves)
        grid = np.unique(np.concatenate([c.ts[c.ts >= t0] for c in curves]))
        for slope, style in zip(GUIDE_SLOPES, ("--", ":")):
            label = f"slope {slope:g} reference"
            ax.plot(grid, y0 * (grid / t0) ** slope, style, color="0.5",
                    linewidth=1.0, label=label)
    ax.set_yscale("log")
    if spec.scale == "loglog":
        ax.set_xscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("regret")
    ax.grid(True, which="both", alpha=0.25)
    ax.legend(loc="upper left", fontsize="small")
    fig.tight_layout()
    return fig, ax


def render(spec: PlotSpec) -> Path:
    """Write the figure for `spec` to its output path and return the path."""
    fig, _ = build_figure(spec)
    out = Path(spec.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    try:
        fig.savefig(out, dpi=150)
    finally:
        plt.close(fig)
    return out
