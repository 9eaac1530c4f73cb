"""Readers for the experiment-bundle CSV contract.

A bundle directory holds one CSV per scenario (plus summary.json and
manifest.json, which plotting ignores). Every CSV carries the exact header
``scenario,seed,t,cumulative_cost,regret,epoch,aborted``; anything else is
rejected with an error that names the offending columns.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

EXPECTED_COLUMNS = (
    "scenario",
    "seed",
    "t",
    "cumulative_cost",
    "regret",
    "epoch",
    "aborted",
)


class SchemaError(ValueError):
    """Raised when a CSV header does not match the bundle contract."""


@dataclass(frozen=True)
class ScenarioCurve:
    """Per-seed regret traces of one scenario on its logged horizon grid."""

    name: str
    ts: np.ndarray
    regret: np.ndarray  # shape (n_seeds, len(ts)), seed-major

    @property
    def n_seeds(self) -> int:
        return int(self.regret.shape[0])

    @property
    def mean(self) -> np.ndarray:
        """Seed-mean regret at each logged t."""
        return self.regret.mean(axis=0)

    @property
    def band(self) -> tuple[np.ndarray, np.ndarray]:
        """25th and 75th percentile of regret across seeds at each logged t."""
        lo = np.percentile(self.regret, 25.0, axis=0)
        hi = np.percentile(self.regret, 75.0, axis=0)
        return lo, hi


def _validate_header(path: Path, header: list[str] | None) -> None:
    if header is None or tuple(header) != EXPECTED_COLUMNS:
        found = "nothing" if header is None else ", ".join(header)
        raise SchemaError(
            f"{path} does not follow the bundle CSV schema: expected columns "
            f"{', '.join(EXPECTED_COLUMNS)} but found {found}"
        )


def read_scenarios(path: Path) -> list[ScenarioCurve]:
    """Parse one bundle CSV into curves, ordered by first appearance.

    A file with a valid header but no data rows is skipped with a warning
    (nothing to plot for it). Seeds of one scenario must share the same
    logged-t grid; the grid is kept as-is, ascending.
    """
    path = Path(path)
    per_scenario: dict[str, dict[int, dict[int, float]]] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        _validate_header(path, next(reader, None))
        for row in reader:
            if not row:
                continue
            name, seed, t, regret = row[0], int(row[1]), int(row[2]), float(row[4])
            per_scenario.setdefault(name, {}).setdefault(seed, {})[t] = regret
    if not per_scenario:
        warnings.warn(f"{path.name} has no data rows; skipping it")
        return []
    curves = []
    for name, by_seed in per_scenario.items():
        seeds = sorted(by_seed)
        ts = sorted(by_seed[seeds[0]])
        for seed in seeds:
            if sorted(by_seed[seed]) != ts:
                raise ValueError(
                    f"{path}: seed {seed} of scenario {name!r} logs a different "
                    f"t grid than seed {seeds[0]}"
                )
        regret = np.array([[by_seed[seed][t] for t in ts] for seed in seeds])
        curves.append(ScenarioCurve(name=name, ts=np.array(ts), regret=regret))
    return curves


def bundle_files(bundle_dir) -> tuple[Path, ...]:
    """The scenario CSVs of a bundle directory, in name order."""
    bundle_dir = Path(bundle_dir)
    paths = tuple(sorted(bundle_dir.glob("*.csv")))
    if not paths:
        raise FileNotFoundError(f"no scenario CSVs found in {bundle_dir}")
    return paths


def load_curves(inputs) -> list[ScenarioCurve]:
    """Read every input CSV, preserving file order then appearance order."""
    curves: list[ScenarioCurve] = []
    seen: set[str] = set()
    for path in inputs:
        for curve in read_scenarios(Path(path)):
            if curve.name in seen:
                raise ValueError(f"scenario {curve.name!r} appears in more than one input")
            seen.add(curve.name)
            curves.append(curve)
    return curves
