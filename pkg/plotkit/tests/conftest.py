"""Shared fixtures for the plotkit suite.

Bundles are produced through the lqlab command line — the published
interface — never by importing lqlab internals. Trial counts are kept small;
these tests exercise the rendering contract, not the statistics.
"""

import subprocess
import sys

import pytest

FIGURES = ("fig1", "fig2a", "fig2b", "fig3")

SECONDARY: dict[str, tuple[bool, str]] = {}


def record(key: str, passed: bool, detail: str) -> None:
    """Store a rendering-criterion outcome, then assert it."""
    SECONDARY[key] = (bool(passed), detail)
    assert passed, f"{key}: {detail}"


@pytest.fixture
def secondary_record():
    return record


@pytest.fixture(scope="session")
def bundles(tmp_path_factory):
    """One reproduced bundle per figure, rendered-from later in the suite."""
    root = tmp_path_factory.mktemp("bundles")
    for figure in FIGURES:
        proc = subprocess.run(
            [sys.executable, "-m", "lqlab.cli", "reproduce", figure,
             "--out", str(root / figure), "--trials", "2"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
    return root


def write_bundle_csv(path, rows):
    """A schema-conforming CSV from (scenario, seed, t, regret) tuples."""
    lines = ["scenario,seed,t,cumulative_cost,regret,epoch,aborted"]
    for name, seed, t, regret in rows:
        lines.append(f"{name},{seed},{t},{regret},{regret},1,0")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def make_csv(tmp_path):
    def _make(rows, name="curves.csv"):
        return write_bundle_csv(tmp_path / name, rows)

    return _make


def pytest_terminal_summary(terminalreporter):
    if not SECONDARY:
        return
    terminalreporter.section("plot rendering criteria")
    for key, (passed, detail) in SECONDARY.items():
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {key}: {detail}")
