import time

import pytest
from hypothesis import HealthCheck, settings

import lab_support
from lqlab import labrun
from lqlab.riccati import LQRWeights
from lqlab.sysrep import fixture_initial_gain, cartpole_fixture

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def fixture_sys():
    return cartpole_fixture()


@pytest.fixture(scope="session")
def k0():
    return fixture_initial_gain()


@pytest.fixture(scope="session")
def weights():
    return LQRWeights.identity(4, 1)


# The regret-benchmark scenarios take ~40 s for the set, so they run once per
# session and every consumer (acceptance criteria, adaptive-loop checks)
# shares the results.
_BENCHMARK_NAMES = {
    "fig1": ("full-basis-continual", "lumped-no-exploration"),
    "fig2b": ("lumped-d020-no-exploration",),
}


@pytest.fixture(scope="session")
def benchmark_results():
    out = {}
    start = time.monotonic()
    for figure, wanted in _BENCHMARK_NAMES.items():
        for raw in labrun.figure_scenarios(figure):
            if raw["name"] in wanted:
                rs = labrun.resolve_scenario(raw)
                out[rs.name] = labrun.run_scenario(rs)
    out["elapsed_s"] = time.monotonic() - start
    return out


def pytest_terminal_summary(terminalreporter):
    lab_support.write_summary(terminalreporter)
