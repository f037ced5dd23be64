"""Shared test scaffolding.

Thread pools are pinned before numpy is imported anywhere in the test
process so that the byte-identity assertions hold on any host. The
acceptance module records one line per criterion; the terminal-summary
hook prints them after the run.
"""

import os

for _var in (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
    "VECLIB_MAXIMUM_THREADS",
):
    os.environ[_var] = "1"

import math

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repeatable",
    derandomize=True,
    database=None,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repeatable")

# index -> (name, passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE_LINES = {}


def record_criterion(index: int, name: str, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES[index] = (name, passed, detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for index in sorted(ACCEPTANCE_LINES):
        name, passed, detail = ACCEPTANCE_LINES[index]
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {index:2d} {name}: {verdict} ({detail})")


@pytest.fixture(scope="session")
def stage_params():
    """Filter parameters used by the acceptance criteria.

    50 pm width and 0.6 nm separation at a 1.55 um degeneracy wavelength,
    both converted with 2 pi c dlambda / lambda^2.
    """
    from homcat import wavelength_to_angular

    sigma = wavelength_to_angular(1.55e-6, 50e-12)
    separation = wavelength_to_angular(1.55e-6, 0.6e-9)
    return {
        "sigma": sigma,
        "separation": separation,
        "omega_1": 0.5 * separation,
        "omega_2": -0.5 * separation,
    }


@pytest.fixture(scope="session")
def stage_filters(stage_params):
    from homcat import GaussianFilter, GaussianLobe

    sigma = stage_params["sigma"]
    return (
        GaussianFilter(GaussianLobe(stage_params["omega_1"], sigma)),
        GaussianFilter(GaussianLobe(stage_params["omega_2"], sigma)),
    )
