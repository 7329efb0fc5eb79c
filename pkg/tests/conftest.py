from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from photonmol.molecule import MoleculeParams
from photonmol.sfwm import PumpPulse, build_jsa, design_grids

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def design():
    return MoleculeParams.design()


@pytest.fixture(scope="session")
def design_jsas(design):
    """Designed-device and single-ring JSAs on the shared design grids."""
    pulse = PumpPulse()
    sg, ig = design_grids(design, pulse.center)
    return build_jsa(design, pulse, sg, ig), build_jsa(design.single_ring(), pulse, sg, ig)


def pytest_terminal_summary(terminalreporter):
    lines = [value for reports in terminalreporter.stats.values() for r in reports
             if getattr(r, "when", None) == "call"
             for key, value in r.user_properties if key == "acceptance"]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s[1:3])):
            terminalreporter.write_line(line)
