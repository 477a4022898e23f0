import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bucklesense.fbg import GratingLayout  # noqa: E402
from bucklesense.section import BeamSpec  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def beam():
    return BeamSpec()


@pytest.fixture(scope="session")
def layout(beam):
    return GratingLayout.evenly_spaced(beam.dy_fbg)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def stiff_trial(beam, layout):
    """Noiseless 1 MPa indentation, short travel to keep the suite quick."""
    from bucklesense.trials import Protocol, TissueSpec, simulate_trial

    tissue = TissueSpec(1e6, 0.49, name="stiff")
    return simulate_trial(beam, tissue, layout, Protocol(travel=2.0e-3), seed=11)
