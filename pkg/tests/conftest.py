import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rotofrict.constants import NATURAL, NATURAL_MOLECULE, MoleculeParams  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def natural():
    return NATURAL_MOLECULE, NATURAL


@pytest.fixture
def hcl_like():
    """A light polar diatomic in SI units (d ~ 1 D, I ~ 2.6e-47 kg m^2)."""
    return MoleculeParams.from_dipole_inertia(3.6e-30, 2.6e-47)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
