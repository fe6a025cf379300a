from pathlib import Path

import pytest

from morphoarms.config import default_config
from morphoarms.kinematics import LimbGeometry
from morphoarms.scenario import Scenario

REPO_ROOT = Path(__file__).resolve().parents[1]
FIXTURES = REPO_ROOT / "fixtures"
DATA = Path(__file__).resolve().parent / "data"


@pytest.fixture(scope="session")
def config():
    return default_config()


@pytest.fixture(scope="session")
def geom():
    """Bare limb used by the worked examples: no offset, no mount yaw."""
    return LimbGeometry(upper_arm_length=0.22, forearm_length=0.28)


@pytest.fixture(scope="session")
def scenario():
    return Scenario()


@pytest.fixture(scope="session")
def reference_script_path():
    return FIXTURES / "reference_script.json"


@pytest.fixture(scope="session")
def scenario_path():
    return FIXTURES / "default_scenario.json"
