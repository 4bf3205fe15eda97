import sys
from pathlib import Path

import pytest

import pbergman as pb

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def unit_disk():
    return pb.Domain("disk", 1.0)


@pytest.fixture(scope="session")
def punctured():
    return pb.Domain("punctured_disk", 1.0)


@pytest.fixture(scope="session")
def annulus():
    return pb.Domain("annulus", 1.0, 0.5)


@pytest.fixture(scope="session")
def disk_grid(unit_disk):
    return pb.build_grid(unit_disk, 128, 256)


@pytest.fixture(scope="session")
def kernel_cache():
    # shared across tests so repeated (domain, p, z, degree, grid) solves reuse results
    return {}
