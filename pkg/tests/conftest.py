import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from koszulkit.ell2 import make_catalog_operator
from koszulkit.randgen import get_rng


@pytest.fixture
def rng():
    return get_rng()


@pytest.fixture
def backward_shift():
    return make_catalog_operator("adjoint_shift")


@pytest.fixture
def forward_shift():
    return make_catalog_operator("shift")
