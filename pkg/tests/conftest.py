import numpy as np
import pytest

from nonlocal_lab.pvquad import QuadratureSpec


@pytest.fixture(scope="session")
def spec():
    """Default quadrature controls; acceptance runs on these unchanged."""
    return QuadratureSpec()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
