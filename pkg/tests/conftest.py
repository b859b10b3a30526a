import os

import numpy as np
import pytest

from garchdiag import GarchParams, InnovationSpec, simulate

WORKERS = min(2, os.cpu_count() or 1)


@pytest.fixture(scope="session")
def table_theta() -> GarchParams:
    """The low-alpha0 coefficient vector used throughout the simulation studies."""
    return GarchParams(0.0002, (0.1,), (0.7,))


@pytest.fixture(scope="session")
def normal_spec() -> InnovationSpec:
    return InnovationSpec.normal()


@pytest.fixture(scope="session")
def medium_path(table_theta, normal_spec):
    """One simulated null path (n = 2000) shared by tests that just need data."""
    return simulate(table_theta, normal_spec, 2000, burn_in=1000, seed=1234)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20260810)
