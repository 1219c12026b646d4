import numpy as np
import pytest

import nvlac


@pytest.fixture(scope="session")
def params():
    return nvlac.SpinSystemParams()


@pytest.fixture(scope="session")
def lac(params):
    """Anti-crossing descriptor at the default field, found once per session."""
    return nvlac.find_lac(params, 28.9, 0.0, (35.0, 42.0))


@pytest.fixture(scope="session")
def lac_field(lac):
    return nvlac.FieldSpec(theta=lac.theta_star)


@pytest.fixture(scope="session")
def lac_eig(params, lac_field):
    return nvlac.eigensystem(nvlac.build_hamiltonian(params, lac_field))


@pytest.fixture()
def rng():
    return np.random.default_rng(987654321)
