"""
Shared fixtures for the unit tests.
"""

import logfire
import pytest

from beamscint.src.physics.params import derive_params

from .channels import fig1_params, fig2_params


@pytest.fixture(scope="session", autouse=True)
def quiet_tracing():
    logfire.configure(send_to_logfire=False, console=False)


@pytest.fixture
def fig1():
    p = fig1_params()
    return p, derive_params(p)


@pytest.fixture
def fig2():
    p = fig2_params()
    return p, derive_params(p)
