import logfire
import pytest


@pytest.fixture(scope="session", autouse=True)
def quiet_tracing():
    logfire.configure(send_to_logfire=False, console=False)
