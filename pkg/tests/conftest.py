import pytest

import run_history
from params import InitialState, evolution_point

SMALL_ALPHA = 2.0
SMALL_TAU = 0.7


@pytest.fixture
def small_point():
    """EvolutionPoint at the oracle comparison time, zeta left for the routes to fill."""
    return evolution_point(SMALL_TAU)


@pytest.fixture
def small_state():
    return InitialState(alpha=complex(SMALL_ALPHA))


@pytest.fixture(autouse=True)
def isolated_history(monkeypatch):
    """No test writes to a ledger unless it asks for one."""
    monkeypatch.delenv("CAVPHASE_HISTORY_DB", raising=False)
    monkeypatch.delenv("CAVPHASE_WORKERS", raising=False)
    monkeypatch.delenv("CAVPHASE_LOG_LEVEL", raising=False)
    run_history._managers.clear()
    yield
    run_history._managers.clear()
