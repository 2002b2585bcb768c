import warnings

import numpy as np
import pytest

import geomspin as gs
from geomspin.hamiltonian import ExchangeRegimeWarning

# the reference operating point sits above the soft regime-warning ratio
pytestmark = pytest.mark.filterwarnings("ignore::geomspin.hamiltonian.ExchangeRegimeWarning")


@pytest.fixture(autouse=True)
def _quiet_regime_warnings():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExchangeRegimeWarning)
        yield


@pytest.fixture(scope="session")
def h0():
    return gs.mhz(2.0)


@pytest.fixture(scope="session")
def paper_cal(h0):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExchangeRegimeWarning)
        return gs.calibrate_cz(h0, 145.15 * h0, np.pi / 25, 1.5 * np.pi)


@pytest.fixture(scope="session")
def cz_schedule(paper_cal):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExchangeRegimeWarning)
        sched, target = gs.synthesize_cz(paper_cal)
    return sched, target


@pytest.fixture(scope="session")
def iswap_plan():
    return gs.synthesize_xy_gate(gs.xy_loop(np.pi / 2), gs.mhz(50.0), 0.0)


@pytest.fixture(scope="session")
def swap_plan():
    return gs.synthesize_xy_gate(gs.xy_loop(np.pi / 2), gs.mhz(50.0), 1.5 * np.pi)
