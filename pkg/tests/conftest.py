"""Shared fixtures.

The solver runs that several test modules lean on (full store/retrieve
protocols at millisecond dark times) cost seconds each, so they are built
once per session here.  Everything downstream treats the returned objects
as read-only.
"""
import pytest

from storedlight.config import config_from_dict, paper_config
from storedlight.protocols import (run_comoving, run_store_retrieve,
                                   run_transport_inside,
                                   run_transport_interface, sweep)


@pytest.fixture(scope="session")
def cfg():
    return paper_config()


@pytest.fixture(scope="session")
def deep_cfg():
    """Cloud parked 10 mm inside the bore: mode scaling is exactly 1
    everywhere it matters and the effective OD equals od_fiber."""
    return config_from_dict({"cloud": {"center_mm": 10.0}})


@pytest.fixture(scope="session")
def store5(cfg):
    """Calibrated store/retrieve at the default 5 us storage time."""
    return run_store_retrieve(cfg)


@pytest.fixture(scope="session")
def storage_sweep(cfg):
    """Efficiency-vs-storage-time curve used for the lifetime fit."""
    return sweep(cfg, "storage_time", [5.0, 100.0, 400.0, 1000.0],
                 protocol="store_retrieve")


@pytest.fixture(scope="session")
def transport3(cfg):
    """3 ms in-fiber transport run."""
    return run_transport_inside(cfg, 3000.0)


@pytest.fixture(scope="session")
def stationary_matched(cfg, transport3):
    """Stationary run whose dark interval matches the 3 ms transport."""
    return run_store_retrieve(
        cfg, storage_time=transport3.metadata["storage_time_us"])


@pytest.fixture(scope="session")
def interface_pair(cfg):
    """(inward 1.5 mm crossing, all-inside transport at the same duration)."""
    inward = run_transport_interface(cfg, "inward", [1.5])[0]
    allin = run_transport_inside(cfg, inward.metadata["transport_time_us"])
    return inward, allin


@pytest.fixture(scope="session")
def comoving_paper(cfg):
    """Co-moving run at the rated belt speed, 2.54 ms, 2.6 ms lifetime."""
    return run_comoving(cfg, storage_time=2540.0, tau_storage=2600.0)
