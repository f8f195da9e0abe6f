"""
Pytest configuration and shared fixtures
"""

from pathlib import Path

import pytest
from click.testing import CliRunner

from fogcell.config import ExperimentConfig
from fogcell.models.bandwidth_allocation import CellCapacity
from fogcell.models.delay_model import DelayParams
from fogcell.models.mmwave_link import LinkParams
from fogcell.simulation import FogCellConfig


# === Pytest Configuration ===
def pytest_configure(config):
    """Configure pytest"""
    config.addinivalue_line("markers", "slow: full-size Monte-Carlo and calibration checks")


# === Model Fixtures ===
@pytest.fixture
def link():
    """Default link budget"""
    return LinkParams()


@pytest.fixture
def perfect_link():
    """No shadowing and a huge margin: every hop within range succeeds"""
    return LinkParams(p_tx_dbm=200.0, sigma_db=0.0)


@pytest.fixture
def delay_params():
    """5 µs slot and relay times"""
    return DelayParams()


@pytest.fixture
def capacity():
    """C = 1000 Mbps, C_ave = 33 Mbps"""
    return CellCapacity.from_throughput(c_total=1000.0, c_ave=33.0)


@pytest.fixture
def default_config():
    """Built-in defaults"""
    return ExperimentConfig()


@pytest.fixture
def short_fogcell():
    """Mobility run long enough for a few gateway handovers"""
    return FogCellConfig(duration_s=120.0, seed=7)


# === File Fixtures ===
@pytest.fixture
def write_config(tmp_path):
    """Write a key=value config file and return its path"""

    def _write(text: str, name: str = "fogcell.cfg") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write


# === CLI Fixtures ===
@pytest.fixture
def runner():
    """Create a CLI runner."""
    return CliRunner()


@pytest.fixture
def split_runner():
    """Create a CLI runner that keeps stderr out of ``result.stdout``."""
    try:
        return CliRunner(mix_stderr=False)
    except TypeError:
        # click >= 8.2 always separates the streams
        return CliRunner()
