import numpy as np
import pytest

from gearrsim import (
    ModelCatalog,
    PhyConfig,
    PolicyConfig,
    ReliabilityProfile,
    SimConfig,
    default_synthetic_catalog,
)


@pytest.fixture
def table1_phy() -> PhyConfig:
    """Canonical evaluation setup (all defaults)."""
    return PhyConfig()


@pytest.fixture
def unit_noise_phy() -> PhyConfig:
    """Contrived config with sigma_n^2 = 1 W (1 Hz band at 30 dBm/Hz) for
    hand-checkable SINR arithmetic."""
    return PhyConfig(
        bandwidth_hz=1.0,
        noise_psd_dbm_hz=30.0,
        noise_figure_db=0.0,
        n_antennas=1,
        p_tx_g_w=1.0,
        modulation_orders=(4,),
        batch_bits=2.0,
        slot_s=1.0,
    )


@pytest.fixture
def catalog() -> ModelCatalog:
    return default_synthetic_catalog()


@pytest.fixture
def two_knot_profile() -> ReliabilityProfile:
    return ReliabilityProfile(
        model_name="toy", omega_flops=1e9,
        curve=((1e-6, 0.95), (1e-3, 0.60)),
    )


@pytest.fixture
def fast_sim_config() -> SimConfig:
    """Short-horizon run for unit tests."""
    return SimConfig(
        horizon_slots=2000,
        warmup_slots=1000,
        policy=PolicyConfig(v_mbit=5.0),
        seed=7,
    )


def random_channel_draw(rng: np.random.Generator, n: int = 8, scale: float = 1e-4):
    from gearrsim import ChannelDraw

    h_g = scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    h_d = scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    return ChannelDraw(h_g=h_g, h_d=h_d)
