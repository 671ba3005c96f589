"""Link-level physics for one slot of the shared uplink.

Two single-antenna users (a goal-oriented uploader "g" and a data-oriented
uploader "d") transmit to the same N-antenna access point on the same band.
This module generates per-slot Rician channel vectors, applies Maximum Ratio
Combining, and derives SINR/SNR, uncoded M-QAM bit error rate, the two users'
rates, and the transmission/computation delays. Everything is pure given its
inputs; randomness enters only through an explicit numpy Generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

SPEED_OF_LIGHT = 299792458.0

# Unit scales used by the normalized control objective.
MBIT = 1.0e6
TFLOPS = 1.0e12


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) * 1e-3


def qfunc(x):
    """Standard Gaussian tail probability Q(x), via the complementary
    error function (relative accuracy well below 1e-12, no tables)."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


def is_qam_order(m: int) -> bool:
    """True for square QAM constellations M = 4^k, k >= 1."""
    if not isinstance(m, (int, np.integer)) or m < 4:
        return False
    k = round(math.log(m, 4))
    return 4**k == m


def free_space_gain_at_1m(carrier_freq_hz: float) -> float:
    """Friis power gain at 1 m reference distance, (c / (4 pi f_c))^2."""
    return (SPEED_OF_LIGHT / (4.0 * math.pi * carrier_freq_hz)) ** 2


@dataclass(frozen=True)
class PhyConfig:
    """Static link-level parameters.

    Defaults correspond to the canonical evaluation setup: 3.5 GHz carrier,
    10 MHz bandwidth, 8-antenna AP with MRC, Rician K=4 fading with path
    loss exponent 3.5, 256-QAM for the uploader, 20 ms slots.
    """

    carrier_freq_hz: float = 3.5e9
    bandwidth_hz: float = 10.0e6
    noise_psd_dbm_hz: float = -174.0
    noise_figure_db: float = 10.0
    n_antennas: int = 8
    rician_k: float = 4.0
    pathloss_exponent: float = 3.5
    # Linear power gain at 1 m; None selects free-space gain at the carrier.
    pathloss_ref_gain: float | None = None
    do_position_m: tuple[float, float] = (-15.0, 0.0)
    go_position_m: tuple[float, float] = (0.0, 0.0)
    ap_position_m: tuple[float, float] = (0.0, 20.0)
    p_tx_g_w: float = 0.1
    modulation_orders: tuple[int, ...] = (256,)
    # Bits encoding one inference batch (224x224x3 bytes by default).
    batch_bits: float = 1_204_224.0
    slot_s: float = 20e-3

    def __post_init__(self):
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth_hz must be positive")
        if self.n_antennas < 1:
            raise ValueError("n_antennas must be >= 1")
        if self.rician_k < 0:
            raise ValueError("rician_k must be >= 0")
        if self.batch_bits <= 0:
            raise ValueError("batch_bits must be positive")
        if self.slot_s <= 0:
            raise ValueError("slot_s must be positive")
        if self.p_tx_g_w < 0:
            raise ValueError("p_tx_g_w must be >= 0")
        if not self.modulation_orders:
            raise ValueError("modulation_orders must be non-empty")
        for m in self.modulation_orders:
            if not is_qam_order(m):
                raise ValueError(
                    f"modulation order {m} is not a square QAM order (4^k, k>=1)"
                )
        if self.ref_gain <= 0:
            raise ValueError("pathloss_ref_gain must be positive")
        for name, d in (("go", self.distance_go_m), ("do", self.distance_do_m)):
            if d <= 0:
                raise ValueError(f"{name} user is colocated with the AP (zero distance)")
        if self.noise_power_w <= 0:
            raise ValueError("derived noise power must be positive")

    @property
    def ref_gain(self) -> float:
        if self.pathloss_ref_gain is not None:
            return self.pathloss_ref_gain
        return free_space_gain_at_1m(self.carrier_freq_hz)

    @property
    def noise_power_w(self) -> float:
        """sigma_n^2 = (noise PSD + noise figure) integrated over the band."""
        return dbm_to_watts(self.noise_psd_dbm_hz + self.noise_figure_db) * self.bandwidth_hz

    @property
    def distance_go_m(self) -> float:
        return math.dist(self.go_position_m, self.ap_position_m)

    @property
    def distance_do_m(self) -> float:
        return math.dist(self.do_position_m, self.ap_position_m)

    def pathloss_gain(self, distance_m: float) -> float:
        """Linear average channel power gain at the given distance."""
        return self.ref_gain * distance_m ** (-self.pathloss_exponent)

    def tx_time_s(self, m: int) -> float:
        """Upload time of one batch at modulation order m: N_b / (W log2 M)."""
        return self.batch_bits / (self.bandwidth_hz * math.log2(m))


@dataclass(frozen=True)
class ChannelDraw:
    """One slot's complex channel vectors (amplitude gain, AP-side)."""

    h_g: np.ndarray
    h_d: np.ndarray
    slot_index: int = 0

    def __post_init__(self):
        for name, h in (("h_g", self.h_g), ("h_d", self.h_d)):
            if h.ndim != 1 or h.size == 0:
                raise ValueError(f"{name} must be a non-empty 1-D vector")
            if not np.all(np.isfinite(h.view(float))):
                raise ValueError(f"{name} has non-finite entries")
        if self.h_g.shape != self.h_d.shape:
            raise ValueError("channel vectors must have the same length")


@dataclass(frozen=True)
class LinkMetrics:
    """Post-combining link quality for one slot and one (p_tx_d, M) choice."""

    sinr_g: float
    sinr_d: float
    snr_d: float
    ber_Pb: float
    rate_g: float   # bit/s of the goal-oriented uplink
    d_tx: float     # seconds to upload one batch


def draw_channel(cfg: PhyConfig, rng: np.random.Generator, slot_index: int = 0) -> ChannelDraw:
    """Draw block-fading Rician channel vectors for both users.

    h_u = sqrt(g_u) * ( sqrt(K/(K+1)) * a + sqrt(1/(K+1)) * z ) with a the
    all-ones unit-modulus LOS vector and z i.i.d. CN(0, 1). Draws are
    independent across slots and users; E||h_u||^2 = N * g_u.
    """
    n = cfg.n_antennas
    k = cfg.rician_k
    los = math.sqrt(k / (k + 1.0))
    scatter = math.sqrt(1.0 / (k + 1.0)) / math.sqrt(2.0)
    vectors = []
    for dist in (cfg.distance_go_m, cfg.distance_do_m):
        amp = math.sqrt(cfg.pathloss_gain(dist))
        z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        vectors.append(amp * (los + scatter * z))
    return ChannelDraw(h_g=vectors[0], h_d=vectors[1], slot_index=slot_index)


def ber_mqam(sinr, m: int):
    """Uncoded square M-QAM bit error probability at the given linear SINR.

    P_b = (4/log2 M)(1 - 1/sqrt(M)) Q(sqrt(3 SINR/(M-1))), clamped to
    [0, 1/2]. Accepts scalars or arrays; scalar in, scalar out.
    """
    if not is_qam_order(m):
        raise ValueError(f"modulation order {m} is not a square QAM order (4^k)")
    sinr = np.asarray(sinr, dtype=float)
    if np.any(sinr < 0):
        raise ValueError("sinr must be >= 0")
    coef = (4.0 / math.log2(m)) * (1.0 - 1.0 / math.sqrt(m))
    pb = coef * qfunc(np.sqrt(3.0 * sinr / (m - 1.0)))
    pb = np.clip(pb, 0.0, 0.5)
    return float(pb) if pb.ndim == 0 else pb


def compute_link_metrics(
    draw: ChannelDraw, p_tx_d: float, m: int, cfg: PhyConfig
) -> LinkMetrics:
    """SINRs under MRC, plus BER and upload timing for modulation order m.

    With combiner w_u = h_u/||h_u||, the cross term |w_u^H h_v|^2 equals
    |h_u^H h_v|^2 / ||h_u||^2. SNR_d drops the interference term (used for
    the portion of the slot where the goal-oriented user is silent).
    """
    if p_tx_d < 0:
        raise ValueError("p_tx_d must be >= 0")
    if m not in cfg.modulation_orders:
        raise ValueError(f"modulation order {m} not in configured set")
    noise = cfg.noise_power_w
    hg2 = float(np.vdot(draw.h_g, draw.h_g).real)
    hd2 = float(np.vdot(draw.h_d, draw.h_d).real)
    cross2 = float(abs(np.vdot(draw.h_g, draw.h_d)) ** 2)
    sinr_g = hg2 * cfg.p_tx_g_w / (cross2 / hg2 * p_tx_d + noise)
    sinr_d = hd2 * p_tx_d / (cross2 / hd2 * cfg.p_tx_g_w + noise)
    snr_d = hd2 * p_tx_d / noise
    rate_g = cfg.bandwidth_hz * math.log2(m)
    return LinkMetrics(
        sinr_g=sinr_g,
        sinr_d=sinr_d,
        snr_d=snr_d,
        ber_Pb=ber_mqam(sinr_g, m),
        rate_g=rate_g,
        d_tx=cfg.batch_bits / rate_g,
    )


def rate_do(metrics: LinkMetrics, d_tx_effective: float, cfg: PhyConfig) -> float:
    """Average data-oriented rate over one slot (bit/s).

    The uploader interferes for d_tx_effective seconds (0 when its batch is
    dropped); the rest of the slot is interference-free:
    R_d = (d/tau) * W log2(1+SINR_d) + ((tau-d)/tau) * W log2(1+SNR_d),
    written as time fractions so the d = 0 and d = tau endpoints are exact.
    """
    tau = cfg.slot_s
    if d_tx_effective < 0 or d_tx_effective > tau:
        raise ValueError("d_tx_effective must lie in [0, slot_s]")
    w = cfg.bandwidth_hz
    return (d_tx_effective / tau) * (w * math.log2(1.0 + metrics.sinr_d)) + (
        (tau - d_tx_effective) / tau
    ) * (w * math.log2(1.0 + metrics.snr_d))


def compute_delay(omega_flops: float, f_flops: float) -> float:
    """Inference time omega/F in seconds; F = 0 means no compute was
    allocated and the delay is unbounded (returned as inf)."""
    if omega_flops <= 0:
        raise ValueError("omega_flops must be positive")
    if f_flops < 0:
        raise ValueError("f_flops must be >= 0")
    if f_flops == 0.0:
        return math.inf
    return omega_flops / f_flops
