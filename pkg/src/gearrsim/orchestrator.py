"""Per-slot resource orchestration.

The controller splits each slot's decision into two sub-problems:

1. Arrival admission for the data-oriented user: a closed-form valve that
   admits the whole offered batch when the (normalized) buffer is below the
   trade-off weight V and nothing otherwise.
2. A joint search over DO transmit power, proactive batch drop, inference
   model, and modulation order, scoring each candidate with the
   drift-plus-penalty surrogate
       -Q_d * tau * R_d  -  mu_z * Z * Gamma_g  +  mu_y * Y * F
   (Q_d in Mbit, F in TFLOPS) and allocating the minimum compute that meets
   the total-delay deadline. Dropping frees the whole slot from
   goal-oriented interference.

A static baseline (fixed power, fixed model, same admission valve) is also
provided for a-posteriori exhaustive-search comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .phy import MBIT, TFLOPS, ChannelDraw, PhyConfig
from .queueing import QueueState
from .reliability import ModelCatalog

# Guard for log10 of an underflowed BER; matches the reliability module's
# treatment of ber -> 0 (clamps to the first knot after interpolation).
_BER_LOG_FLOOR = 1e-300


def default_power_set(n_levels: int = 11, p_max_w: float = 0.1) -> tuple[float, ...]:
    """Uniform discrete DO transmit power grid over [0, p_max]."""
    return tuple(float(p) for p in np.linspace(0.0, p_max_w, n_levels))


@dataclass(frozen=True)
class PolicyConfig:
    """Controller parameters. v_mbit weighs throughput against queue
    backlog (in the same Mbit units the buffer is normalized to)."""

    v_mbit: float = 100.0
    power_set_w: tuple[float, ...] = default_power_set()
    gamma_th: float = 0.7
    f_th_flops: float = 1.0e12
    f_max_flops: float = 1.0e13
    d_max_s: float = 20e-3

    def __post_init__(self):
        if self.v_mbit < 0:
            raise ValueError("v_mbit must be >= 0")
        if not self.power_set_w:
            raise ValueError("power_set_w must be non-empty")
        if any(p < 0 for p in self.power_set_w):
            raise ValueError("power levels must be >= 0")
        if not 0.0 <= self.gamma_th <= 1.0:
            raise ValueError("gamma_th must lie in [0, 1]")
        if self.f_th_flops < 0:
            raise ValueError("f_th_flops must be >= 0")
        if self.f_max_flops <= 0:
            raise ValueError("f_max_flops must be positive")
        if self.d_max_s <= 0:
            raise ValueError("d_max_s must be positive")


@dataclass(frozen=True)
class SlotDecision:
    """Outcome of one slot's orchestration. model_index and m_order are
    None on dropped slots (gamma = 0), where no compute is allocated."""

    a_d_bits: float
    p_tx_d_w: float
    gamma: int
    model_index: int | None
    f_flops: float
    m_order: int | None
    objective_value: float


def admit_arrivals(q_d_normalized: float, v: float, a_max_t: float) -> float:
    """Closed-form admission: the full offered batch iff Q_d <= V, else 0.

    q_d_normalized and v must share units (Mbit here); a_max_t is returned
    unchanged when admitting (bits in, bits out).
    """
    return a_max_t if q_d_normalized <= v else 0.0


def min_feasible_F(
    omega_flops: float, d_tx_s: float, d_max_s: float, f_max_flops: float
) -> float | None:
    """Smallest compute allocation meeting the deadline, or None.

    F* = omega / (D_max - d_tx); infeasible (None) when no compute time
    remains or when F* exceeds the server's capability.
    """
    if d_tx_s >= d_max_s:
        return None
    f_star = omega_flops / (d_max_s - d_tx_s)
    if f_star > f_max_flops:
        return None
    return f_star


def slot_objective(
    q_d: float,
    z: float,
    y: float,
    r_d: float,
    gamma_g: float,
    f: float,
    tau: float,
    mu_z: float,
    mu_y: float,
) -> float:
    """Drift-plus-penalty score of one candidate (lower is better).

    Units: q_d in Mbit, r_d in bit/s, f in FLOPS; the served-bits and
    compute terms are normalized to Mbit and TFLOPS internally so the three
    terms are commensurate.
    """
    return -q_d * (tau * r_d / MBIT) - mu_z * z * gamma_g + mu_y * y * (f / TFLOPS)


def ber_vector(sinr, m: int):
    """Clamped M-QAM BER over an SINR array (same arithmetic as
    phy.ber_mqam, without the validation overhead of the hot path)."""
    coef = (4.0 / math.log2(m)) * (1.0 - 1.0 / math.sqrt(m))
    pb = coef * (0.5 * erfc(np.sqrt(3.0 * sinr / (m - 1.0)) / math.sqrt(2.0)))
    return np.clip(pb, 0.0, 0.5)


class _CandidateTables:
    """Per-(catalog, config) precomputation shared by slot decisions."""

    def __init__(self, cfg: PhyConfig, pol: PolicyConfig, catalog: ModelCatalog):
        self.cfg = cfg
        self.pol = pol
        self.catalog = catalog
        self.powers = np.asarray(pol.power_set_w, dtype=float)
        self.noise = cfg.noise_power_w
        self.omegas = [p.omega_flops for p in catalog.profiles]
        self.log_bers = [p.log_bers for p in catalog.profiles]
        self.accs = [p.accuracies for p in catalog.profiles]
        # Modulation orders whose upload fits in the slot, each with the
        # models that can still meet the deadline and their minimal compute.
        self.tx_groups: list[tuple[int, float, list[tuple[int, float]]]] = []
        for m in cfg.modulation_orders:
            d_tx = cfg.tx_time_s(m)
            if d_tx > cfg.slot_s:
                continue
            feasible = []
            for l_idx, omega in enumerate(self.omegas):
                f_star = min_feasible_F(omega, d_tx, pol.d_max_s, pol.f_max_flops)
                if f_star is not None:
                    feasible.append((l_idx, f_star))
            if feasible:
                self.tx_groups.append((m, d_tx, feasible))


class DynamicPolicy:
    """Drift-plus-penalty controller: admission valve plus exhaustive search
    over (power, drop, model, modulation) with minimal-deadline compute."""

    def __init__(self, cfg: PhyConfig, pol: PolicyConfig, catalog: ModelCatalog):
        self._t = _CandidateTables(cfg, pol, catalog)

    @property
    def tables(self) -> _CandidateTables:
        return self._t

    def decide(self, draw: ChannelDraw, state: QueueState, a_max_t: float) -> SlotDecision:
        t = self._t
        cfg, pol = t.cfg, t.pol
        tau = cfg.slot_s
        q_mbit = state.Q_d / MBIT
        a_d = admit_arrivals(q_mbit, pol.v_mbit, a_max_t)

        noise = t.noise
        hg2 = float(np.vdot(draw.h_g, draw.h_g).real)
        hd2 = float(np.vdot(draw.h_d, draw.h_d).real)
        cross2 = float(abs(np.vdot(draw.h_g, draw.h_d)) ** 2)
        p = t.powers
        sinr_g = hg2 * cfg.p_tx_g_w / (cross2 / hg2 * p + noise)
        sinr_d = hd2 * p / (cross2 / hd2 * cfg.p_tx_g_w + noise)
        snr_d = hd2 * p / noise
        w = cfg.bandwidth_hz
        rate_interfered = w * np.log2(1.0 + sinr_d)
        rate_clear = w * np.log2(1.0 + snr_d)

        z, y = state.Z, state.Y
        mu_z, mu_y = state.mu_z, state.mu_y

        # Candidates as (objective, p, omega-or-inf, m-or-0, rank, payload);
        # min() over the leading fields realizes the documented tie-breaking:
        # lower power, then transmit over drop / lower workload, then lower
        # modulation order. rank keeps the comparison away from payloads.
        candidates: list[tuple] = []

        # Drop candidates: the DO user gets the whole slot interference-free.
        obj_drop = -q_mbit * (tau * rate_clear / MBIT)
        for i, p_i in enumerate(t.powers):
            candidates.append((float(obj_drop[i]), float(p_i), math.inf, 0, -1, None))

        # Transmit candidates per feasible (modulation, model) pair.
        for m, d_tx, feasible in t.tx_groups:
            ber = ber_vector(sinr_g, m)
            log_ber = np.log10(np.maximum(ber, _BER_LOG_FLOOR))
            r_d = (d_tx / tau) * rate_interfered + ((tau - d_tx) / tau) * rate_clear
            rate_term = -q_mbit * (tau * r_d / MBIT)
            for l_idx, f_star in feasible:
                gamma_g = np.interp(log_ber, t.log_bers[l_idx], t.accs[l_idx])
                obj = rate_term - mu_z * z * gamma_g + mu_y * y * (f_star / TFLOPS)
                for i, p_i in enumerate(t.powers):
                    candidates.append(
                        (float(obj[i]), float(p_i), t.omegas[l_idx], m, l_idx,
                         (l_idx, f_star))
                    )

        best = min(candidates)
        obj_star, p_star, _, m_star, _, payload = best
        if payload is None:
            return SlotDecision(
                a_d_bits=a_d, p_tx_d_w=p_star, gamma=0, model_index=None,
                f_flops=0.0, m_order=None, objective_value=obj_star,
            )
        l_idx, f_star = payload
        return SlotDecision(
            a_d_bits=a_d, p_tx_d_w=p_star, gamma=1, model_index=l_idx,
            f_flops=f_star, m_order=m_star, objective_value=obj_star,
        )


def decide_slot(
    draw: ChannelDraw,
    state: QueueState,
    catalog: ModelCatalog,
    cfg: PhyConfig,
    pol: PolicyConfig,
    a_max_t: float,
) -> SlotDecision:
    """One-shot form of DynamicPolicy.decide (builds the candidate tables
    each call; use DynamicPolicy directly inside simulation loops)."""
    return DynamicPolicy(cfg, pol, catalog).decide(draw, state, a_max_t)


class StaticPolicy:
    """Fixed transmit power and inference model; drops only when the
    deadline cannot be met; same admission valve as the dynamic policy.

    objective_value in its decisions is NaN: the baseline performs no
    search, so there is no score to report.
    """

    def __init__(
        self,
        cfg: PhyConfig,
        pol: PolicyConfig,
        catalog: ModelCatalog,
        p_fixed_w: float,
        model_index: int,
    ):
        if p_fixed_w not in pol.power_set_w:
            raise ValueError(f"p_fixed_w {p_fixed_w} not in the configured power set")
        if not 0 <= model_index < len(catalog):
            raise ValueError(f"model_index {model_index} out of range")
        self.cfg = cfg
        self.pol = pol
        self.catalog = catalog
        self.p_fixed_w = p_fixed_w
        self.model_index = model_index
        # Largest configured order: shortest upload, widest feasibility.
        self.m_order = max(cfg.modulation_orders)
        self.d_tx = cfg.tx_time_s(self.m_order)
        f_star = min_feasible_F(
            catalog[model_index].omega_flops, self.d_tx, pol.d_max_s, pol.f_max_flops
        )
        if self.d_tx > cfg.slot_s:
            f_star = None
        self.f_star = f_star

    def decide(self, draw: ChannelDraw, state: QueueState, a_max_t: float) -> SlotDecision:
        q_mbit = state.Q_d / MBIT
        a_d = admit_arrivals(q_mbit, self.pol.v_mbit, a_max_t)
        if self.f_star is None:
            return SlotDecision(
                a_d_bits=a_d, p_tx_d_w=self.p_fixed_w, gamma=0, model_index=None,
                f_flops=0.0, m_order=None, objective_value=math.nan,
            )
        return SlotDecision(
            a_d_bits=a_d, p_tx_d_w=self.p_fixed_w, gamma=1,
            model_index=self.model_index, f_flops=self.f_star,
            m_order=self.m_order, objective_value=math.nan,
        )


def static_policy(
    p_fixed_w: float,
    l_fixed: int,
    catalog: ModelCatalog,
    cfg: PhyConfig,
    pol: PolicyConfig,
) -> StaticPolicy:
    """Per-slot decision rule with fixed power and model (baseline)."""
    return StaticPolicy(cfg, pol, catalog, p_fixed_w, l_fixed)
