"""Slot-loop simulation engine and sweep harnesses.

One run wires the pieces together, slot by slot: draw the offered traffic
and the channel, let the policy decide (admission, DO power, drop, model,
compute), realize the resulting rates/BER/goal achievement, update the
physical and virtual queues, and record a trace row. Sweeps repeat runs
over constraint grids to trace goal-effective rate regions and
delay-vs-rate trade-off curves.

Runs are deterministic given their seed: identical configs produce
bit-identical traces.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .orchestrator import (
    DynamicPolicy,
    PolicyConfig,
    StaticPolicy,
    min_feasible_F,
)
from .phy import (
    TFLOPS,
    PhyConfig,
    compute_link_metrics,
    draw_channel,
    rate_do,
)
from .queueing import (
    QueueState,
    RunningAverages,
    fit_slope,
    queueing_delay,
    update_buffer,
    update_virtual_Y,
    update_virtual_Z,
)
from .reliability import (
    ModelCatalog,
    accuracy_at,
    load_catalog,
    synthetic_catalog,
)

# type alias: a catalog, a profile-file path, or synthetic spec rows
CatalogSource = ModelCatalog | str | list


@dataclass(frozen=True)
class SimConfig:
    phy: PhyConfig = field(default_factory=PhyConfig)
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    catalog_source: CatalogSource | None = None
    horizon_slots: int = 20000
    warmup_slots: int = 10000
    arrival_lambda_bits: float = 5.0e6
    seed: int = 1
    mu_z: float = 1.0
    mu_y: float = 1.0
    window_slots: int = 1000
    bernoulli_goal_sampling: bool = False
    # Q_d slope (bits/slot over the last half) above which a run is flagged
    # unstable; None picks 1% of the arrival rate.
    stability_slope_threshold: float | None = None

    def __post_init__(self):
        if self.warmup_slots < 0 or self.horizon_slots <= self.warmup_slots:
            raise ValueError("need horizon_slots > warmup_slots >= 0")
        if self.arrival_lambda_bits < 0:
            raise ValueError("arrival_lambda_bits must be >= 0")
        if self.window_slots < 1:
            raise ValueError("window_slots must be >= 1")
        if self.mu_z <= 0 or self.mu_y <= 0:
            raise ValueError("mu_z and mu_y must be positive")

    @property
    def slope_threshold(self) -> float:
        if self.stability_slope_threshold is not None:
            return self.stability_slope_threshold
        return 0.01 * max(self.arrival_lambda_bits, 1.0)


def resolve_catalog(source: CatalogSource | None) -> ModelCatalog:
    from .reliability import default_synthetic_catalog

    if source is None:
        return default_synthetic_catalog()
    if isinstance(source, ModelCatalog):
        return source
    if isinstance(source, str):
        return load_catalog(source)
    return synthetic_catalog([tuple(row) for row in source])


@dataclass(frozen=True)
class TraceRecord:
    """One slot of simulation state (values at the start of the slot,
    decisions and realized rates during it)."""

    slot: int
    a_d_bits: float
    q_d_bits: float
    p_tx_d_w: float
    gamma: int
    model: str
    f_flops: float
    r_d_bit_s: float
    p_b: float
    gamma_g: float
    z: float
    y: float


TRACE_COLUMNS = [
    "slot", "a_d_bits", "q_d_bits", "p_tx_d_w", "gamma", "model",
    "f_flops", "r_d_bit_s", "p_b", "gamma_g", "z", "y",
]


@dataclass
class RunSummary:
    """Horizon-averaged aggregates (slots >= warmup) plus moving-window
    evolution traces over the whole horizon."""

    avg_a_d_bits: float
    avg_gamma_g: float
    avg_f_flops: float
    avg_q_d_bits: float
    avg_r_d_bit_s: float
    avg_delay_q_s: float | None
    drop_rate: float
    final_z: float
    final_y: float
    z_over_t: float
    y_over_t: float
    q_slope_bits_per_slot: float
    stable: bool
    horizon_slots: int
    warmup_slots: int
    seed: int
    moving_gamma_g: list[float]
    moving_f_flops: list[float]
    moving_q_d_bits: list[float]


def run(cfg: SimConfig, policy=None) -> tuple[RunSummary, list[TraceRecord]]:
    """Simulate one run; returns the summary and the per-slot trace.

    Per slot, in order: draw the offered batch A_max ~ Poisson(lambda), draw
    the channel, decide, realize rates and goal achievement, record the
    trace row, then update Q_d and the virtual queues. The provided policy
    (or a DynamicPolicy built from the config) must expose
    decide(draw, state, a_max).
    """
    catalog = resolve_catalog(cfg.catalog_source)
    if policy is None:
        policy = DynamicPolicy(cfg.phy, cfg.policy, catalog)
    rng = np.random.default_rng(cfg.seed)
    state = QueueState(mu_z=cfg.mu_z, mu_y=cfg.mu_y)
    avgs = RunningAverages(window=cfg.window_slots, warmup=cfg.warmup_slots)
    tau = cfg.phy.slot_s
    f_th_t = cfg.policy.f_th_flops / TFLOPS
    m_ref = max(cfg.phy.modulation_orders)
    trace: list[TraceRecord] = []

    for t in range(cfg.horizon_slots):
        a_max = float(rng.poisson(cfg.arrival_lambda_bits))
        draw = draw_channel(cfg.phy, rng, slot_index=t)
        dec = policy.decide(draw, state, a_max)

        if dec.gamma:
            metrics = compute_link_metrics(draw, dec.p_tx_d_w, dec.m_order, cfg.phy)
            r_d = rate_do(metrics, metrics.d_tx, cfg.phy)
            p_b = metrics.ber_Pb
            gamma_exp = accuracy_at(catalog[dec.model_index], p_b)
            if cfg.bernoulli_goal_sampling:
                gamma_g = 1.0 if rng.random() < gamma_exp else 0.0
            else:
                gamma_g = gamma_exp
            model_name = catalog[dec.model_index].model_name
        else:
            metrics = compute_link_metrics(draw, dec.p_tx_d_w, m_ref, cfg.phy)
            r_d = rate_do(metrics, 0.0, cfg.phy)
            p_b = math.nan
            gamma_g = 0.0
            model_name = ""

        trace.append(TraceRecord(
            slot=t, a_d_bits=dec.a_d_bits, q_d_bits=state.Q_d,
            p_tx_d_w=dec.p_tx_d_w, gamma=dec.gamma, model=model_name,
            f_flops=dec.f_flops, r_d_bit_s=r_d, p_b=p_b, gamma_g=gamma_g,
            z=state.Z, y=state.Y,
        ))
        avgs.add(
            t, a_d=dec.a_d_bits, q_d=state.Q_d, gamma_g=gamma_g,
            f=dec.f_flops, r_d=r_d, drop=float(dec.gamma == 0),
        )

        state.Q_d = update_buffer(state.Q_d, r_d, dec.a_d_bits, tau)
        state.Z = update_virtual_Z(state.Z, gamma_g, cfg.policy.gamma_th, cfg.mu_z)
        state.Y = update_virtual_Y(state.Y, dec.f_flops / TFLOPS, f_th_t, cfg.mu_y)

    avg_a = avgs.mean("a_d")
    avg_q = avgs.mean("q_d")
    delay = queueing_delay(avg_q, avg_a, tau) if avg_a > 0 else None
    q_series = avgs.series("q_d")
    q_slope = fit_slope(q_series[cfg.horizon_slots // 2:])
    summary = RunSummary(
        avg_a_d_bits=avg_a,
        avg_gamma_g=avgs.mean("gamma_g"),
        avg_f_flops=avgs.mean("f"),
        avg_q_d_bits=avg_q,
        avg_r_d_bit_s=avgs.mean("r_d"),
        avg_delay_q_s=delay,
        drop_rate=avgs.mean("drop"),
        final_z=state.Z,
        final_y=state.Y,
        z_over_t=state.Z / cfg.horizon_slots,
        y_over_t=state.Y / cfg.horizon_slots,
        q_slope_bits_per_slot=q_slope,
        stable=q_slope <= cfg.slope_threshold,  # only growth is instability
        horizon_slots=cfg.horizon_slots,
        warmup_slots=cfg.warmup_slots,
        seed=cfg.seed,
        moving_gamma_g=avgs.moving_mean("gamma_g").tolist(),
        moving_f_flops=avgs.moving_mean("f").tolist(),
        moving_q_d_bits=avgs.moving_mean("q_d").tolist(),
    )
    return summary, trace


def max_feasible_effectiveness(
    catalog: ModelCatalog, cfg: PhyConfig, pol: PolicyConfig
) -> float:
    """Upper bound on the achievable long-run goal-effectiveness under the
    average compute budget: the best fractional time-sharing of models at
    their clean accuracy and minimal deadline-meeting compute. Used to tell
    infeasible goal-effectiveness targets apart from controller failures."""
    d_tx = min(cfg.tx_time_s(m) for m in cfg.modulation_orders)
    options = []
    for profile in catalog.profiles:
        f_star = min_feasible_F(profile.omega_flops, d_tx, pol.d_max_s, pol.f_max_flops)
        if f_star is not None and d_tx <= cfg.slot_s:
            options.append((accuracy_at(profile, 0.0), f_star))
    if not options:
        return 0.0
    f_th = pol.f_th_flops
    best = 0.0
    for acc, f in options:
        frac = min(1.0, f_th / f) if f > 0 else 1.0
        best = max(best, frac * acc)
    for a1, f1 in options:
        for a2, f2 in options:
            if f1 == f2:
                continue
            # Both constraints tight: x1 + x2 = 1, x1 f1 + x2 f2 = f_th.
            x1 = (f_th - f2) / (f1 - f2)
            if 0.0 <= x1 <= 1.0:
                best = max(best, x1 * a1 + (1.0 - x1) * a2)
    return best


# ---------------------------------------------------------------------------
# Sweep harnesses


def _static_scan_worker(args) -> dict:
    base, p, l_idx, seed = args
    cfg = replace(base, seed=seed)
    catalog = resolve_catalog(cfg.catalog_source)
    policy = StaticPolicy(cfg.phy, cfg.policy, catalog, p, l_idx)
    summary, _ = run(cfg, policy=policy)
    return {
        "p": p, "l": l_idx, "seed": seed,
        "avg_a": summary.avg_a_d_bits, "avg_gamma": summary.avg_gamma_g,
        "avg_f": summary.avg_f_flops, "stable": summary.stable,
    }


def _dynamic_worker(args) -> dict:
    base, gamma_th, f_th, v, seed = args
    pol = replace(base.policy, gamma_th=gamma_th, f_th_flops=f_th, v_mbit=v)
    cfg = replace(base, policy=pol, seed=seed)
    summary, _ = run(cfg)
    return {
        "gamma_th": gamma_th, "f_th": f_th, "v": v, "seed": seed,
        "avg_a": summary.avg_a_d_bits, "avg_gamma": summary.avg_gamma_g,
        "avg_f": summary.avg_f_flops,
        "delay": summary.avg_delay_q_s if summary.avg_delay_q_s is not None else math.nan,
        "stable": summary.stable, "z_over_t": summary.z_over_t,
        "y_over_t": summary.y_over_t,
    }


def _run_jobs(worker, jobs_args, jobs: int) -> list[dict]:
    if jobs <= 1:
        return [worker(a) for a in jobs_args]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, jobs_args))


def _mean_stderr(values: list[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    mean = float(np.mean(arr))
    stderr = float(np.std(arr, ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
    return mean, stderr


def static_scan(
    base: SimConfig, seeds: list[int] | None = None, jobs: int = 1
) -> list[dict]:
    """Run the static baseline over the full power-set x catalog grid,
    averaged across seeds. Returns one row per (p, model)."""
    seeds = list(seeds) if seeds else [base.seed]
    catalog = resolve_catalog(base.catalog_source)
    jobs_args = [
        (base, p, l, s)
        for p in base.policy.power_set_w
        for l in range(len(catalog))
        for s in seeds
    ]
    results = _run_jobs(_static_scan_worker, jobs_args, jobs)
    rows = []
    for p in base.policy.power_set_w:
        for l in range(len(catalog)):
            cell = [r for r in results if r["p"] == p and r["l"] == l]
            cell.sort(key=lambda r: r["seed"])
            a_mean, a_se = _mean_stderr([r["avg_a"] for r in cell])
            g_mean, _ = _mean_stderr([r["avg_gamma"] for r in cell])
            f_mean, _ = _mean_stderr([r["avg_f"] for r in cell])
            rows.append({
                "p_tx_d_w": p, "model": catalog[l].model_name, "model_index": l,
                "avg_a_d_bits": a_mean, "stderr_a_d_bits": a_se,
                "avg_gamma_g": g_mean, "avg_f_flops": f_mean,
                "stable_runs": sum(r["stable"] for r in cell), "n_seeds": len(cell),
            })
    return rows


def best_static_point(scan_rows: list[dict], gamma_th: float) -> dict | None:
    """A-posteriori selection: among (p, model) cells meeting the
    goal-effectiveness target, the one with the highest sustained arrivals
    (ties: lower power, then lower workload i.e. model index)."""
    feasible = [r for r in scan_rows if r["avg_gamma_g"] >= gamma_th]
    if not feasible:
        return None
    return max(feasible, key=lambda r: (r["avg_a_d_bits"], -r["p_tx_d_w"], -r["model_index"]))


def sweep_gearr(
    base: SimConfig,
    gamma_th_grid: list[float],
    f_th_grid: list[float],
    seeds: list[int] | None = None,
    include_baseline: bool = False,
    jobs: int = 1,
) -> list[dict]:
    """Trace goal-effective rate-region points: one row per
    (gamma_th, f_th) with cross-seed mean and standard error, optionally
    alongside the static-baseline best point for each gamma_th."""
    if not gamma_th_grid or not f_th_grid:
        raise ValueError("gamma_th_grid and f_th_grid must be non-empty")
    seeds = list(seeds) if seeds else [base.seed]
    jobs_args = [
        (base, g, f, base.policy.v_mbit, s)
        for g in gamma_th_grid
        for f in f_th_grid
        for s in seeds
    ]
    results = _run_jobs(_dynamic_worker, jobs_args, jobs)
    rows = []
    for g in gamma_th_grid:
        for f in f_th_grid:
            cell = [r for r in results if r["gamma_th"] == g and r["f_th"] == f]
            cell.sort(key=lambda r: r["seed"])
            stable_cell = [r for r in cell if r["stable"]]
            if len(stable_cell) < len(cell):
                warnings.warn(
                    f"gearr point (gamma_th={g}, f_th={f}): "
                    f"{len(cell) - len(stable_cell)}/{len(cell)} runs flagged "
                    "unstable and excluded from the frontier average"
                )
            use = stable_cell or cell
            a_mean, a_se = _mean_stderr([r["avg_a"] for r in use])
            g_mean, _ = _mean_stderr([r["avg_gamma"] for r in use])
            f_mean, _ = _mean_stderr([r["avg_f"] for r in use])
            rows.append({
                "gamma_th": g, "f_th_flops": f, "policy": "dynamic",
                "p_tx_d_w": math.nan, "model": "",
                "avg_a_d_bits": a_mean, "stderr_a_d_bits": a_se,
                "avg_gamma_g": g_mean, "avg_f_flops": f_mean,
                "stable_runs": sum(r["stable"] for r in cell),
                "n_seeds": len(cell),
            })
    if include_baseline:
        scan = static_scan(base, seeds=seeds, jobs=jobs)
        for g in gamma_th_grid:
            best = best_static_point(scan, g)
            if best is None:
                warnings.warn(f"static baseline: no feasible (p, model) at gamma_th={g}")
                continue
            rows.append({
                "gamma_th": g, "f_th_flops": best["avg_f_flops"], "policy": "static",
                "p_tx_d_w": best["p_tx_d_w"], "model": best["model"],
                "avg_a_d_bits": best["avg_a_d_bits"],
                "stderr_a_d_bits": best["stderr_a_d_bits"],
                "avg_gamma_g": best["avg_gamma_g"],
                "avg_f_flops": best["avg_f_flops"],
                "stable_runs": best["stable_runs"], "n_seeds": best["n_seeds"],
            })
    return rows


def sweep_tradeoff(
    base: SimConfig,
    v_grid: list[float],
    gamma_th_grid: list[float],
    seeds: list[int] | None = None,
    jobs: int = 1,
) -> list[dict]:
    """Delay-vs-sustained-rate curves: one row per (V, gamma_th) with
    cross-seed means of the sustained arrival rate and queueing delay."""
    if not v_grid or not gamma_th_grid:
        raise ValueError("v_grid and gamma_th_grid must be non-empty")
    seeds = list(seeds) if seeds else [base.seed]
    jobs_args = [
        (base, g, base.policy.f_th_flops, v, s)
        for v in v_grid
        for g in gamma_th_grid
        for s in seeds
    ]
    results = _run_jobs(_dynamic_worker, jobs_args, jobs)
    rows = []
    for v in v_grid:
        for g in gamma_th_grid:
            cell = [r for r in results if r["v"] == v and r["gamma_th"] == g]
            cell.sort(key=lambda r: r["seed"])
            a_mean, a_se = _mean_stderr([r["avg_a"] for r in cell])
            d_mean, d_se = _mean_stderr([r["delay"] for r in cell])
            rows.append({
                "v_mbit": v, "gamma_th": g,
                "avg_a_d_bits": a_mean, "stderr_a_d_bits": a_se,
                "avg_delay_q_s": d_mean, "stderr_delay_q_s": d_se,
                "stable_runs": sum(r["stable"] for r in cell),
                "n_seeds": len(cell),
            })
    return rows


# ---------------------------------------------------------------------------
# Output documents


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_trace_csv(trace: list[TraceRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for rec in trace:
            writer.writerow([
                rec.slot, _fmt(rec.a_d_bits), _fmt(rec.q_d_bits),
                _fmt(rec.p_tx_d_w), rec.gamma, rec.model, _fmt(rec.f_flops),
                _fmt(rec.r_d_bit_s), _fmt(rec.p_b), _fmt(rec.gamma_g),
                _fmt(rec.z), _fmt(rec.y),
            ])


def write_summary_json(summary: RunSummary, path) -> None:
    doc = {
        "avg_a_d_bits": summary.avg_a_d_bits,
        "avg_gamma_g": summary.avg_gamma_g,
        "avg_f_flops": summary.avg_f_flops,
        "avg_q_d_bits": summary.avg_q_d_bits,
        "avg_r_d_bit_s": summary.avg_r_d_bit_s,
        "avg_delay_q_s": summary.avg_delay_q_s,
        "drop_rate": summary.drop_rate,
        "final_z": summary.final_z,
        "final_y": summary.final_y,
        "z_over_t": summary.z_over_t,
        "y_over_t": summary.y_over_t,
        "q_slope_bits_per_slot": summary.q_slope_bits_per_slot,
        "stable": summary.stable,
        "horizon_slots": summary.horizon_slots,
        "warmup_slots": summary.warmup_slots,
        "seed": summary.seed,
        "moving_gamma_g": summary.moving_gamma_g,
        "moving_f_flops": summary.moving_f_flops,
        "moving_q_d_bits": summary.moving_q_d_bits,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def write_rows_csv(rows: list[dict], path) -> None:
    """Write sweep rows; the first row's keys fix the column order."""
    if not rows:
        raise ValueError("no rows to write")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(rows[0].keys()))
        for row in rows:
            writer.writerow([_fmt(row[k]) for k in rows[0].keys()])
