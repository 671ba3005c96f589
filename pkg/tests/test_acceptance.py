"""Acceptance gate: every release-blocking criterion at its stated
tolerance, one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s`. The long-horizon tests
(region tracing, baseline comparison) dominate the runtime at a few
minutes total.
"""

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from gearrsim import (
    DynamicPolicy,
    PolicyConfig,
    QueueState,
    SimConfig,
    admit_arrivals,
    ber_mqam,
    draw_channel,
    fifo_sojourn_delay,
    max_feasible_effectiveness,
    rate_do,
    run,
    static_scan,
    sweep_gearr,
    sweep_tradeoff,
)
from gearrsim.cli import main
from gearrsim.config import build_sim_config
from gearrsim.sim import best_static_point, resolve_catalog

from test_orchestrator import brute_force_decision, random_instances
from test_phy import gaussian_tail_quadrature


def _ok(name: str) -> None:
    print(f"\nACCEPTANCE PASS: {name}")


def table1_config(**policy_overrides) -> SimConfig:
    cfg = build_sim_config({"preset": "table1"})
    if policy_overrides:
        cfg = replace(cfg, policy=replace(cfg.policy, **policy_overrides))
    return cfg


def test_subproblem1_admission_oracle():
    """admit_arrivals == brute-force argmax of (V - Q) * A on a 1000-point
    grid, 10^4 random instances, exact, < 1 s."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    n = 10_000
    v = rng.uniform(0.0, 200.0, n)
    q = rng.uniform(0.0, 200.0, n)
    a_max = rng.uniform(0.0, 10.0, n)
    grid = np.linspace(0.0, 1.0, 1000)  # scaled per instance by a_max
    amounts = a_max[:, None] * grid[None, :]
    objective = (v - q)[:, None] * amounts
    brute = amounts[np.arange(n), np.argmax(objective, axis=1)]
    closed = np.array([admit_arrivals(qi, vi, ai) for qi, vi, ai in zip(q, v, a_max)])
    assert np.array_equal(closed, brute)
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0, f"took {elapsed:.2f}s"
    _ok(f"sub-problem-1 oracle (10^4 instances, exact, {elapsed:.2f}s)")


def test_subproblem2_search_oracle():
    """decide_slot == independent exhaustive enumerator on 10^3 randomized
    instances: identical objective value and decision, < 10 s."""
    t0 = time.perf_counter()
    cfg = table1_config().phy
    catalog = resolve_catalog(None)
    pol = PolicyConfig()
    policy = DynamicPolicy(cfg, pol, catalog)
    n = 0
    for draw, state, a_max in random_instances(1000, cfg, catalog, seed=103):
        dec = policy.decide(draw, state, a_max)
        obj, best = brute_force_decision(draw, state, catalog, cfg, pol)
        assert dec.objective_value == obj
        assert dec.gamma == best["gamma"]
        assert dec.p_tx_d_w == best["p"]
        assert dec.model_index == best["l"]
        assert dec.m_order == best["m"]
        assert dec.f_flops == best["f"]
        n += 1
    elapsed = time.perf_counter() - t0
    assert n == 1000 and elapsed < 10.0, f"took {elapsed:.2f}s"
    _ok(f"sub-problem-2 oracle (10^3 instances, exact, {elapsed:.2f}s)")


def test_constraint_convergence():
    """Canonical preset, 4-model synthetic catalog, feasible targets from
    {0.5, 0.7, 0.9} at a 1-TFLOPS average budget, 20000 slots: the measured
    goal-effectiveness lands within 0.02 of target, average compute within
    1.05 TFLOPS, and both virtual queues are mean-rate stable (X(T)/T <
    1e-3). Small V keeps the virtual-queue magnitudes commensurate with the
    T-normalized bound."""
    base = table1_config(gamma_th=0.7, f_th_flops=1e12, v_mbit=5.0)
    catalog = resolve_catalog(base.catalog_source)
    bound = max_feasible_effectiveness(catalog, base.phy, base.policy)
    targets = [g for g in (0.5, 0.7, 0.9) if g <= bound - 0.02]
    assert targets, "no feasible targets under the compute budget"
    skipped = [g for g in (0.5, 0.7, 0.9) if g > bound - 0.02]
    for gamma_th in targets:
        t0 = time.perf_counter()
        cfg = replace(base, policy=replace(base.policy, gamma_th=gamma_th))
        summary, _ = run(cfg)
        elapsed = time.perf_counter() - t0
        assert elapsed < 60.0, f"run took {elapsed:.1f}s"
        assert summary.avg_gamma_g >= gamma_th - 0.02, (
            f"gamma_th={gamma_th}: measured {summary.avg_gamma_g:.4f}"
        )
        assert summary.avg_f_flops <= 1.05e12, (
            f"gamma_th={gamma_th}: F-bar {summary.avg_f_flops/1e12:.4f} TFLOPS"
        )
        assert summary.z_over_t < 1e-3, f"Z(T)/T = {summary.z_over_t:.2e}"
        assert summary.y_over_t < 1e-3, f"Y(T)/T = {summary.y_over_t:.2e}"

    # The documented V = 100 operating point keeps the same averages (the
    # virtual-queue magnitude bound is V-specific and not asserted here).
    cfg100 = table1_config(gamma_th=0.7, f_th_flops=1e12, v_mbit=100.0)
    summary100, _ = run(cfg100)
    assert summary100.avg_gamma_g >= 0.68
    assert summary100.avg_f_flops <= 1.05e12
    _ok(
        "constraint convergence (targets "
        f"{targets} converged; {skipped} infeasible by bound {bound:.3f}; "
        "V=100 spot check ok)"
    )


def test_gearr_monotonicity():
    """Sustained DO arrivals non-increasing in the goal-effectiveness target
    across {0.5..0.9}, 5 seeds, within twice the cross-seed stderr."""
    t0 = time.perf_counter()
    base = table1_config(f_th_flops=1e12, v_mbit=100.0)
    grid = [0.5, 0.6, 0.7, 0.8, 0.9]
    rows = sweep_gearr(base, grid, [1e12], seeds=[1, 2, 3, 4, 5], jobs=1)
    rates = [r["avg_a_d_bits"] for r in rows]
    errs = [r["stderr_a_d_bits"] for r in rows]
    for i in range(len(grid) - 1):
        slack = 2.0 * math.hypot(errs[i], errs[i + 1])
        assert rates[i + 1] <= rates[i] + slack, (
            f"A-bar rose from gamma_th={grid[i]} ({rates[i]:.3g}) "
            f"to {grid[i+1]} ({rates[i+1]:.3g}), slack {slack:.3g}"
        )
    elapsed = time.perf_counter() - t0
    assert elapsed < 600.0, f"took {elapsed:.0f}s"
    rate_str = ", ".join(f"{r:.3g}" for r in rates)
    _ok(f"GEARR monotonicity (A-bar over grid: {rate_str}; {elapsed:.0f}s)")


def test_dynamic_beats_static():
    """At each target with the compute budget pinned to the static
    baseline's a-posteriori usage, the dynamic policy sustains at least 95%
    of the static baseline's arrivals."""
    t0 = time.perf_counter()
    base = table1_config(v_mbit=100.0)
    scan = static_scan(base, seeds=[1, 2], jobs=1)
    compared = []
    for gamma_th in (0.5, 0.7, 0.9):
        best = best_static_point(scan, gamma_th)
        if best is None:
            continue
        f_match = best["avg_f_flops"]
        dyn_rates = []
        for seed in (1, 2, 3):
            cfg = replace(base, seed=seed, policy=replace(
                base.policy, gamma_th=gamma_th, f_th_flops=f_match
            ))
            summary, _ = run(cfg)
            dyn_rates.append(summary.avg_a_d_bits)
        dyn = float(np.mean(dyn_rates))
        assert dyn >= 0.95 * best["avg_a_d_bits"], (
            f"gamma_th={gamma_th}: dynamic {dyn:.4g} < "
            f"0.95 * static {best['avg_a_d_bits']:.4g} "
            f"(static point p={best['p_tx_d_w']}, {best['model']})"
        )
        compared.append((gamma_th, dyn, best["avg_a_d_bits"]))
    elapsed = time.perf_counter() - t0
    assert compared, "static baseline infeasible at every target"
    assert elapsed < 900.0, f"took {elapsed:.0f}s"
    detail = "; ".join(
        f"gamma_th={g}: dyn {d:.3g} vs static {s:.3g}" for g, d, s in compared
    )
    _ok(f"dynamic >= static - 5% ({detail}; {elapsed:.0f}s)")


def test_delay_rate_tradeoff():
    """Along a log-spaced V grid: sustained arrivals and queueing delay both
    non-decreasing (within 2x cross-seed stderr), and the Little's-law delay
    matches FIFO-tagged per-bit sojourn within 5%."""
    base = table1_config(gamma_th=0.7, f_th_flops=1e12)
    v_grid = [0.1, 1.0, 10.0, 100.0]
    rows = sweep_tradeoff(base, v_grid, [0.7], seeds=[1, 2, 3], jobs=1)
    rates = [r["avg_a_d_bits"] for r in rows]
    rate_errs = [r["stderr_a_d_bits"] for r in rows]
    delays = [r["avg_delay_q_s"] for r in rows]
    delay_errs = [r["stderr_delay_q_s"] for r in rows]
    for i in range(len(v_grid) - 1):
        assert rates[i + 1] >= rates[i] - 2.0 * math.hypot(rate_errs[i], rate_errs[i + 1]), (
            f"A-bar dropped from V={v_grid[i]} to V={v_grid[i+1]}"
        )
        assert delays[i + 1] >= delays[i] - 2.0 * math.hypot(delay_errs[i], delay_errs[i + 1]), (
            f"delay dropped from V={v_grid[i]} to V={v_grid[i+1]}"
        )

    # Little's law vs FIFO tagging on one full-horizon run
    cfg = replace(base, seed=1, policy=replace(base.policy, v_mbit=10.0))
    _, trace = run(cfg)
    tau = cfg.phy.slot_s
    a = np.array([r.a_d_bits for r in trace])
    q = np.array([r.q_d_bits for r in trace])
    rate = np.array([r.r_d_bit_s for r in trace])
    little = tau * q.mean() / a.mean()
    fifo = fifo_sojourn_delay(a, q, rate, tau)
    assert abs(little - fifo) / fifo < 0.05, f"little {little:.4f}s vs fifo {fifo:.4f}s"
    delay_str = ", ".join(f"{d*1e3:.0f}ms" for d in delays)
    _ok(
        f"delay/rate trade-off (delays over V grid: {delay_str}; "
        f"little {little*1e3:.1f}ms vs fifo {fifo*1e3:.1f}ms)"
    )


def test_phy_reference_values():
    """BER closed-form anchors, Q-function vs quadrature (< 1e-8 rel),
    channel-gain Monte Carlo within 1%, exact DO-rate endpoint identities."""
    assert ber_mqam(0.0, 256) == 0.234375
    for sinr in (0.25, 1.0, 4.0, 9.0, 16.0):
        want = gaussian_tail_quadrature(math.sqrt(sinr))
        got = ber_mqam(sinr, 4)
        assert abs(got - want) / want < 1e-8

    cfg = table1_config().phy
    rng = np.random.default_rng(107)
    n_draws = 100_000
    total = 0.0
    for _ in range(n_draws):
        d = draw_channel(cfg, rng)
        total += np.vdot(d.h_g, d.h_g).real
    g_expected = cfg.pathloss_gain(cfg.distance_go_m)
    mc = total / n_draws / cfg.n_antennas
    assert abs(mc - g_expected) / g_expected < 0.01

    from gearrsim import LinkMetrics
    m = LinkMetrics(sinr_g=1.0, sinr_d=1.0, snr_d=3.0, ber_Pb=0.0,
                    rate_g=80e6, d_tx=0.0150528)
    w = cfg.bandwidth_hz
    assert rate_do(m, 0.0, cfg) == w * math.log2(1.0 + m.snr_d)
    assert rate_do(m, cfg.slot_s, cfg) == w * math.log2(1.0 + m.sinr_d)
    _ok(f"phy reference values (gain MC rel err {abs(mc-g_expected)/g_expected:.2%})")


def test_determinism(tmp_path):
    """Identical config+seed -> byte-identical trace.csv; sweep tables
    independent of the parallelism degree."""
    import yaml

    cfg_doc = {
        "preset": "table1",
        "sim": {"horizon_slots": 2000, "warmup_slots": 1000, "seed": 11},
        "policy": {"v_mbit": 5.0},
    }
    cfg_path = tmp_path / "cfg.yaml"
    cfg_path.write_text(yaml.safe_dump(cfg_doc))
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert main(["run", "--config", str(cfg_path), "--out", str(out1)]) == 0
    assert main(["run", "--config", str(cfg_path), "--out", str(out2)]) == 0
    t1 = (out1 / "trace.csv").read_bytes()
    t2 = (out2 / "trace.csv").read_bytes()
    assert t1 == t2

    sweeps = []
    for jobs in ("1", "4"):
        out = tmp_path / f"s{jobs}"
        rc = main([
            "sweep", "--config", str(cfg_path), "--gamma-th", "0.5,0.7",
            "--f-th", "1.0", "--seeds", "11,12", "--jobs", jobs,
            "--out", str(out),
        ])
        assert rc == 0
        sweeps.append((out / "gearr.csv").read_bytes())
    assert sweeps[0] == sweeps[1]
    _ok("determinism (byte-identical traces; parallelism-invariant sweeps)")
