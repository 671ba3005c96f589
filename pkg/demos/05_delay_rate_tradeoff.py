"""
The V knob: sustained rate against queueing delay
=================================================

The trade-off weight V pushes the admission valve toward higher sustained
arrivals at the price of a deeper buffer, i.e. more queueing delay. This
demo sweeps V log-spaced under two goal-effectiveness targets and plots
delay against rate, the classic knee of stochastic network optimization.
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from gearrsim import PolicyConfig, SimConfig, sweep_tradeoff
from gearrsim.sim import write_rows_csv

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

base = SimConfig(
    policy=PolicyConfig(f_th_flops=1e12),
    horizon_slots=4000,
    warmup_slots=2000,
)
v_grid = [0.1, 0.5, 2.0, 10.0, 50.0, 200.0]
targets = [0.5, 0.8]

rows = sweep_tradeoff(base, v_grid, targets, seeds=[1, 2], jobs=2)
write_rows_csv(rows, OUT / "tradeoff.csv")
print(f"wrote {OUT/'tradeoff.csv'}")

plt.figure(figsize=(6.5, 4.5))
for g in targets:
    pts = [r for r in rows if r["gamma_th"] == g]
    xs = [r["avg_a_d_bits"] / 1e6 for r in pts]
    ys = [r["avg_delay_q_s"] * 1e3 for r in pts]
    plt.semilogy(xs, ys, "o-", label=f"goal-effectiveness target {g}")
plt.xlabel("sustained DO arrivals (Mbit/slot)")
plt.ylabel("avg queueing delay (ms)")
plt.grid(alpha=0.3, which="both")
plt.legend()
plt.title("Delay vs sustained rate along a V sweep")
plt.tight_layout()
plt.savefig(OUT / "tradeoff.png", dpi=120)
print(f"wrote {OUT/'tradeoff.png'}")

for r in rows:
    print(
        f"  V={r['v_mbit']:6.1f} gamma_th={r['gamma_th']}: "
        f"A-bar {r['avg_a_d_bits']/1e6:6.3f} Mbit/slot, "
        f"delay {r['avg_delay_q_s']*1e3:8.1f} ms"
    )
