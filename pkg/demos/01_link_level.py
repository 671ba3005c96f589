"""
Link-level basics: fading, combining, and uncoded M-QAM error rates
===================================================================

Walks through the per-slot physics: Rician channel draws for the two
uplink users, MRC combining into SINRs, and the bit-error-rate curves that
couple the data-oriented user's transmit power to the goal-oriented
user's inference quality.
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from gearrsim import PhyConfig, ber_mqam, compute_link_metrics, draw_channel

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# The canonical setup: 3.5 GHz / 10 MHz / 8 antennas / Rician K=4,
# GO user 20 m from the AP, DO user 25 m away.
cfg = PhyConfig()
print(f"noise power        {cfg.noise_power_w:.3e} W")
print(f"reference gain 1m  {cfg.ref_gain:.3e}")
print(f"GO/DO distances    {cfg.distance_go_m:.0f} m / {cfg.distance_do_m:.0f} m")
print(f"upload time @256   {cfg.tx_time_s(256)*1e3:.4f} ms per batch")

# 1. BER vs SINR for the square QAM family. Higher orders buy rate but
#    collapse much earlier as interference rises.
sinr_db = np.linspace(-5, 45, 300)
sinr = 10 ** (sinr_db / 10)
plt.figure(figsize=(6, 4))
for m in (4, 16, 64, 256):
    plt.semilogy(sinr_db, np.maximum(ber_mqam(sinr, m), 1e-12), label=f"{m}-QAM")
plt.xlabel("SINR (dB)")
plt.ylabel("bit error probability")
plt.ylim(1e-10, 1)
plt.grid(True, which="both", alpha=0.3)
plt.legend()
plt.title("Uncoded square-QAM BER")
plt.tight_layout()
plt.savefig(OUT / "ber_curves.png", dpi=120)
print(f"wrote {OUT/'ber_curves.png'}")

# 2. What DO transmit power does to the GO link. With aligned line-of-sight
#    components, MRC barely suppresses the cross-user leakage, so even a few
#    mW of DO power floors the 256-QAM link.
rng = np.random.default_rng(0)
powers = np.linspace(0.0, 0.1, 11)
draws = [draw_channel(cfg, rng) for _ in range(2000)]
mean_ber = []
mean_sinr_db = []
for p in powers:
    bers = [compute_link_metrics(d, p, 256, cfg).ber_Pb for d in draws]
    sinrs = [compute_link_metrics(d, p, 256, cfg).sinr_g for d in draws]
    mean_ber.append(np.mean(bers))
    mean_sinr_db.append(10 * np.log10(np.mean(sinrs)))

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
ax1.plot(powers * 1e3, mean_sinr_db, "o-")
ax1.set_xlabel("DO transmit power (mW)")
ax1.set_ylabel("mean GO SINR (dB)")
ax1.grid(alpha=0.3)
ax2.semilogy(powers * 1e3, mean_ber, "o-")
ax2.set_xlabel("DO transmit power (mW)")
ax2.set_ylabel("mean GO BER (256-QAM)")
ax2.grid(alpha=0.3, which="both")
fig.suptitle("Cross-user interference on the goal-oriented uplink")
fig.tight_layout()
fig.savefig(OUT / "interference_impact.png", dpi=120)
print(f"wrote {OUT/'interference_impact.png'}")

for p, b in zip(powers, mean_ber):
    print(f"  p_tx_d = {p*1e3:5.1f} mW -> mean BER {b:.3e}")
