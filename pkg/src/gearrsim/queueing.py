"""Physical buffer, virtual queues, and long-term-average bookkeeping.

The data-oriented user's buffer Q_d holds bits awaiting upload. Two virtual
queues turn long-term constraints into stability requirements: Z accumulates
goal-effectiveness deficit (grows when the per-slot goal achievement falls
short of its target), Y accumulates compute over-use (grows when allocated
FLOPS exceed the average budget). Mean-rate stability of Z and Y certifies
the corresponding constraints.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np


@dataclass
class QueueState:
    """Mutable per-run queue state. Q_d is in bits; Z and Y are in the
    normalized units used by the per-slot objective (goal-effectiveness
    deficit and TFLOPS-scaled compute excess)."""

    Q_d: float = 0.0
    Z: float = 0.0
    Y: float = 0.0
    mu_z: float = 1.0
    mu_y: float = 1.0

    def __post_init__(self):
        if self.Q_d < 0 or self.Z < 0 or self.Y < 0:
            raise ValueError("queue values must be non-negative")
        if self.mu_z <= 0 or self.mu_y <= 0:
            raise ValueError("step sizes mu_z, mu_y must be positive")


def update_buffer(q_d: float, r_d: float, a_d: float, tau: float) -> float:
    """One slot of buffer evolution: Q' = max(0, Q - tau*R) + A."""
    return max(0.0, q_d - tau * r_d) + a_d


def update_virtual_Z(z: float, gamma_g: float, gamma_th: float, mu_z: float) -> float:
    """Goal-effectiveness deficit: Z' = max(0, Z - mu_z*(Gamma_g - Gamma_th))."""
    return max(0.0, z - mu_z * (gamma_g - gamma_th))


def update_virtual_Y(y: float, f: float, f_th: float, mu_y: float) -> float:
    """Compute-budget excess: Y' = max(0, Y + mu_y*(F - F_th))."""
    return max(0.0, y + mu_y * (f - f_th))


def queueing_delay(avg_q: float, avg_a: float, tau: float) -> float:
    """Little's-law average queueing delay tau * Qbar / Abar (seconds).

    avg_a is admitted bits per slot. Raises when there is no traffic, since
    the delay is undefined then.
    """
    if avg_a <= 0:
        raise ValueError("no traffic: average arrivals are zero")
    return tau * avg_q / avg_a


class RunningAverages:
    """Accumulates per-slot metrics: full-series storage for moving-window
    traces, plus sums over the measurement region (slot >= warmup)."""

    def __init__(self, window: int = 1000, warmup: int = 0):
        if window < 1:
            raise ValueError("window length must be >= 1")
        if warmup < 0:
            raise ValueError("warmup must be >= 0")
        self.window = window
        self.warmup = warmup
        self._series: dict[str, list[float]] = {}
        self._sums: dict[str, float] = {}
        self._count = 0

    def add(self, slot: int, **values: float) -> None:
        measured = slot >= self.warmup
        if measured:
            self._count += 1
        for name, v in values.items():
            self._series.setdefault(name, []).append(float(v))
            if measured:
                self._sums[name] = self._sums.get(name, 0.0) + float(v)

    @property
    def measured_slots(self) -> int:
        return self._count

    def mean(self, name: str) -> float:
        """Average over the measurement region (slots >= warmup)."""
        if self._count == 0:
            return 0.0
        return self._sums.get(name, 0.0) / self._count

    def series(self, name: str) -> np.ndarray:
        return np.asarray(self._series.get(name, []), dtype=float)

    def moving_mean(self, name: str) -> np.ndarray:
        """Trailing moving average of the full series (window capped at the
        number of samples seen so far, so early slots are not zero-padded)."""
        x = self.series(name)
        if x.size == 0:
            return x
        w = self.window
        csum = np.concatenate(([0.0], np.cumsum(x)))
        idx = np.arange(1, x.size + 1)
        lo = np.maximum(idx - w, 0)
        return (csum[idx] - csum[lo]) / (idx - lo)


def fit_slope(y: np.ndarray) -> float:
    """Least-squares slope of y against its sample index."""
    y = np.asarray(y, dtype=float)
    if y.size < 2:
        return 0.0
    x = np.arange(y.size, dtype=float)
    return float(np.polyfit(x, y, 1)[0])


class _FifoTagger:
    """Per-chunk FIFO sojourn bookkeeping (used by delay cross-checks).

    Admitted chunks enter at the end of a slot; departures drain head-first.
    A bit admitted at the end of slot t and drained during slot d is present
    at the start of slots t+1..d, i.e. its sojourn is d - t slots, which is
    exactly the accounting Little's law sees when Qbar samples slot starts.
    """

    def __init__(self):
        self._fifo: deque[tuple[int, float]] = deque()
        self._weighted_slots = 0.0
        self._departed_bits = 0.0

    def admit(self, slot: int, bits: float) -> None:
        if bits > 0:
            self._fifo.append((slot, bits))

    def drain(self, slot: int, bits: float) -> None:
        remaining = bits
        while remaining > 1e-9 and self._fifo:
            t0, chunk = self._fifo[0]
            take = min(chunk, remaining)
            self._weighted_slots += take * (slot - t0)
            self._departed_bits += take
            remaining -= take
            if take >= chunk:
                self._fifo.popleft()
            else:
                self._fifo[0] = (t0, chunk - take)

    def mean_sojourn_slots(self) -> float:
        if self._departed_bits == 0:
            raise ValueError("no traffic departed")
        return self._weighted_slots / self._departed_bits


def fifo_sojourn_delay(a_series, q_series, r_series, tau: float) -> float:
    """Measured per-bit sojourn time (seconds) of the buffer trace, by FIFO
    tagging: departures in slot t are min(Q(t), tau*R(t)), arrivals A(t) join
    at the end of slot t. Independent of the Little's-law relation."""
    tagger = _FifoTagger()
    for t, (a, q, r) in enumerate(zip(a_series, q_series, r_series)):
        tagger.drain(t, min(q, tau * r))
        tagger.admit(t, a)
    return tagger.mean_sojourn_slots() * tau
