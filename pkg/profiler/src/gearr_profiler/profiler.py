"""Curve estimation: measure classification accuracy under controlled
bit-flip corruption and emit reliability profile files.

The emitted document follows the simulator's profile schema exactly:
{"models": [{"name", "flops", "curve": [[ber, accuracy], ...]}]}. Per-knot
binomial standard errors are reported alongside (stdout/report), not in the
file.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corruption import flip_bits_array
from .datasets import load_dataset
from .models import resolve_model

DEFAULT_BER_GRID = (
    1e-6, 1e-5, 1e-4, 3.16e-4, 1e-3, 3.16e-3, 1e-2, 3.16e-2, 1e-1, 0.5,
)


@dataclass(frozen=True)
class ProfilerSpec:
    models: tuple[str, ...] = ("digits_mlp",)
    dataset: str = "digits"
    ber_grid: tuple[float, ...] = DEFAULT_BER_GRID
    samples: int = 1000
    seed: int = 0
    out_path: str = "profiles.json"
    cache_dir: str | None = None

    def __post_init__(self):
        if not self.models:
            raise ValueError("need at least one model")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        prev = -1.0
        for ber in self.ber_grid:
            if not 0.0 <= ber <= 0.5:
                raise ValueError(f"ber {ber} outside [0, 0.5]")
            if ber <= prev:
                raise ValueError("ber grid must be strictly increasing")
            prev = ber


@dataclass
class KnotReport:
    ber: float
    accuracy: float
    stderr: float


@dataclass
class ModelReport:
    name: str
    flops: float
    clean_accuracy: float
    n_samples: int
    knots: list[KnotReport] = field(default_factory=list)


def estimate_curve(spec: ProfilerSpec) -> tuple[dict, list[ModelReport]]:
    """Measure one accuracy-vs-BER curve per model and write the profile
    file. Returns the emitted document and the per-knot reports."""
    ds = load_dataset(spec.dataset)
    rng = np.random.default_rng(spec.seed)
    n = min(spec.samples, len(ds.val_labels))
    sel = rng.permutation(len(ds.val_labels))[:n]
    images = ds.val_images[sel]
    labels = ds.val_labels[sel]

    entries = []
    reports = []
    for name in spec.models:
        handle = resolve_model(name, cache_dir=spec.cache_dir)
        clean_acc = float(np.mean(handle.predict(images) == labels))
        report = ModelReport(
            name=name, flops=handle.flops, clean_accuracy=clean_acc, n_samples=n
        )
        curve = []
        for ber in spec.ber_grid:
            corrupted = flip_bits_array(images, ber, rng)
            acc = float(np.mean(handle.predict(corrupted) == labels))
            stderr = math.sqrt(acc * (1.0 - acc) / n)
            curve.append([ber, acc])
            report.knots.append(KnotReport(ber=ber, accuracy=acc, stderr=stderr))
        entries.append({"name": name, "flops": handle.flops, "curve": curve})
        reports.append(report)

    doc = {"models": entries}
    Path(spec.out_path).write_text(json.dumps(doc, indent=2) + "\n")
    return doc, reports
