"""Inference-model reliability profiles.

Each candidate edge model is summarized by its per-batch workload (FLOPs)
and a curve mapping the input bit error rate to classification accuracy.
Curves are tabulated as (ber, accuracy) knots and interpolated linearly in
log10(ber), since BER spans many decades. Profiles are loaded from / saved
to a small JSON document so that externally measured curves and synthetic
ones interoperate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# log10 stand-in for a knot at exactly ber = 0 (queries clamp anyway).
_LOG10_FLOOR = -300.0


class ProfileError(ValueError):
    """Raised when a profile document violates the schema invariants."""


def _log10_ber(ber):
    return np.log10(np.maximum(np.asarray(ber, dtype=float), 10.0**_LOG10_FLOOR))


@dataclass(frozen=True)
class ReliabilityProfile:
    """One model's (workload, accuracy-vs-BER) record."""

    model_name: str
    omega_flops: float
    curve: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if self.omega_flops <= 0:
            raise ProfileError(f"model '{self.model_name}': flops must be positive")
        if not self.curve:
            raise ProfileError(f"model '{self.model_name}': curve is empty")
        prev = -1.0
        for i, (ber, acc) in enumerate(self.curve):
            if not 0.0 <= ber <= 0.5:
                raise ProfileError(
                    f"model '{self.model_name}' knot {i}: ber {ber} outside [0, 0.5]"
                )
            if ber <= prev:
                raise ProfileError(
                    f"model '{self.model_name}' knot {i}: ber values must be strictly increasing"
                )
            if not 0.0 <= acc <= 1.0:
                raise ProfileError(
                    f"model '{self.model_name}' knot {i}: accuracy {acc} outside [0, 1]"
                )
            prev = ber

    @property
    def log_bers(self) -> np.ndarray:
        return _log10_ber([b for b, _ in self.curve])

    @property
    def accuracies(self) -> np.ndarray:
        return np.asarray([a for _, a in self.curve], dtype=float)


@dataclass(frozen=True)
class ModelCatalog:
    """The ordered set of models available at the edge server."""

    profiles: tuple[ReliabilityProfile, ...]

    def __post_init__(self):
        if not self.profiles:
            raise ProfileError("catalog has no models")
        names = [p.model_name for p in self.profiles]
        if len(set(names)) != len(names):
            raise ProfileError(f"duplicate model names in catalog: {names}")

    def __len__(self) -> int:
        return len(self.profiles)

    def __getitem__(self, index: int) -> ReliabilityProfile:
        return self.profiles[index]

    def names(self) -> list[str]:
        return [p.model_name for p in self.profiles]


def accuracy_at(profile: ReliabilityProfile, ber: float) -> float:
    """Accuracy at a bit error rate, piecewise linear in log10(ber).

    ber = 0 (and anything below the first knot) clamps to the first knot's
    accuracy; above the last knot clamps to the last knot's.
    """
    if not 0.0 <= ber <= 0.5:
        raise ValueError(f"ber {ber} outside [0, 0.5]")
    if ber == 0.0:
        return float(profile.accuracies[0])
    return float(np.interp(math.log10(ber), profile.log_bers, profile.accuracies))


def save_catalog(catalog: ModelCatalog, path) -> None:
    doc = {
        "models": [
            {
                "name": p.model_name,
                "flops": p.omega_flops,
                "curve": [[b, a] for b, a in p.curve],
            }
            for p in catalog.profiles
        ]
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def catalog_from_document(doc: dict) -> ModelCatalog:
    """Validate a parsed profile document and build the catalog."""
    if not isinstance(doc, dict) or "models" not in doc:
        raise ProfileError("profile document must be an object with a 'models' list")
    models = doc["models"]
    if not isinstance(models, list):
        raise ProfileError("'models' must be a list")
    profiles = []
    for entry in models:
        try:
            name = str(entry["name"])
            flops = float(entry["flops"])
            curve = tuple((float(b), float(a)) for b, a in entry["curve"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ProfileError(f"malformed model entry {entry!r}: {exc}") from exc
        profiles.append(ReliabilityProfile(model_name=name, omega_flops=flops, curve=curve))
    return ModelCatalog(profiles=tuple(profiles))


def load_catalog(path) -> ModelCatalog:
    """Load and validate a profile file (see save_catalog for the schema)."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ProfileError(f"{path}: not valid JSON: {exc}") from exc
    return catalog_from_document(doc)


def synthetic_profile(
    name: str,
    omega_flops: float,
    acc_clean: float,
    acc_floor: float,
    ber_knee: float,
    n_knots: int = 20,
    decade_scale: float = 0.5,
) -> ReliabilityProfile:
    """A smooth synthetic accuracy curve: logistic decay in log10(ber) from
    acc_clean down to acc_floor, centered at ber_knee, tabulated on
    n_knots log-spaced knots spanning [1e-8, 0.5]."""
    if not 0.0 <= acc_floor <= acc_clean <= 1.0:
        raise ProfileError(f"model '{name}': need 0 <= acc_floor <= acc_clean <= 1")
    if not 0.0 < ber_knee < 0.5:
        raise ProfileError(f"model '{name}': ber_knee must lie in (0, 0.5)")
    bers = np.logspace(-8.0, math.log10(0.5), n_knots)
    x = (np.log10(bers) - math.log10(ber_knee)) / decade_scale
    acc = acc_floor + (acc_clean - acc_floor) / (1.0 + np.exp(x))
    curve = tuple((float(b), float(a)) for b, a in zip(bers, acc))
    return ReliabilityProfile(model_name=name, omega_flops=omega_flops, curve=curve)


def synthetic_catalog(spec: list[tuple[str, float, float, float, float]]) -> ModelCatalog:
    """Build a catalog of synthetic profiles from
    (name, omega_flops, acc_clean, acc_floor, ber_knee) rows."""
    return ModelCatalog(profiles=tuple(synthetic_profile(*row) for row in spec))


# Default four-model synthetic catalog mirroring the canonical classifier
# lineup: heavier models are both more accurate on clean inputs and more
# robust to bit errors (larger knee). Flops are the documented per-batch
# workloads; accuracies/knees are synthetic stand-ins for measured curves.
DEFAULT_SYNTHETIC_SPEC: list[tuple[str, float, float, float, float]] = [
    ("mobilenet_v3_small", 0.11e9, 0.82, 0.10, 2.0e-4),
    ("resnet50", 8.2e9, 0.90, 0.10, 1.0e-3),
    ("resnet101", 15.6e9, 0.92, 0.10, 2.0e-3),
    ("vit_b_16", 33.0e9, 0.95, 0.10, 5.0e-3),
]


def default_synthetic_catalog() -> ModelCatalog:
    return synthetic_catalog(DEFAULT_SYNTHETIC_SPEC)
