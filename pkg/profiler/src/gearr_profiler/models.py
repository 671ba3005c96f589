"""Classifier registry.

Resolves model names to prediction handles with their documented per-batch
workloads. Two families:

- torchvision names (mobilenet_v3_small, resnet50, resnet101, vit_b_16):
  require torchvision and downloadable pretrained weights; resolution fails
  with a clear message when those are unavailable.
- digits_mlp: a small fully-connected classifier for the bundled 8x8 digits
  dataset. Its weights are fit once on the dataset's fit split and cached on
  disk; afterwards it behaves like any other pretrained model. Fitting is a
  one-time fixture bootstrap, not part of curve estimation.
"""

from __future__ import annotations

import os
import pickle
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .datasets import load_dataset


class ModelResolutionError(RuntimeError):
    pass


# Documented per-inference workloads (FLOPs per batch).
DOCUMENTED_FLOPS: dict[str, float] = {
    "mobilenet_v3_small": 0.11e9,
    "resnet50": 8.2e9,
    "resnet101": 15.6e9,
    "vit_b_16": 33e9,
    # dense 64->64->10 forward pass: 2 * (64*64 + 64*10) MACs plus biases
    "digits_mlp": 9.6e3,
}

_TORCHVISION_MODELS = ("mobilenet_v3_small", "resnet50", "resnet101", "vit_b_16")


@dataclass(frozen=True)
class ClassifierHandle:
    name: str
    flops: float
    predict: Callable[[np.ndarray], np.ndarray]  # uint8 batch -> labels
    clean_hint: str = ""


def default_cache_dir() -> Path:
    return Path(os.environ.get("GEARR_PROFILER_CACHE",
                               Path.home() / ".cache" / "gearr_profiler"))


def _resolve_digits_mlp(cache_dir: Path | None) -> ClassifierHandle:
    from sklearn.neural_network import MLPClassifier

    cache_dir = Path(cache_dir) if cache_dir else default_cache_dir()
    cache_dir.mkdir(parents=True, exist_ok=True)
    cache = cache_dir / "digits_mlp.pkl"
    if cache.exists():
        with open(cache, "rb") as fh:
            clf = pickle.load(fh)
    else:
        ds = load_dataset("digits")
        clf = MLPClassifier(
            hidden_layer_sizes=(64,),
            max_iter=600,
            random_state=0,
        )
        clf.fit(ds.fit_images.astype(np.float64) / 255.0, ds.fit_labels)
        with open(cache, "wb") as fh:
            pickle.dump(clf, fh)

    def predict(images: np.ndarray) -> np.ndarray:
        x = images.reshape(len(images), -1).astype(np.float64) / 255.0
        return clf.predict(x)

    return ClassifierHandle(
        name="digits_mlp", flops=DOCUMENTED_FLOPS["digits_mlp"], predict=predict,
        clean_hint="fit on the digits fit split, cached"
    )


def _resolve_torchvision(name: str) -> ClassifierHandle:
    try:
        import torch
        from torchvision import models as tvm
        from torchvision import transforms
    except ImportError as exc:
        raise ModelResolutionError(
            f"model '{name}' needs torch/torchvision installed"
        ) from exc
    try:
        model = getattr(tvm, name)(weights="IMAGENET1K_V1")
    except Exception as exc:
        raise ModelResolutionError(
            f"could not load pretrained weights for '{name}' "
            f"(downloads are required on first use): {exc}"
        ) from exc
    model.eval()
    preprocess = transforms.Compose([
        transforms.Normalize(mean=[0.485, 0.456, 0.406],
                             std=[0.229, 0.224, 0.225]),
    ])

    def predict(images: np.ndarray) -> np.ndarray:
        # uint8 (N, H, W, 3) -> normalized float tensors
        x = torch.from_numpy(images).permute(0, 3, 1, 2).float() / 255.0
        with torch.no_grad():
            logits = model(preprocess(x))
        return logits.argmax(dim=1).numpy()

    return ClassifierHandle(name=name, flops=DOCUMENTED_FLOPS[name], predict=predict)


def resolve_model(name: str, cache_dir=None) -> ClassifierHandle:
    if name == "digits_mlp":
        return _resolve_digits_mlp(cache_dir)
    if name in _TORCHVISION_MODELS:
        return _resolve_torchvision(name)
    raise ModelResolutionError(
        f"unknown model '{name}' "
        f"(available: digits_mlp, {', '.join(_TORCHVISION_MODELS)})"
    )
