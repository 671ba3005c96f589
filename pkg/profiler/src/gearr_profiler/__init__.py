"""gearr-profiler: offline accuracy-vs-BER curve estimation for pretrained
classifiers, emitting reliability profile files for the simulator."""

__version__ = "0.1.0"

from .corruption import flip_bits, flip_bits_array
from .datasets import DatasetResolutionError, DatasetSplit, load_dataset
from .models import (
    DOCUMENTED_FLOPS,
    ClassifierHandle,
    ModelResolutionError,
    resolve_model,
)
from .profiler import DEFAULT_BER_GRID, ModelReport, ProfilerSpec, estimate_curve

__all__ = [
    "ClassifierHandle", "DatasetResolutionError", "DatasetSplit",
    "DEFAULT_BER_GRID", "DOCUMENTED_FLOPS", "ModelReport",
    "ModelResolutionError", "ProfilerSpec", "estimate_curve", "flip_bits",
    "flip_bits_array", "load_dataset", "resolve_model",
]
