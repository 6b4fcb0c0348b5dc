"""Published benchmark results for the candidate deployment models.

Six variants were benchmarked on the 6044-sample dataset (754 test
samples: 118 per critical class, 400 Normal). The four representatives
carried forward to class-wise evaluation are UniFormerV2, TimeSformer
(divided), I3D, and SlowFast (r101). Ingested here as metadata: FLOPs,
parameters, and training hours are properties of the GPU training runs,
not something this service recomputes.
"""

from __future__ import annotations

from ..classify import ModelCard
from ..labels import ClassLabel
from .metrics import MacroMetrics

TEST_SAMPLES_PER_CRITICAL_CLASS = 118
TEST_SAMPLES_NORMAL = 400

REFERENCE_MODEL_CARDS: tuple[ModelCard, ...] = (
    ModelCard("UniFormerV2", 95.36, 1.28, 114.0, 143.0, 13.91, 3.51),
    ModelCard("TimeSformer (joint)", 93.44, 3.65, 85.808, 180.0, 16.64, 5.01),
    ModelCard("TimeSformer (divided)", 95.49, 3.96, 121.0, 196.0, 18.15, 3.23),
    ModelCard("I3D", 93.43, 0.97, 27.232, 33.271, 5.80, 1.53),
    ModelCard("SlowFast (r50)", 84.95, 0.96, 33.567, 27.816, 6.19, None),
    ModelCard("SlowFast (r101)", 86.81, 0.37, 62.0, 97.1, 13.38, None),
)

# Per-class (tp, fn, fp) on the test split for the four representative
# models, keyed by model then class.
REFERENCE_CLASS_COUNTS: dict[str, dict[ClassLabel, tuple[int, int, int]]] = {
    "UniFormerV2": {
        ClassLabel.FALLING: (118, 0, 1),
        ClassLabel.STAGGERING: (116, 2, 20),
        ClassLabel.CHEST_PAIN: (109, 9, 16),
    },
    "TimeSformer (divided)": {
        ClassLabel.FALLING: (117, 1, 0),
        ClassLabel.STAGGERING: (117, 1, 5),
        ClassLabel.CHEST_PAIN: (104, 14, 13),
    },
    "I3D": {
        ClassLabel.FALLING: (117, 1, 2),
        ClassLabel.STAGGERING: (116, 2, 15),
        ClassLabel.CHEST_PAIN: (100, 18, 18),
    },
    "SlowFast (r101)": {
        ClassLabel.FALLING: (118, 0, 8),
        ClassLabel.STAGGERING: (98, 20, 5),
        ClassLabel.CHEST_PAIN: (89, 29, 38),
    },
}

# Macro metrics (percent) for the four representative models.
REFERENCE_MACRO_METRICS: dict[str, MacroMetrics] = {
    "UniFormerV2": MacroMetrics(95.36, 92.18, 93.61),
    "TimeSformer (divided)": MacroMetrics(95.49, 95.19, 95.33),
    "I3D": MacroMetrics(93.43, 91.61, 92.45),
    "SlowFast (r101)": MacroMetrics(86.81, 87.02, 86.76),
}

# Planner inputs for the deployed configuration: TimeSformer (divided)
# throughput, 10-second chunks, one V100-class cloud GPU.
DEPLOYED_THROUGHPUT = 3.96
DEPLOYED_CHUNK_S = 10.0
DEPLOYED_GPU_HOURLY_USD = 3.06
