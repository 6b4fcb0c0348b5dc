"""The prediction system: classifier contract, deterministic stub, and a
desk-scale trainable classifier.

The deployed deep models are represented by the classifier contract plus
ModelCard metadata; they are not reimplemented here. The toy classifier is
a linear softmax model over grid motion-energy features, trained by
full-batch gradient descent under class-weighted cross-entropy -- enough to
exercise the training loss, the imbalance weighting, and the end-to-end
path on synthetic fixtures.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import svf
from .errors import TrainingDivergedError, ValidationError
from .ingest import VideoChunk
from .labels import ClassLabel
from .pipeline import build_test_pipeline
from .sampling import SamplingStrategy
from .transforms import TransformConfig

NUM_CLASSES = 4

# Loss weights countering the Normal-heavy class balance.
DEFAULT_CLASS_WEIGHTS = (1.0, 1.0, 1.0, 0.3)

SCORE_SUM_TOL = 1e-6


def now_ms() -> int:
    return int(time.time() * 1000)


# ---------------------------------------------------------------------------
# numerics


def softmax(logits: np.ndarray) -> np.ndarray:
    """Stable softmax (max-subtracted); safe for |logit| up to ~1e4."""
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def log_softmax(logits: np.ndarray) -> np.ndarray:
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def weighted_ce(
    logits: Sequence[float],
    label: ClassLabel | int,
    weights: Sequence[float] = DEFAULT_CLASS_WEIGHTS,
) -> float:
    """loss = -weights[label] * log softmax(logits)[label]"""
    label = int(label)
    return float(-weights[label] * log_softmax(np.asarray(logits))[label])


def weighted_ce_grad(
    logits: Sequence[float],
    label: ClassLabel | int,
    weights: Sequence[float] = DEFAULT_CLASS_WEIGHTS,
) -> np.ndarray:
    """d loss / d logits = weights[label] * (softmax(logits) - onehot(label))"""
    label = int(label)
    p = softmax(np.asarray(logits))
    p[label] -= 1.0
    return weights[label] * p


def argmax_label(scores: Sequence[float]) -> ClassLabel:
    """Argmax with ties broken toward the lowest class index, so a tie
    between a critical class and Normal raises the alert."""
    return ClassLabel(int(np.argmax(np.asarray(scores))))


def validate_scores(scores: Sequence[float]) -> tuple[float, float, float, float]:
    arr = np.asarray(scores, dtype=np.float64)
    if arr.shape != (NUM_CLASSES,):
        raise ValidationError(f"scores must hold {NUM_CLASSES} values, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("scores must be finite")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValidationError(f"scores outside [0, 1]: {arr.tolist()}")
    if abs(arr.sum() - 1.0) > SCORE_SUM_TOL:
        raise ValidationError(f"scores sum to {arr.sum():.8f}, expected 1")
    return tuple(float(x) for x in arr)  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# records and contract


@dataclass(frozen=True)
class InferenceRecord:
    """One classification result bound to a chunk."""

    chunk_id: str
    label: ClassLabel
    scores: tuple[float, float, float, float]
    model_id: str
    latency_ms: float
    created_ts: int

    def __post_init__(self) -> None:
        validate_scores(self.scores)
        if argmax_label(self.scores) != self.label:
            raise ValidationError(
                f"label {int(self.label)} is not the argmax of scores {list(self.scores)}"
            )

    def to_dict(self) -> dict:
        return {
            "chunk_id": self.chunk_id,
            "label": int(self.label),
            "scores": list(self.scores),
            "model_id": self.model_id,
            "latency_ms": self.latency_ms,
            "created_ts": self.created_ts,
        }


class Classifier:
    """Contract every classifier implements: stored chunk -> InferenceRecord.

    ``single_flight`` classifiers must not receive concurrent calls; the
    orchestrator serializes them. Latency is measured around the call.
    """

    model_id: str = "base"
    single_flight: bool = False

    def classify_chunk(self, chunk: VideoChunk, data: bytes) -> InferenceRecord:
        raise NotImplementedError


@dataclass(frozen=True)
class ModelCard:
    """Ingested benchmark metadata describing a candidate deployment model."""

    model_id: str
    mean_class_accuracy: float  # percent
    throughput: float  # samples / second
    params_m: float  # millions of parameters
    gflops: float
    train_hours_total: float
    train_hours_to_90: Optional[float] = None

    def __post_init__(self) -> None:
        for name in ("mean_class_accuracy", "throughput", "params_m", "gflops", "train_hours_total"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.train_hours_to_90 is not None and self.train_hours_to_90 < 0:
            raise ValueError("train_hours_to_90 must be non-negative")


# ---------------------------------------------------------------------------
# stub classifier: deterministic ground-truth oracle for end-to-end tests


def stub_scores(label: ClassLabel) -> tuple[float, float, float, float]:
    scores = [0.01] * NUM_CLASSES
    scores[int(label)] = 1.0 - 0.01 * (NUM_CLASSES - 1)
    return tuple(scores)  # type: ignore[return-value]


def stub_classify(
    chunk_bytes: bytes,
    chunk_id: str = "",
    clock: Callable[[], int] = now_ms,
) -> InferenceRecord:
    """Label = majority per-frame action code, ties toward the lowest index;
    scores are the one-hot smoothed by 0.01."""
    start = time.perf_counter()
    codes = svf.frame_codes(chunk_bytes)
    counts = np.bincount(codes, minlength=NUM_CLASSES)[:NUM_CLASSES]
    label = ClassLabel(int(np.argmax(counts)))
    latency = (time.perf_counter() - start) * 1000.0
    return InferenceRecord(
        chunk_id=chunk_id,
        label=label,
        scores=stub_scores(label),
        model_id="stub",
        latency_ms=latency,
        created_ts=clock(),
    )


class StubClassifier(Classifier):
    model_id = "stub"
    single_flight = False

    def __init__(self, clock: Callable[[], int] = now_ms):
        self._clock = clock

    def classify_chunk(self, chunk: VideoChunk, data: bytes) -> InferenceRecord:
        return stub_classify(data, chunk_id=chunk.chunk_id, clock=self._clock)


# ---------------------------------------------------------------------------
# motion-energy features

FEATURE_GRID = 4
NUM_FEATURES = 2 * FEATURE_GRID * FEATURE_GRID  # 16 motion + 16 intensity
FEATURE_SPEC = f"grid{FEATURE_GRID}x{FEATURE_GRID}-motion+intensity"


def motion_features(batch: np.ndarray) -> np.ndarray:
    """Per-region mean |temporal difference| plus per-region mean intensity
    over a 4x4 spatial grid; 32 features for a (N, C, T, H, W) batch.

    Needs at least two frames; a static clip yields zero motion energy.
    """
    if batch.ndim != 5:
        raise ValidationError(f"expected (N, C, T, H, W) batch, got shape {batch.shape}")
    n, c, t, h, w = batch.shape
    if t < 2:
        raise ValidationError(f"motion features need t >= 2 frames, got {t}")
    x = np.asarray(batch[0], dtype=np.float64)  # (C, T, H, W)
    diff = np.abs(np.diff(x, axis=1))  # (C, T-1, H, W)

    g = FEATURE_GRID
    motion = np.empty(g * g)
    intensity = np.empty(g * g)
    for i in range(g):
        y0, y1 = i * h // g, (i + 1) * h // g
        for j in range(g):
            x0, x1 = j * w // g, (j + 1) * w // g
            motion[i * g + j] = diff[:, :, y0:y1, x0:x1].mean()
            intensity[i * g + j] = x[:, :, y0:y1, x0:x1].mean()
    return np.concatenate([motion, intensity])


# ---------------------------------------------------------------------------
# toy trainable classifier

DEFAULT_LEARNING_RATE = 0.1
DEFAULT_EPOCHS = 200


@dataclass
class ToyClassifier(Classifier):
    """Linear softmax classifier over motion-energy features."""

    weights: np.ndarray  # (NUM_FEATURES, 4)
    bias: np.ndarray  # (4,)
    strategy: SamplingStrategy = SamplingStrategy(clip_len=8, stride=None)
    transform: TransformConfig = TransformConfig.test()
    feature_spec: str = FEATURE_SPEC
    model_id: str = "toy"
    single_flight: bool = False
    loss_history: list[float] = field(default_factory=list)
    clock: Callable[[], int] = now_ms

    def predict_scores(self, features: np.ndarray) -> np.ndarray:
        return softmax(features @ self.weights + self.bias)

    def classify_features(
        self, features: np.ndarray, chunk_id: str = "", latency_ms: float = 0.0
    ) -> InferenceRecord:
        scores = self.predict_scores(features)
        # clip float fuzz so scores always satisfy the record invariants
        scores = np.clip(scores, 0.0, 1.0)
        scores = scores / scores.sum()
        return InferenceRecord(
            chunk_id=chunk_id,
            label=argmax_label(scores),
            scores=tuple(float(s) for s in scores),  # type: ignore[arg-type]
            model_id=self.model_id,
            latency_ms=latency_ms,
            created_ts=self.clock(),
        )

    def classify_chunk(self, chunk: VideoChunk, data: bytes) -> InferenceRecord:
        start = time.perf_counter()
        batch = build_test_pipeline(data, self.strategy, self.transform)
        features = motion_features(batch)
        latency = (time.perf_counter() - start) * 1000.0
        return self.classify_features(features, chunk_id=chunk.chunk_id, latency_ms=latency)

    def save(self, path) -> None:
        np.savez(path, weights=self.weights, bias=self.bias)

    @classmethod
    def load(cls, path, **kwargs) -> "ToyClassifier":
        data = np.load(path)
        return cls(weights=data["weights"], bias=data["bias"], **kwargs)


def fit_linear_classifier(
    features: np.ndarray,
    labels: Sequence[int],
    epochs: int = DEFAULT_EPOCHS,
    learning_rate: float = DEFAULT_LEARNING_RATE,
    class_weights: Sequence[float] = DEFAULT_CLASS_WEIGHTS,
    seed: int = 0,
) -> ToyClassifier:
    """Full-batch gradient descent on class-weighted cross-entropy.

    Deterministic given the seed. ``loss_history`` holds the mean loss
    before each update plus a final post-training entry (epochs + 1 values);
    epochs=0 returns the seeded initialization unchanged.
    """
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValidationError(f"features {X.shape} do not align with labels {y.shape}")
    if not np.all(np.isfinite(X)):
        raise ValidationError("features must be finite")
    present = np.bincount(y, minlength=NUM_CLASSES)[:NUM_CLASSES]
    if (present == 0).any():
        missing = [ClassLabel(i).display for i in np.flatnonzero(present == 0)]
        raise ValidationError(f"empty class: no samples for {', '.join(missing)}")

    n, d = X.shape
    w = np.asarray(class_weights, dtype=np.float64)
    rng = np.random.default_rng(seed)
    W = rng.normal(0.0, 0.01, size=(d, NUM_CLASSES))
    b = np.zeros(NUM_CLASSES)

    onehot = np.zeros((n, NUM_CLASSES))
    onehot[np.arange(n), y] = 1.0
    sample_w = w[y]  # (n,)

    def mean_loss(logits: np.ndarray) -> float:
        return float(-(sample_w * log_softmax(logits)[np.arange(n), y]).mean())

    history = []
    with np.errstate(over="ignore", invalid="ignore"):  # divergence is detected, not warned
        for epoch in range(epochs):
            logits = X @ W + b
            loss = mean_loss(logits)
            if not np.isfinite(loss):
                raise TrainingDivergedError(epoch, loss)
            history.append(loss)
            grad = sample_w[:, None] * (softmax(logits) - onehot) / n  # (n, 4)
            W -= learning_rate * (X.T @ grad)
            b -= learning_rate * grad.sum(axis=0)
        final = mean_loss(X @ W + b)
    if not np.isfinite(final):
        raise TrainingDivergedError(epochs, final)
    history.append(final)

    return ToyClassifier(weights=W, bias=b, loss_history=history)


def train_toy(
    labeled_chunks: Sequence[tuple[bytes, ClassLabel | int]],
    epochs: int = DEFAULT_EPOCHS,
    learning_rate: float = DEFAULT_LEARNING_RATE,
    class_weights: Sequence[float] = DEFAULT_CLASS_WEIGHTS,
    seed: int = 0,
    strategy: SamplingStrategy = SamplingStrategy(clip_len=8, stride=None),
    transform: TransformConfig = TransformConfig.test(),
) -> ToyClassifier:
    """Featurize labeled fixture chunks and fit the linear classifier."""
    feats = np.stack(
        [motion_features(build_test_pipeline(data, strategy, transform)) for data, _ in labeled_chunks]
    )
    labels = [int(label) for _, label in labeled_chunks]
    model = fit_linear_classifier(
        feats, labels, epochs=epochs, learning_rate=learning_rate,
        class_weights=class_weights, seed=seed,
    )
    model.strategy = strategy
    model.transform = transform
    return model
