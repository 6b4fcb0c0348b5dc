"""Frame-index sampling: which frames of a chunk feed the classifier.

A strategy is "clip_len x stride x num_clips". The stride may be dynamic:
it is then computed as floor(total_frames / clip_len), minimum 1. Index
clamping (not looping) absorbs videos shorter than the sampling span, so
sampling is total for any T >= 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

DYNAMIC = "dynamic"


@dataclass(frozen=True)
class SamplingStrategy:
    """clip_len frames per clip, stride frames apart, num_clips clips.

    ``stride=None`` selects the dynamic rule. ``mode`` is "test"
    (deterministic center placement) or "train" (uniform random offset).
    """

    clip_len: int
    stride: Optional[int] = None
    num_clips: int = 1
    mode: str = "test"

    def __post_init__(self) -> None:
        if self.clip_len < 1:
            raise ValueError(f"clip_len must be >= 1, got {self.clip_len}")
        if self.num_clips < 1:
            raise ValueError(f"num_clips must be >= 1, got {self.num_clips}")
        if self.stride is not None and self.stride < 1:
            raise ValueError(f"static stride must be >= 1, got {self.stride}")
        if self.mode not in ("train", "test"):
            raise ValueError(f"mode must be 'train' or 'test', got {self.mode!r}")

    @property
    def dynamic(self) -> bool:
        return self.stride is None

    def describe(self) -> str:
        stride = DYNAMIC if self.dynamic else str(self.stride)
        return f"{self.clip_len}x{stride}x{self.num_clips}"


def effective_stride(total_frames: int, strategy: SamplingStrategy) -> int:
    if strategy.dynamic:
        return max(1, total_frames // strategy.clip_len)
    return strategy.stride  # type: ignore[return-value]


def sample_indices(
    total_frames: int,
    strategy: SamplingStrategy,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """Return clip_len * num_clips frame indices, each in [0, T-1] and
    non-decreasing within a clip.

    Test mode centers the sampling span: offset = floor((T - span) / 2),
    clamped to >= 0, where span = (clip_len - 1) * stride + 1. Train mode
    draws each clip's offset uniformly from [0, max(0, T - span)]. Indices
    past the end are clamped to T - 1.
    """
    if total_frames < 1:
        raise ValueError(f"total_frames must be >= 1, got {total_frames}")
    if strategy.mode == "train" and rng is None:
        raise ValueError("train-mode sampling needs a seeded generator")

    stride = effective_stride(total_frames, strategy)
    span = (strategy.clip_len - 1) * stride + 1
    slack = max(0, total_frames - span)
    base = np.arange(strategy.clip_len, dtype=np.int64) * stride

    clips = []
    for k in range(strategy.num_clips):
        if strategy.mode == "train":
            offset = int(rng.integers(0, slack + 1))
        elif strategy.num_clips == 1:
            offset = slack // 2
        else:
            # spread clip centers evenly across the available slack
            offset = (slack * (2 * k + 1)) // (2 * strategy.num_clips)
        clips.append(np.minimum(offset + base, total_frames - 1))
    return np.concatenate(clips)
