"""Deterministic frame transforms: resize, crop, flip, normalize-and-pack.

Frames are (height, width, 3) uint8 arrays. All interpolation is bilinear
with half-pixel-centered sampling; uint8 rounding is half-away-from-zero.
One rule is pinned so outputs are bit-exact across runs and platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

CROP_CENTER = "center"
CROP_RANDOM_SQUARE = "random_square"

# Normalization defaults follow the pretraining convention of the candidate
# backbone models.
DEFAULT_MEAN = (0.485, 0.456, 0.406)
DEFAULT_STD = (0.229, 0.224, 0.225)


@dataclass(frozen=True)
class TransformConfig:
    resize_height: int = 256
    target_side: int = 224
    crop: str = CROP_CENTER
    flip_probability: float = 0.0
    mean: tuple[float, float, float] = DEFAULT_MEAN
    std: tuple[float, float, float] = DEFAULT_STD

    def __post_init__(self) -> None:
        if not 0.0 <= self.flip_probability <= 1.0:
            raise ValueError(f"flip_probability outside [0, 1]: {self.flip_probability}")
        if self.target_side > self.resize_height:
            raise ValueError(
                f"target_side {self.target_side} exceeds resize_height {self.resize_height}"
            )
        if self.crop not in (CROP_CENTER, CROP_RANDOM_SQUARE):
            raise ValueError(f"unknown crop mode {self.crop!r}")

    @classmethod
    def test(cls) -> "TransformConfig":
        return cls(crop=CROP_CENTER, flip_probability=0.0)

    @classmethod
    def train(cls) -> "TransformConfig":
        return cls(crop=CROP_RANDOM_SQUARE, flip_probability=0.5)


def _check_frame(frame: np.ndarray) -> None:
    if frame.ndim != 3 or frame.shape[2] != 3 or frame.dtype != np.uint8:
        raise ValueError(f"expected (h, w, 3) uint8 frame, got {frame.shape} {frame.dtype}")


def _round_half_away(x: float) -> int:
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


def bilinear_resize(frame: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Half-pixel-centered bilinear resample to (out_h, out_w)."""
    _check_frame(frame)
    in_h, in_w = frame.shape[:2]
    if in_h == 0 or in_w == 0:
        raise ValueError("zero-area frame")
    if (in_h, in_w) == (out_h, out_w):
        return frame.copy()

    ys = (np.arange(out_h, dtype=np.float64) + 0.5) * (in_h / out_h) - 0.5
    xs = (np.arange(out_w, dtype=np.float64) + 0.5) * (in_w / out_w) - 0.5
    y0f = np.floor(ys)
    x0f = np.floor(xs)
    fy = (ys - y0f)[:, None, None]
    fx = (xs - x0f)[None, :, None]
    y0 = np.clip(y0f.astype(np.int64), 0, in_h - 1)
    y1 = np.clip(y0f.astype(np.int64) + 1, 0, in_h - 1)
    x0 = np.clip(x0f.astype(np.int64), 0, in_w - 1)
    x1 = np.clip(x0f.astype(np.int64) + 1, 0, in_w - 1)

    img = frame.astype(np.float64)
    top = img[y0][:, x0] * (1 - fx) + img[y0][:, x1] * fx
    bot = img[y1][:, x0] * (1 - fx) + img[y1][:, x1] * fx
    out = top * (1 - fy) + bot * fy
    return np.floor(out + 0.5).clip(0, 255).astype(np.uint8)


def resize_keep_aspect(frame: np.ndarray, height: int = 256) -> np.ndarray:
    """Resize so output height = ``height``, width scaled to preserve aspect.

    Output width = round(width * height / in_height), ties away from zero.
    """
    _check_frame(frame)
    in_h, in_w = frame.shape[:2]
    if in_h == 0 or in_w == 0:
        raise ValueError("zero-area frame")
    out_w = _round_half_away(in_w * height / in_h)
    return bilinear_resize(frame, height, max(1, out_w))


def crop_and_square(
    frame: np.ndarray,
    cfg: TransformConfig,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """Square-crop then resize to target_side x target_side, ignoring aspect.

    Center crop uses side min(width, resize_height). The random variant
    draws the side uniformly from [0.8, 1.0] x that maximum and places the
    crop uniformly; it needs a seeded generator for reproducibility.
    """
    _check_frame(frame)
    h, w = frame.shape[:2]
    if h != cfg.resize_height:
        raise ValueError(f"expected height {cfg.resize_height} after resize, got {h}")
    max_side = min(w, cfg.resize_height)
    if cfg.crop == CROP_CENTER:
        side = max_side
        x0 = (w - side) // 2
        y0 = (h - side) // 2
    else:
        if rng is None:
            raise ValueError("random_square crop needs a seeded generator")
        side = max(1, _round_half_away(float(rng.uniform(0.8, 1.0)) * max_side))
        side = min(side, max_side)
        x0 = int(rng.integers(0, w - side + 1))
        y0 = int(rng.integers(0, h - side + 1))
    crop = frame[y0:y0 + side, x0:x0 + side]
    return bilinear_resize(crop, cfg.target_side, cfg.target_side)


def hflip(frame: np.ndarray) -> np.ndarray:
    """Mirror columns: j maps to width-1-j. Applying twice is the identity."""
    _check_frame(frame)
    return np.ascontiguousarray(frame[:, ::-1])


def maybe_hflip(
    frame: np.ndarray, flip_probability: float, rng: np.random.Generator
) -> np.ndarray:
    """Flip when the generator's next uniform draw falls below the probability."""
    if float(rng.random()) < flip_probability:
        return hflip(frame)
    return frame


def pack_ncthw(frames: Sequence[np.ndarray], cfg: TransformConfig) -> np.ndarray:
    """Normalize ((pixel/255 - mean) / std per channel) and pack frames into
    a (1, 3, T, side, side) float32 batch."""
    if not frames:
        raise ValueError("no frames to pack")
    side = cfg.target_side
    for f in frames:
        _check_frame(f)
        if f.shape[:2] != (side, side):
            raise ValueError(f"inconsistent frame shape {f.shape[:2]}, expected {(side, side)}")
    stack = np.stack(frames).astype(np.float32) / np.float32(255.0)  # (T, H, W, C)
    mean = np.asarray(cfg.mean, dtype=np.float32)
    std = np.asarray(cfg.std, dtype=np.float32)
    stack = (stack - mean) / std
    return stack.transpose(3, 0, 1, 2)[None, ...]  # (1, C, T, H, W)
