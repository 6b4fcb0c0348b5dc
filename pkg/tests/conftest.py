from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from vigil import svf


def make_svf(
    width: int = 32,
    height: int = 24,
    fps: int = 30,
    codes=(3,) * 30,
    subtypes=None,
    seed: int = 0,
) -> bytes:
    """Small fixture with seeded noise pixels and the given per-frame codes."""
    rng = np.random.default_rng(seed)
    if subtypes is None:
        subtypes = [0] * len(codes)
    frames = [
        (code, sub, rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8))
        for code, sub in zip(codes, subtypes)
    ]
    return svf.write_svf(width, height, fps, frames)


@pytest.fixture
def small_chunk() -> bytes:
    return make_svf(codes=(3,) * 60)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
