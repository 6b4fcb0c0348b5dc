"""The deployed preprocessing path: stored chunk bytes -> classifier batch.

Composition: sample indices -> decode frames -> resize (keep aspect) ->
center crop + square -> normalize and pack NCTHW. Pure given its inputs;
identical chunk bytes yield bit-identical batches. Stage failures surface
as PipelineStageError carrying the stage name.
"""

from __future__ import annotations

import numpy as np

from . import svf
from .errors import ConfigurationError, PipelineStageError, VigilError
from .sampling import SamplingStrategy, sample_indices
from .transforms import TransformConfig, crop_and_square, pack_ncthw, resize_keep_aspect


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except PipelineStageError:
        raise
    except (VigilError, ValueError, IndexError) as exc:
        raise PipelineStageError(name, exc) from exc


def build_test_pipeline(
    chunk_bytes: bytes,
    strategy: SamplingStrategy,
    cfg: TransformConfig,
) -> np.ndarray:
    """Run the full test-time pipeline on one stored chunk.

    Returns a (num_clips, 3, clip_len, side, side) float32 batch; with the
    deployed num_clips=1 that is (1, 3, clip_len, side, side).
    """
    if strategy.mode != "test":
        raise ConfigurationError("the deployed pipeline runs test-mode strategies only")

    header = _stage("decode", svf.read_header, chunk_bytes)
    if header.frame_count < 1:
        raise PipelineStageError("decode", ValueError("chunk holds no frames"))

    indices = _stage("sample", sample_indices, header.frame_count, strategy)

    def _decode_frames():
        return [svf.read_frame(chunk_bytes, header, int(i)).pixels for i in indices]

    frames = _stage("decode", _decode_frames)
    resized = _stage(
        "resize", lambda: [resize_keep_aspect(f, cfg.resize_height) for f in frames]
    )
    squared = _stage("crop", lambda: [crop_and_square(f, cfg) for f in resized])

    def _pack():
        clips = [
            pack_ncthw(squared[k * strategy.clip_len:(k + 1) * strategy.clip_len], cfg)
            for k in range(strategy.num_clips)
        ]
        return np.concatenate(clips, axis=0)

    return _stage("pack", _pack)
