"""Stream ingestion: open simulated camera streams and cut them into
fixed-time-window chunks.

One segmenter per stream; segmenters are independent. The final window may
be shorter than ``window_s`` and is then emitted with ``partial=True`` --
an event in the closing seconds of a stream must not be dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional

from . import svf
from .errors import ConfigurationError, SourceUnavailableError
from .storage import ChunkStore

DEFAULT_WINDOW_S = 10.0


@dataclass(frozen=True)
class StreamSource:
    """One registered camera stream."""

    stream_id: str
    uri: str
    fps: float
    width: int
    height: int
    client_id: str

    def __post_init__(self) -> None:
        if not self.stream_id:
            raise ValueError("stream_id must be non-empty")
        if self.fps <= 0:
            raise ValueError(f"fps must be positive, got {self.fps}")
        if self.width < 16 or self.height < 16:
            raise ValueError(f"frames must be at least 16x16, got {self.width}x{self.height}")


@dataclass(frozen=True)
class VideoChunk:
    """Metadata for one fixed-time segment; the unit of storage, inference,
    alerting, and review."""

    chunk_id: str
    stream_id: str
    start_ts: int  # milliseconds since stream start
    duration_s: float
    frame_count: int
    storage_key: str
    partial: bool

    def to_dict(self) -> dict:
        return {
            "chunk_id": self.chunk_id,
            "stream_id": self.stream_id,
            "start_ts": self.start_ts,
            "duration_s": self.duration_s,
            "frame_count": self.frame_count,
            "storage_key": self.storage_key,
            "partial": self.partial,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VideoChunk":
        return cls(
            chunk_id=d["chunk_id"],
            stream_id=d["stream_id"],
            start_ts=int(d["start_ts"]),
            duration_s=float(d["duration_s"]),
            frame_count=int(d["frame_count"]),
            storage_key=d["storage_key"],
            partial=bool(d["partial"]),
        )


def storage_key_for(stream_id: str, start_ts: int) -> str:
    # zero-padded so lexicographic key order equals temporal order
    return f"{stream_id}/{start_ts:012d}.svf"


def chunk_id_for(stream_id: str, start_ts: int) -> str:
    return f"{stream_id}:{start_ts}"


class StreamHandle:
    """An opened stream: parsed fixture header plus ordered frame access.

    Frames are released at the declared fps on a simulated clock; nothing
    sleeps, so tests run at full speed while timing arithmetic stays exact.
    """

    def __init__(self, source: StreamSource, data: bytes):
        self.source = source
        self.data = data
        self.header = svf.read_header(data)

    @property
    def fps(self) -> int:
        return self.header.fps

    @property
    def frame_count(self) -> int:
        return self.header.frame_count

    @property
    def duration_s(self) -> float:
        return self.header.duration_s

    def frames(self) -> Iterator[svf.SvfFrame]:
        return svf.iter_frames(self.data)


def open_stream(source: StreamSource) -> StreamHandle:
    """Resolve the source uri to a readable fixture and parse its header."""
    uri = source.uri
    if uri.startswith("file://"):
        uri = uri[len("file://"):]
    path = Path(uri)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise SourceUnavailableError(f"source unavailable: {uri} ({exc})") from exc
    return StreamHandle(source, data)


@dataclass(frozen=True)
class SegmentedChunk:
    meta: VideoChunk
    data: bytes


def segment(
    handle: StreamHandle, window_s: float = DEFAULT_WINDOW_S
) -> Iterator[SegmentedChunk]:
    """Cut the stream into consecutive windows of exactly ``window_s``
    seconds, except possibly a final partial window.

    Chunks are non-overlapping, ordered, and tile the stream exactly: the
    concatenated frame ranges reproduce the frame sequence once. A
    zero-frame stream yields nothing.
    """
    if window_s <= 0:
        raise ConfigurationError(f"window_s must be positive, got {window_s}")
    fps = handle.fps
    frames_per_window = round(window_s * fps)
    if frames_per_window < 1:
        raise ConfigurationError(
            f"window of {window_s}s spans no frames at {fps} fps"
        )
    total = handle.frame_count
    stream_id = handle.source.stream_id
    start = 0
    index = 0
    while start < total:
        count = min(frames_per_window, total - start)
        partial = count < frames_per_window
        start_ts = round(index * window_s * 1000)
        duration = window_s if not partial else count / fps
        meta = VideoChunk(
            chunk_id=chunk_id_for(stream_id, start_ts),
            stream_id=stream_id,
            start_ts=start_ts,
            duration_s=duration,
            frame_count=count,
            storage_key=storage_key_for(stream_id, start_ts),
            partial=partial,
        )
        yield SegmentedChunk(meta, svf.slice_frames(handle.data, start, count))
        start += count
        index += 1


def full_chunk_count(duration_s: float, window_s: float) -> int:
    return math.floor(duration_s / window_s + 1e-9)


def put_chunk(
    store: ChunkStore, chunk: VideoChunk, data: bytes, metadata: Optional[dict] = None
) -> str:
    """Persist chunk bytes under its canonical key. Keys are write-once."""
    return store.put(chunk.storage_key, data, metadata or chunk.to_dict())


def get_chunk(store: ChunkStore, storage_key: str) -> bytes:
    return store.get(storage_key)
